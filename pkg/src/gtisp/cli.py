"""Command line front end.

Penalty levels always refer to the scaled design X/k0; every command that
fits prints the k0 it used so results can be reproduced from the library.
Report commands write delimited output plus, unless --no-plot is given, a
rendered figure alongside it.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .benchmark import SPECTRAL_METHODS, run_spectral_benchmark
from .exceptions import DataError, ParameterError, SolverFailure
from .families import bernoulli, gaussian, poisson
from .io import load_groups, load_xy, save_groups, save_xy, to_json, write_csv
from .linalg import normalize_columns
from .rules import firm, hard, hard_ridge, ridge, scad, soft
from .screening import screen_proportional
from .simulate import (
    STREAM_TEST,
    STREAM_TRAIN,
    STREAM_VALIDATION,
    Ar1Design,
    TwinSineSpec,
    build_dictionary,
    gen_ar1_glm,
    gen_twinsine,
)
from .solver import Problem, SolverOptions, tisp_fit
from .tuning import lambda_grid, scv, solution_path

FAMILIES = {"gaussian": gaussian, "bernoulli": bernoulli, "poisson": poisson}
STREAMS = {
    "train": STREAM_TRAIN,
    "validation": STREAM_VALIDATION,
    "test": STREAM_TEST,
}


def _make_rule(args):
    name = args.rule.replace("_", "-")
    if name == "soft":
        return soft()
    if name == "ridge":
        return ridge(args.eta)
    if name == "hard":
        return hard()
    if name == "scad":
        return scad(args.scad_a)
    if name == "firm":
        return firm(args.firm_alpha)
    if name == "hard-ridge":
        return hard_ridge(args.eta)
    raise ParameterError(f"unknown rule {args.rule!r}")


def _load_problem(args, need_normalized):
    X, y = load_xy(args.data)
    groups = load_groups(args.groups, X.shape[1]) if args.groups else None
    scales = np.ones(X.shape[1])
    normalized = False
    if need_normalized or args.normalize:
        X, scales = normalize_columns(X)
        normalized = True
    problem = Problem(
        X,
        y,
        FAMILIES[args.family](),
        groups=groups,
        rules=_make_rule(args),
        lambdas=getattr(args, "lam", 0.0) or 0.0,
        fit_intercept=args.intercept,
        column_normalized=normalized,
    )
    return problem, scales


def _solver_options(args):
    return SolverOptions(
        k0=args.k0,
        omega=args.omega,
        tol=args.tol,
        max_iter=args.max_iter,
    )


def _support_1based(beta):
    return [int(j) + 1 for j in np.flatnonzero(beta)]


def cmd_fit(args):
    problem, scales = _load_problem(args, need_normalized=False)
    fit = tisp_fit(problem, _solver_options(args))
    beta = fit.beta / scales  # back to the columns as they arrived
    print(f"k0 = {fit.k0_used:.6g} (lambda applies to X/k0)")
    print(
        f"converged = {fit.converged} after {fit.iterations} iterations; "
        f"{fit.support.size} of {problem.p} coefficients are nonzero"
    )
    payload = {
        "beta": beta,
        "intercept": fit.intercept,
        "support": _support_1based(fit.beta),
        "lambda": float(problem.lambdas[0]),
        "k0": fit.k0_used,
        "iterations": fit.iterations,
        "converged": fit.converged,
        "fixed_point_residual": fit.fixed_point_residual,
        "objective": float(fit.objective_trace[-1]),
        "restarted": fit.restarted,
    }
    if args.format == "json":
        with open(f"{args.out}.json", "w") as fh:
            fh.write(to_json(payload) + "\n")
        print(f"wrote {args.out}.json")
    else:
        write_csv(
            f"{args.out}.csv",
            ["column", "beta"],
            [(j + 1, float(b)) for j, b in enumerate(beta)],
        )
        print(f"wrote {args.out}.csv")
    return 0


def cmd_path(args):
    problem, scales = _load_problem(args, need_normalized=True)
    grid = lambda_grid(
        problem, n_points=args.grid_size, min_ratio=args.min_ratio
    )
    path = solution_path(
        problem, lambdas=grid, k0=grid.k0, options=_solver_options(args)
    )
    print(f"k0 = {path.k0:.6g} (lambda applies to X/k0)")
    rows = []
    for lam, fit in zip(path.lambdas, path.fits):
        if fit is None:
            rows.append([float(lam), 0, 0, 0] + [float("nan")] * problem.p)
        else:
            beta = fit.beta / scales
            rows.append(
                [float(lam), int(fit.converged), fit.iterations,
                 fit.support.size] + [float(b) for b in beta]
            )
    write_csv(
        f"{args.out}.csv",
        ["lambda", "converged", "iterations", "nonzero"]
        + [f"beta_{j}" for j in range(1, problem.p + 1)],
        rows,
    )
    print(f"wrote {args.out}.csv")
    if args.plot:
        from .plots import path_plot

        path_plot(path, f"{args.out}.png")
        print(f"wrote {args.out}.png")
    return 0


def cmd_tune(args):
    problem, scales = _load_problem(args, need_normalized=True)
    grid = lambda_grid(
        problem, n_points=args.grid_size, min_ratio=args.min_ratio
    )
    report = scv(
        problem,
        lambdas=grid,
        n_folds=args.folds,
        seed=args.seed,
        k0=grid.k0,
        options=_solver_options(args),
    )
    print(f"k0 = {report.k0:.6g} (lambda applies to X/k0)")
    for name in ("scv", "aic", "bic"):
        l = report.selected[name]
        print(
            f"selected by {name}: lambda = {report.lambdas[l]:.6g} "
            f"(df = {report.df[l]:.4g})"
        )
    rows = []
    for l in range(report.lambdas.size):
        rows.append(
            [
                float(report.lambdas[l]),
                float(report.df[l]),
                float(report.scv[l]),
                float(report.aic[l]),
                float(report.bic[l]),
                0 if report.patterns[l] is None else len(report.patterns[l]),
                int(report.selected["scv"] == l),
                int(report.selected["aic"] == l),
                int(report.selected["bic"] == l),
            ]
        )
    write_csv(
        f"{args.out}.csv",
        ["lambda", "df", "scv", "aic", "bic", "nonzero",
         "pick_scv", "pick_aic", "pick_bic"],
        rows,
    )
    chosen = report.selected[args.criterion]
    fit = report.fits[chosen]
    payload = {
        "criterion": args.criterion,
        "lambda": float(report.lambdas[chosen]),
        "df": float(report.df[chosen]),
        "k0": report.k0,
        "beta": fit.beta / scales,
        "intercept": fit.intercept,
        "support": _support_1based(fit.beta),
        "folds": report.n_folds,
        "seed": report.seed,
        "lambdas": report.lambdas,
        "scv": report.scv,
        "aic": report.aic,
        "bic": report.bic,
    }
    with open(f"{args.out}.json", "w") as fh:
        fh.write(to_json(payload) + "\n")
    print(f"wrote {args.out}.csv and {args.out}.json")
    if args.plot:
        from .plots import tune_plot

        tune_plot(report, f"{args.out}.png")
        print(f"wrote {args.out}.png")
    return 0


def cmd_screen(args):
    problem, _ = _load_problem(args, need_normalized=False)
    result = screen_proportional(
        problem,
        args.alpha,
        _make_rule(args),
        k0=args.k0,
        max_iter=args.max_iter,
    )
    kept = [int(j) + 1 for j in result.kept]
    print(
        f"kept {len(kept)} of {problem.p} columns after "
        f"{result.iterations} iterations (converged = {result.converged})"
    )
    payload = {
        "kept": kept,
        "iterations": result.iterations,
        "converged": result.converged,
        "history": [[int(j) + 1 for j in h] for h in result.history],
    }
    with open(f"{args.out}.json", "w") as fh:
        fh.write(to_json(payload) + "\n")
    write_csv(f"{args.out}.csv", ["column"], [(j,) for j in kept])
    print(f"wrote {args.out}.json and {args.out}.csv")
    return 0


def cmd_simulate(args):
    stream = STREAMS[args.stream]
    if args.kind == "ar1":
        design = Ar1Design(
            n=args.n, p=args.p, rho=args.rho, b=args.b, sigma=args.sigma
        )
        X, y, beta = gen_ar1_glm(
            design, FAMILIES[args.family](), seed=args.seed, stream=stream
        )
        save_xy(f"{args.out}.csv", X, y)
        meta = {
            "kind": "ar1",
            "n": args.n, "p": args.p, "rho": args.rho, "b": args.b,
            "sigma": args.sigma, "family": args.family,
            "seed": args.seed, "stream": args.stream,
            "relevant_columns": _support_1based(beta),
        }
    else:
        spec = TwinSineSpec(sigma2=args.sigma2, n=args.n)
        t, clean, y = gen_twinsine(spec, seed=args.seed, stream=stream)
        dictionary = build_dictionary(t)
        save_xy(f"{args.out}.csv", dictionary.X, y)
        save_groups(f"{args.out}.groups", dictionary.groups)
        meta = {
            "kind": "twinsine",
            "n": args.n, "sigma2": args.sigma2,
            "tones": [spec.f1, spec.f2],
            "tone_groups": [125, 126],
            "columns": dictionary.p,
            "seed": args.seed, "stream": args.stream,
        }
        print(f"wrote {args.out}.groups")
    with open(f"{args.out}.meta.json", "w") as fh:
        fh.write(to_json(meta) + "\n")
    print(f"wrote {args.out}.csv and {args.out}.meta.json")
    return 0


def cmd_spectral(args):
    report = run_spectral_benchmark(
        sigma2=args.sigma2,
        runs=args.runs,
        seed=args.seed,
        grid_points=args.grid_size,
        min_ratio=args.min_ratio,
        max_iter=args.max_iter,
        tuner=args.tuner,
        methods=tuple(args.methods),
    )
    rows = []
    for name, m in report.methods.items():
        rows.append(
            [name, m.mse_star_median, m.group_jd, m.group_miss,
             m.group_false_alarm, m.column_jd, m.column_miss,
             m.column_false_alarm]
        )
        print(
            f"{name:18s} median MSE* = {m.mse_star_median:8.4f}  "
            f"tone JD = {m.group_jd:5.1f}%  miss = {m.group_miss:5.1f}%  "
            f"extra groups = {m.group_false_alarm:5.2f}%"
        )
    write_csv(
        f"{args.out}.csv",
        ["method", "mse_star_median", "group_jd", "group_miss",
         "group_false_alarm", "column_jd", "column_miss",
         "column_false_alarm"],
        rows,
    )
    with open(f"{args.out}.json", "w") as fh:
        fh.write(to_json(report) + "\n")
    print(
        f"wrote {args.out}.csv and {args.out}.json "
        f"({report.elapsed_seconds:.0f}s elapsed)"
    )
    if args.plot:
        from .plots import spectral_plot

        spectral_plot(report, f"{args.out}.png")
        print(f"wrote {args.out}.png")
    return 0


def _add_rule_flags(p):
    p.add_argument(
        "--rule",
        default="soft",
        help="soft, ridge, hard, scad, firm, or hard-ridge",
    )
    p.add_argument("--eta", type=float, default=0.0,
                   help="ridge level for ridge / hard-ridge rules")
    p.add_argument("--scad-a", type=float, default=3.7)
    p.add_argument("--firm-alpha", type=float, default=0.5)


def _add_data_flags(p):
    p.add_argument("--data", required=True, help="CSV with header x1..xp,y")
    p.add_argument("--groups", help="group file, 1-based indices per line")
    p.add_argument("--family", default="gaussian", choices=sorted(FAMILIES))
    p.add_argument("--intercept", action="store_true")
    p.add_argument("--normalize", action="store_true",
                   help="rescale columns to unit norm before fitting")


def _add_solver_flags(p):
    p.add_argument("--omega", type=float, default=2.0, choices=(1.0, 2.0))
    p.add_argument("--k0", type=float, default=None,
                   help="scaling constant; default is the certified bound")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--max-iter", type=int, default=10_000)


def _add_grid_flags(p):
    p.add_argument("--grid-size", type=int, default=25)
    p.add_argument("--min-ratio", type=float, default=1e-3)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="gtisp",
        description=(
            "Sparse GLM fitting by thresholded iteration.  Penalty levels "
            "refer to the scaled design X/k0; fits print the k0 they used."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="single fit at a fixed lambda")
    _add_data_flags(p)
    _add_rule_flags(p)
    _add_solver_flags(p)
    p.add_argument("--lambda", dest="lam", type=float, default=0.0)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", default="gtisp_fit")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("path", help="solution path over a lambda grid")
    _add_data_flags(p)
    _add_rule_flags(p)
    _add_solver_flags(p)
    _add_grid_flags(p)
    p.add_argument("--plot", dest="plot", action="store_true", default=True)
    p.add_argument("--no-plot", dest="plot", action="store_false")
    p.add_argument("--out", default="gtisp_path")
    p.set_defaults(func=cmd_path)

    p = sub.add_parser("tune", help="pick lambda by cross-validation")
    _add_data_flags(p)
    _add_rule_flags(p)
    _add_solver_flags(p)
    _add_grid_flags(p)
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--criterion", choices=("scv", "aic", "bic"),
                   default="bic")
    p.add_argument("--plot", dest="plot", action="store_true", default=True)
    p.add_argument("--no-plot", dest="plot", action="store_false")
    p.add_argument("--out", default="gtisp_tune")
    p.set_defaults(func=cmd_tune)

    p = sub.add_parser("screen", help="keep the top ceil(alpha*n) columns")
    _add_data_flags(p)
    _add_rule_flags(p)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--k0", type=float, default=None)
    p.add_argument("--max-iter", type=int, default=200)
    p.add_argument("--out", default="gtisp_screen")
    p.set_defaults(func=cmd_screen)

    p = sub.add_parser("simulate", help="write a seeded synthetic data set")
    p.add_argument("--kind", choices=("ar1", "twinsine"), required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--stream", choices=sorted(STREAMS), default="train")
    p.add_argument("--family", default="gaussian", choices=sorted(FAMILIES))
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--p", type=int, default=100)
    p.add_argument("--rho", type=float, default=0.5)
    p.add_argument("--b", type=float, default=1.0)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--sigma2", type=float, default=1.0)
    p.add_argument("--out", default="gtisp_sim")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser(
        "spectral", help="twin-tone recovery benchmark over many runs"
    )
    p.add_argument("--runs", type=int, default=20)
    p.add_argument("--sigma2", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=20260825)
    p.add_argument("--tuner", choices=("large_val", "scv_bic"),
                   default="large_val")
    p.add_argument("--grid-size", type=int, default=25)
    p.add_argument("--min-ratio", type=float, default=0.05)
    p.add_argument("--max-iter", type=int, default=2000)
    p.add_argument("--methods", nargs="+", default=list(SPECTRAL_METHODS),
                   choices=SPECTRAL_METHODS)
    p.add_argument("--plot", dest="plot", action="store_true", default=True)
    p.add_argument("--no-plot", dest="plot", action="store_false")
    p.add_argument("--out", default="gtisp_spectral")
    p.set_defaults(func=cmd_spectral)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (DataError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except SolverFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
