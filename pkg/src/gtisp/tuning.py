"""Lambda grids, solution paths, and structural cross-validation.

The selector refits, on each training fold, only the sparsity pattern a
path fit discovered on the full data (with a ridge level matched by
effective degrees of freedom when the rule carries one), then scores the
held-out fold by exact negative log-likelihood.  Patterns repeated along
the path share one set of fold refits.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np

from .exceptions import DataError, ParameterError, SolverFailure
from .families import log_likelihood, mean_vector
from .solver import (
    Problem,
    SolverOptions,
    _resolve_k0,
    calibrate,
    tisp_fit,
)

__all__ = [
    "LambdaGrid",
    "PathResult",
    "ScvReport",
    "lambda_grid",
    "solution_path",
    "df_ridge",
    "match_df",
    "make_folds",
    "scv",
]


@dataclass(frozen=True)
class LambdaGrid:
    values: np.ndarray  # descending
    lam_max: float
    k0: float


@dataclass(frozen=True)
class PathResult:
    lambdas: np.ndarray
    fits: tuple  # FitResult per lambda, None where the solver failed
    failed: np.ndarray
    k0: float


@dataclass(frozen=True)
class ScvReport:
    lambdas: np.ndarray
    k0: float
    fits: tuple
    patterns: tuple  # sorted column tuples, None for failed fits
    df: np.ndarray
    scv: np.ndarray  # summed held-out negative log-likelihood
    aic: np.ndarray  # 2*scv + 2*df
    bic: np.ndarray  # 2*scv + log(n)*df
    eta_folds: tuple  # per-lambda tuple of fold ridge levels, None if failed
    failed: np.ndarray
    selected: dict  # criterion name -> index into lambdas
    n_folds: int
    seed: int


def _null_linear_predictor(problem: Problem) -> np.ndarray:
    if problem.fit_intercept:
        cal = calibrate(problem, ())
        return np.full(problem.n, cal.intercept)
    return np.zeros(problem.n)


def lambda_grid(
    problem: Problem,
    n_points: int = 25,
    min_ratio: float = 1e-3,
    k0: float = None,
) -> LambdaGrid:
    """Geometric grid from the smallest lambda that zeroes every group.

    lam_max is the largest group norm of the scaled-design gradient at the
    null model, so the first path fit is empty for any rule that kills
    arguments below its threshold.  Assumes unit-norm columns; normalize
    first and set ``column_normalized``.
    """
    if not problem.column_normalized:
        raise ParameterError(
            "lambda_grid expects unit-norm columns (column_normalized=True)"
        )
    if n_points < 1:
        raise ParameterError("n_points must be >= 1")
    if not 0.0 < min_ratio <= 1.0:
        raise ParameterError("min_ratio must be in (0, 1]")
    if k0 is None:
        k0 = _resolve_k0(problem, SolverOptions())
    resid = problem.y - mean_vector(
        problem.family, _null_linear_predictor(problem)
    )
    g = problem.X.T @ resid / k0
    norms = [
        float(np.linalg.norm(g[np.asarray(b, dtype=int)]))
        for b in problem.groups.blocks
    ]
    lam_max = max(norms)
    if lam_max <= 0.0:
        raise DataError(
            "gradient at the null model is zero; no lambda grid exists"
        )
    if n_points == 1:
        values = np.array([lam_max])
    else:
        values = np.geomspace(lam_max, min_ratio * lam_max, n_points)
    return LambdaGrid(values=values, lam_max=lam_max, k0=float(k0))


def solution_path(
    problem: Problem,
    lambdas=None,
    k0: float = None,
    options: SolverOptions = None,
    **overrides,
) -> PathResult:
    """Fit every lambda with one shared k0 and a zero start each time.

    Failures are recorded (None fit, failed flag) instead of raised so one
    bad grid point cannot take down a whole path.
    """
    if options is None:
        options = SolverOptions()
    if overrides:
        options = replace(options, **overrides)
    if k0 is not None:
        options = replace(options, k0=float(k0))
    if lambdas is None:
        grid = lambda_grid(problem, k0=options.k0)
        lambdas = grid.values
        if options.k0 is None:
            options = replace(options, k0=grid.k0)
    elif isinstance(lambdas, LambdaGrid):
        lambdas = lambdas.values
    lambdas = np.asarray(lambdas, dtype=float)
    if options.k0 is None:
        options = replace(options, k0=_resolve_k0(problem, SolverOptions()))

    fits = []
    failed = np.zeros(lambdas.size, dtype=bool)
    for i, lam in enumerate(lambdas):
        prob_l = replace(problem, lambdas=float(lam))
        try:
            fits.append(tisp_fit(prob_l, options))
        except SolverFailure:
            fits.append(None)
            failed[i] = True
    if failed.any():
        warnings.warn(
            f"{int(failed.sum())} of {failed.size} path fits failed",
            stacklevel=2,
        )
    return PathResult(
        lambdas=lambdas,
        fits=tuple(fits),
        failed=failed,
        k0=float(options.k0),
    )


def _psd_eigenvalues(X: np.ndarray) -> np.ndarray:
    d = np.linalg.eigvalsh(np.asarray(X, dtype=float).T @ X)
    return np.clip(d, 0.0, None)


def _rank(d: np.ndarray) -> int:
    if d.size == 0 or d.max() <= 0.0:
        return 0
    return int(np.sum(d > d.max() * 1e-12))


def df_ridge(X: np.ndarray, eta: float) -> float:
    """Effective degrees of freedom sum_i d_i / (d_i + eta) of ridge on X.

    d_i are the eigenvalues of X'X; eta = 0 degenerates to the rank.
    """
    if eta < 0:
        raise ParameterError("eta must be nonnegative")
    d = _psd_eigenvalues(X)
    if eta == 0.0:
        return float(_rank(d))
    d = d[d > 0.0]
    return float(np.sum(d / (d + eta)))


def match_df(X: np.ndarray, target: float, tol: float = 1e-3) -> float:
    """Invert df_ridge in eta by bisection (df is strictly decreasing)."""
    if target <= 0.0:
        raise ParameterError("target df must be positive")
    d = _psd_eigenvalues(X)
    d = d[d > 0.0]
    rank = _rank(d)
    if target > rank:
        warnings.warn(
            f"target df {target:g} exceeds the rank {rank}; using eta=0",
            stacklevel=2,
        )
        return 0.0

    def df_at(eta):
        return float(np.sum(d / (d + eta)))

    lo, hi = 0.0, 1.0
    for _ in range(200):
        if df_at(hi) < target:
            break
        lo, hi = hi, 2.0 * hi
    for _ in range(500):
        mid = 0.5 * (lo + hi)
        val = df_at(mid)
        if abs(val - target) <= tol:
            return mid
        if val > target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def make_folds(y, family, n_folds: int, seed: int = 0) -> np.ndarray:
    """Deterministic fold labels; bernoulli responses split per class."""
    y = np.asarray(y, dtype=float)
    n = y.size
    if not 2 <= n_folds <= n:
        raise ParameterError(f"n_folds must be in [2, {n}]")
    rng = np.random.default_rng(seed)
    folds = np.empty(n, dtype=int)
    if family.name == "bernoulli":
        strata = [np.flatnonzero(y == 0.0), np.flatnonzero(y == 1.0)]
    else:
        strata = [np.arange(n)]
    offset = 0
    for idx in strata:
        idx = rng.permutation(idx)
        folds[idx] = (np.arange(idx.size) + offset) % n_folds
        offset += idx.size
    return folds


def _common_ridge_eta(problem: Problem):
    """The shared ridge level when every rule carries one, else None."""
    etas = set()
    for rule in problem.rules:
        if rule.kind in ("ridge", "hard_ridge") and rule.eta > 0.0:
            etas.add(rule.eta)
        else:
            return None
    return etas.pop() if len(etas) == 1 else None


def _score_pattern(problem, folds, pattern, df_target):
    """Summed held-out NLL of fold refits restricted to ``pattern``."""
    n_folds = int(folds.max()) + 1
    total = 0.0
    etas = []
    cols = np.asarray(pattern, dtype=int)
    for f in range(n_folds):
        tr = folds != f
        fold_prob = Problem(
            problem.X[tr],
            problem.y[tr],
            problem.family,
            rules=problem.rules[0],
            fit_intercept=problem.fit_intercept,
        )
        if df_target is not None and cols.size:
            eta_f = match_df(problem.X[tr][:, cols], df_target)
        else:
            eta_f = 0.0
        cal = calibrate(fold_prob, pattern, eta=eta_f)
        lin = problem.X[~tr] @ cal.beta + cal.intercept
        total -= log_likelihood(problem.family, problem.y[~tr], lin)
        etas.append(eta_f)
    return total, tuple(etas)


def scv(
    problem: Problem,
    lambdas=None,
    n_folds: int = 5,
    seed: int = 0,
    k0: float = None,
    options: SolverOptions = None,
    **overrides,
) -> ScvReport:
    """Score a solution path by selective cross-validation.

    Each lambda contributes only its full-data sparsity pattern (and, for
    ridge-carrying rules, its effective df); folds refit that pattern by
    restricted maximum likelihood, with eta re-matched on the fold design
    so shrinkage is comparable across folds of different size.
    """
    path = solution_path(
        problem, lambdas=lambdas, k0=k0, options=options, **overrides
    )
    n = problem.n
    folds = make_folds(problem.y, problem.family, n_folds, seed)
    ridge_eta = _common_ridge_eta(problem)

    L = path.lambdas.size
    df = np.full(L, np.nan)
    scv_vals = np.full(L, np.nan)
    patterns = []
    eta_folds = []
    cache = {}
    for l, fit in enumerate(path.fits):
        if fit is None:
            patterns.append(None)
            eta_folds.append(None)
            continue
        pattern = tuple(int(j) for j in fit.support)
        patterns.append(pattern)
        if ridge_eta is not None and pattern:
            # the iteration shrinks on the scaled design; the equivalent
            # penalty on original coefficients is eta * k0^2
            df_l = df_ridge(problem.X[:, pattern], ridge_eta * path.k0**2)
            df_target = df_l
        else:
            df_l = float(len(pattern))
            df_target = df_l if ridge_eta is not None else None
        df[l] = df_l
        key = (pattern, round(df_l, 12))
        if key not in cache:
            cache[key] = _score_pattern(problem, folds, pattern, df_target)
        scv_vals[l], etas = cache[key]
        eta_folds.append(etas)

    aic = 2.0 * scv_vals + 2.0 * df
    bic = 2.0 * scv_vals + math.log(n) * df

    valid = np.flatnonzero(~path.failed)
    if valid.size == 0:
        raise SolverFailure("every lambda on the path failed")
    selected = {}
    for name, vals in (("scv", scv_vals), ("aic", aic), ("bic", bic)):
        # ties go to fewer df, then to the larger lambda (earlier index)
        selected[name] = int(min(valid, key=lambda l: (vals[l], df[l], l)))
    return ScvReport(
        lambdas=path.lambdas,
        k0=path.k0,
        fits=path.fits,
        patterns=tuple(patterns),
        df=df,
        scv=scv_vals,
        aic=aic,
        bic=bic,
        eta_folds=tuple(eta_folds),
        failed=path.failed,
        selected=selected,
        n_folds=n_folds,
        seed=seed,
    )
