"""Group thresholding iteration for sparse penalized GLMs.

The estimator solves, on a rescaled design X/k0,

    min_beta  -loglik(beta) + sum_k P_k(||beta_k||_2; lambda_k)

by repeating  beta_k <- Theta_k(beta_k + X'(y - mu(beta)) |_k ; lambda_k).
Descent per iteration is certified when the information norm of the scaled
design stays below max(1, 2 - L), which ``scaling_bound`` arranges; a
runtime monitor guards the uncertified cases (relaxation, Poisson).

Conventions: the solver scales X internally by k0; ``lambdas`` always refer
to the scaled problem and the objective trace is computed on it; the
returned coefficients are mapped back to the original design (beta / k0).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .exceptions import DataError, ParameterError, SolverFailure
from .families import (
    Family,
    log_likelihood,
    mean_vector,
    scaling_bound,
    variance_vector,
)
from .rules import ThresholdRule, penalty_value, threshold_scalar

__all__ = [
    "GroupSpec",
    "Problem",
    "SolverOptions",
    "FitResult",
    "Calibration",
    "tisp_fit",
    "tisp_step",
    "objective",
    "fixed_point_residual",
    "calibrate",
]


@dataclass(frozen=True)
class GroupSpec:
    """Partition of the columns {0..p-1} into disjoint, exhaustive blocks."""

    blocks: tuple

    def __post_init__(self):
        blocks = tuple(tuple(int(j) for j in b) for b in self.blocks)
        object.__setattr__(self, "blocks", blocks)
        if not blocks or any(len(b) == 0 for b in blocks):
            raise ParameterError("groups must be nonempty")
        flat = [j for b in blocks for j in b]
        if len(set(flat)) != len(flat):
            raise ParameterError("groups share a column index")

    @classmethod
    def singletons(cls, p: int) -> "GroupSpec":
        return cls(tuple((j,) for j in range(p)))

    @property
    def k(self) -> int:
        return len(self.blocks)

    @property
    def all_singletons(self) -> bool:
        return all(len(b) == 1 for b in self.blocks)

    def validate_for(self, p: int) -> None:
        flat = sorted(j for b in self.blocks for j in b)
        if flat != list(range(p)):
            raise ParameterError(
                f"groups must partition all {p} columns exactly"
            )

    def col_to_group(self, p: int) -> np.ndarray:
        self.validate_for(p)
        out = np.empty(p, dtype=int)
        for k, b in enumerate(self.blocks):
            out[list(b)] = k
        return out


@dataclass(frozen=True)
class Problem:
    """Immutable fit input.

    ``lambdas`` refer to the scaled design X/k0 (see module docstring) and
    may be a scalar shared by all groups; ``weights`` are optional
    per-group multipliers on top of it.  ``column_normalized`` records
    whether X arrived with unit-norm columns (the lambda-grid formula
    assumes it).
    """

    X: np.ndarray
    y: np.ndarray
    family: Family
    groups: GroupSpec = None
    rules: object = None
    lambdas: object = 0.0
    fit_intercept: bool = False
    weights: object = None
    column_normalized: bool = False

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if X.ndim != 2:
            raise DataError("X must be a 2-d array")
        if y.shape != (X.shape[0],):
            raise DataError(
                f"y has shape {y.shape}, expected ({X.shape[0]},)"
            )
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        groups = self.groups or GroupSpec.singletons(X.shape[1])
        groups.validate_for(X.shape[1])
        object.__setattr__(self, "groups", groups)
        rules = self.rules
        if rules is None:
            raise ParameterError("a threshold rule is required")
        if isinstance(rules, ThresholdRule):
            rules = (rules,) * groups.k
        else:
            rules = tuple(rules)
        if len(rules) != groups.k:
            raise ParameterError(
                f"got {len(rules)} rules for {groups.k} groups"
            )
        object.__setattr__(self, "rules", rules)
        lam = np.broadcast_to(
            np.asarray(self.lambdas, dtype=float), (groups.k,)
        ).copy()
        if np.any(lam < 0):
            raise ParameterError("lambdas must be nonnegative")
        object.__setattr__(self, "lambdas", lam)
        if self.weights is not None:
            w = np.asarray(self.weights, dtype=float)
            if w.shape != (groups.k,) or np.any(w < 0):
                raise ParameterError(
                    "weights must be one nonnegative multiplier per group"
                )
            object.__setattr__(self, "weights", w)

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]

    def effective_lambdas(self) -> np.ndarray:
        if self.weights is None:
            return self.lambdas
        return self.lambdas * self.weights


@dataclass(frozen=True)
class SolverOptions:
    k0: float = None  # None: compute via scaling_bound
    omega: float = 2.0  # 1 = certified plain iteration, 2 = relaxed
    tol: float = 1e-8  # sup-norm step tolerance
    max_iter: int = 10_000
    beta0: np.ndarray = None  # start on the scaled problem; default zero
    descent_slack: float = 1e-9
    intercept_every: int = 5

    def __post_init__(self):
        if self.omega not in (1, 1.0, 2, 2.0):
            raise ParameterError("omega must be 1 or 2")
        if self.tol <= 0 or self.max_iter < 1:
            raise ParameterError("tol must be > 0 and max_iter >= 1")


@dataclass(frozen=True)
class FitResult:
    beta: np.ndarray  # original-design scale (beta_scaled / k0)
    intercept: float
    objective_trace: np.ndarray  # F on the scaled problem, final run
    fixed_point_residual: float
    iterations: int
    converged: bool
    k0_used: float
    descent_violations: int
    restarted: bool = False  # relaxation diverged, rerun with omega=1

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.beta)


@dataclass(frozen=True)
class Calibration:
    beta: np.ndarray
    intercept: float
    converged: bool
    capped: bool
    iterations: int


class _Work:
    """Scaled-problem scratch shared across iterations."""

    def __init__(self, problem: Problem, k0: float):
        self.Xs = problem.X / k0
        self.y = problem.y
        self.family = problem.family
        self.p = problem.p
        self.K = problem.groups.k
        self.col_to_group = problem.groups.col_to_group(problem.p)
        self.lam = problem.effective_lambdas()
        # vectorize over groups sharing a rule (the common case is one rule)
        by_rule = {}
        for k, r in enumerate(problem.rules):
            by_rule.setdefault(r, []).append(k)
        self.rule_groups = [
            (r, np.asarray(ks, dtype=int)) for r, ks in by_rule.items()
        ]

    def surrogate(self, beta, intercept):
        mu = mean_vector(self.family, self.Xs @ beta + intercept)
        return beta + self.Xs.T @ (self.y - mu)

    def threshold(self, s):
        norms = np.sqrt(
            np.bincount(self.col_to_group, weights=s * s, minlength=self.K)
        )
        tn = np.empty(self.K)
        for rule, ks in self.rule_groups:
            tn[ks] = threshold_scalar(rule, norms[ks], self.lam[ks])
        safe = np.where(norms > 0.0, norms, 1.0)
        factor = np.where(norms > 0.0, tn / safe, 0.0)
        return s * factor[self.col_to_group]

    def neg_loglik(self, beta, intercept):
        return -log_likelihood(self.family, self.y, self.Xs @ beta + intercept)

    def penalty(self, beta):
        norms = np.sqrt(
            np.bincount(self.col_to_group, weights=beta * beta, minlength=self.K)
        )
        total = 0.0
        for rule, ks in self.rule_groups:
            total += float(
                np.sum(penalty_value(rule, norms[ks], self.lam[ks]))
            )
        return total

    def objective(self, beta, intercept):
        return self.neg_loglik(beta, intercept) + self.penalty(beta)

    def intercept_step(self, beta, intercept, slack):
        """One damped Newton step for the unpenalized shift."""
        eta = self.Xs @ beta + intercept
        g = float(np.sum(self.y - mean_vector(self.family, eta)))
        h = float(np.sum(variance_vector(self.family, eta)))
        if h <= 0.0:
            return intercept
        step = g / h
        f_cur = self.neg_loglik(beta, intercept)
        for _ in range(30):
            cand = intercept + step
            if self.neg_loglik(beta, cand) <= f_cur + slack:
                return cand
            step *= 0.5
        return intercept

    def polish_intercept(self, beta, intercept, tol=1e-10, max_iter=100):
        for _ in range(max_iter):
            new = self.intercept_step(beta, intercept, 0.0)
            if abs(new - intercept) < tol:
                return new
            intercept = new
        return intercept


def objective(problem: Problem, beta, intercept: float = 0.0) -> float:
    """Penalized negative log-likelihood on the problem as given."""
    return _Work(problem, 1.0).objective(np.asarray(beta, dtype=float), intercept)


def tisp_step(beta, problem: Problem, intercept: float = 0.0) -> np.ndarray:
    """One plain synchronous update on an (already scaled) problem."""
    w = _Work(problem, 1.0)
    return w.threshold(w.surrogate(np.asarray(beta, dtype=float), intercept))


def fixed_point_residual(problem: Problem, beta, intercept: float = 0.0) -> float:
    """Sup-norm distance between beta and one plain update from it."""
    beta = np.asarray(beta, dtype=float)
    return float(np.max(np.abs(beta - tisp_step(beta, problem, intercept))))


def _resolve_k0(problem: Problem, options: SolverOptions) -> float:
    if options.k0 is not None:
        if options.k0 <= 0:
            raise ParameterError("k0 must be positive")
        return float(options.k0)
    return float(
        scaling_bound(
            problem.family,
            problem.X,
            problem.rules,
            y=problem.y,
            lambdas=problem.effective_lambdas(),
            groups=[np.asarray(b, dtype=int) for b in problem.groups.blocks],
        )
    )


def tisp_fit(problem: Problem, options: SolverOptions = None, **overrides) -> FitResult:
    """Run the iteration from the zero start to a fixed point.

    Keyword overrides patch ``options`` (e.g. ``tisp_fit(prob, omega=1)``).
    Reports the first iterate whose certified residual drops below tol, so
    ``converged`` implies ``fixed_point_residual <= tol`` exactly.
    """
    if options is None:
        options = SolverOptions()
    if overrides:
        options = replace(options, **overrides)
    col_norms = np.linalg.norm(problem.X, axis=0)
    if np.any(col_norms == 0.0):
        warnings.warn(
            f"{int(np.sum(col_norms == 0))} all-zero column(s); their "
            "coefficients stay 0",
            stacklevel=2,
        )
    k0 = _resolve_k0(problem, options)
    omega = float(options.omega)
    restarted = False

    while True:
        result = _run(problem, options, k0, omega, restarted)
        if result is not None:
            return result
        # relaxed iteration diverged: certified rerun
        warnings.warn(
            "relaxed iteration (omega=2) kept ascending; restarting with "
            "omega=1 from zero",
            stacklevel=2,
        )
        omega = 1.0
        restarted = True


def _run(problem, options, k0, omega, restarted):
    """One solver pass; None signals 'diverged under omega=2, retry'."""
    w = _Work(problem, k0)
    if options.beta0 is not None:
        beta = np.asarray(options.beta0, dtype=float).copy()
        if beta.shape != (w.p,):
            raise ParameterError(f"beta0 must have shape ({w.p},)")
    else:
        beta = np.zeros(w.p)
    alpha = 0.0
    xi = None
    trace = [w.objective(beta, alpha)]
    violations = 0
    ascent_streak = 0
    iterations = 0
    converged = False

    for j in range(options.max_iter):
        s = w.surrogate(beta, alpha)
        if omega == 1.0:
            xi_new = s
        else:
            if xi is None:
                xi = s  # first relaxed step equals the plain step
            xi_new = (1.0 - omega) * xi + omega * s
        beta_new = w.threshold(xi_new)
        step = float(np.max(np.abs(beta_new - beta)))

        if step < options.tol:
            # the relaxation state can keep drifting inside a threshold's
            # dead zone without ever moving beta, so certify against the
            # plain map instead of waiting for xi to settle
            if omega == 1.0:
                plain_gap = step
            else:
                probe = w.threshold(w.surrogate(beta, alpha))
                plain_gap = float(np.max(np.abs(probe - beta)))
            if plain_gap < options.tol:
                if not problem.fit_intercept:
                    converged = True
                    break
                # settle the intercept fully, then re-check the step there
                alpha = w.polish_intercept(beta, alpha)
                probe = w.threshold(w.surrogate(beta, alpha))
                if float(np.max(np.abs(probe - beta))) < options.tol:
                    converged = True
                    break
                xi = None  # stale relaxation state after the intercept jump
                continue

        beta, xi = beta_new, xi_new
        iterations += 1
        if problem.fit_intercept and iterations % options.intercept_every == 0:
            alpha = w.intercept_step(beta, alpha, options.descent_slack)
        f_new = w.objective(beta, alpha)
        if f_new > trace[-1] + options.descent_slack:
            violations += 1
            ascent_streak += 1
        else:
            ascent_streak = 0
        trace.append(f_new)
        if ascent_streak >= 3:
            if omega != 1.0 and not restarted:
                return None
            raise SolverFailure(
                "objective increased for 3 consecutive iterations: the "
                "scaled design's curvature condition looks violated; "
                "increase k0 (or check the Poisson heuristic bound)"
            )

    if problem.fit_intercept and not converged:
        alpha = w.polish_intercept(beta, alpha)
    residual = float(np.max(np.abs(beta - w.threshold(w.surrogate(beta, alpha)))))
    converged = converged and residual <= options.tol
    return FitResult(
        beta=beta / k0,
        intercept=alpha,
        objective_trace=np.asarray(trace),
        fixed_point_residual=residual,
        iterations=iterations,
        converged=converged,
        k0_used=k0,
        descent_violations=violations,
        restarted=restarted,
    )


def calibrate(
    problem: Problem,
    pattern,
    eta: float = 0.0,
    tol: float = 1e-10,
    max_iter: int = 100,
    coef_cap: float = 30.0,
) -> Calibration:
    """Newton refit restricted to ``pattern`` (column indices).

    eta = 0 gives the restricted MLE; eta > 0 the restricted ridge
    (penalty eta/2 * ||beta_S||^2, intercept never penalized).  Diverging
    coefficients (e.g. separation in logistic fits on small folds) are
    clamped at ``coef_cap`` in sup-norm and flagged via ``capped``.
    """
    if eta < 0:
        raise ParameterError("eta must be nonnegative")
    pattern = np.asarray(sorted(set(int(j) for j in pattern)), dtype=int)
    p = problem.p
    if pattern.size and (pattern.min() < 0 or pattern.max() >= p):
        raise ParameterError("pattern indices out of range")
    if pattern.size > problem.n:
        warnings.warn(
            f"pattern has {pattern.size} columns but only {problem.n} rows",
            stacklevel=2,
        )
    fam, y = problem.family, problem.y
    Xr = problem.X[:, pattern]
    m = pattern.size
    use_alpha = problem.fit_intercept
    if m == 0 and not use_alpha:
        return Calibration(np.zeros(p), 0.0, True, False, 0)

    q = m + (1 if use_alpha else 0)
    z = np.zeros(q)

    def predictor(z):
        eta_lin = Xr @ z[:m]
        if use_alpha:
            eta_lin = eta_lin + z[m]
        return eta_lin

    def value(z):
        return -log_likelihood(fam, y, predictor(z)) + 0.5 * eta * float(
            z[:m] @ z[:m]
        )

    f_cur = value(z)
    converged = False
    capped = False
    it = 0
    for it in range(1, max_iter + 1):
        lin = predictor(z)
        resid = y - mean_vector(fam, lin)
        wv = variance_vector(fam, lin)
        g = np.empty(q)
        g[:m] = Xr.T @ resid - eta * z[:m]
        H = np.empty((q, q))
        H[:m, :m] = Xr.T @ (wv[:, None] * Xr) + eta * np.eye(m)
        if use_alpha:
            g[m] = float(np.sum(resid))
            cross = Xr.T @ wv
            H[:m, m] = cross
            H[m, :m] = cross
            H[m, m] = float(np.sum(wv))
        try:
            d = np.linalg.solve(H, g)
        except np.linalg.LinAlgError:
            d = np.linalg.lstsq(H, g, rcond=None)[0]
        for _ in range(30):
            cand = z + d
            f_cand = value(cand)
            if f_cand <= f_cur + 1e-12 * max(1.0, abs(f_cur)):
                break
            d = 0.5 * d
        else:
            break  # no productive direction left
        z, f_cur = cand, f_cand
        if np.max(np.abs(z)) > coef_cap:
            z = np.clip(z, -coef_cap, coef_cap)
            capped = True
            break
        if float(np.max(np.abs(d))) < tol:
            converged = True
            break

    beta = np.zeros(p)
    beta[pattern] = z[:m]
    intercept = float(z[m]) if use_alpha else 0.0
    return Calibration(beta, intercept, converged, capped, it)
