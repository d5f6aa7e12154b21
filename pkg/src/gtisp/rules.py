"""Shrinkage rules and their induced penalties.

A threshold rule Theta(t; lam) is an odd, nondecreasing, unbounded map with
0 <= Theta(t; lam) <= t for t >= 0.  Each rule carries an implied penalty
obtained by inverting the rule and integrating the gap

    inv(u)  = sup{t : Theta(t; lam) <= u},
    s(u)    = inv(u) - u,
    P(theta) = integral of s(u) du over [0, |theta|],

which is the smallest-curvature penalty whose proximal map is the rule.
``penalty_value`` gives the closed forms, ``penalty_numeric`` evaluates the
construction directly and serves as the independent cross-check.

All maps are vectorized over ``t`` and ``lam``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import ParameterError

__all__ = [
    "ThresholdRule",
    "soft",
    "ridge",
    "hard",
    "scad",
    "firm",
    "hard_ridge",
    "threshold_scalar",
    "threshold_vector",
    "penalty_value",
    "penalty_numeric",
    "curvature_constant",
]

_KINDS = ("soft", "ridge", "hard", "scad", "firm", "hard_ridge")


@dataclass(frozen=True)
class ThresholdRule:
    """A named shrinkage rule plus its shape parameters.

    kind : one of soft / ridge / hard / scad / firm / hard_ridge
    a    : scad concavity, must be > 2
    alpha: firm interpolation in [0, 1] (1 recovers hard, 0 the identity)
    eta  : ridge shrink factor for ridge / hard_ridge, must be >= 0
    """

    kind: str
    a: float = 3.7
    alpha: float = 0.5
    eta: float = 0.0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ParameterError(f"unknown threshold rule {self.kind!r}")
        if self.kind == "scad" and not self.a > 2:
            raise ParameterError(f"scad requires a > 2, got a={self.a}")
        if self.kind == "firm" and not 0.0 <= self.alpha <= 1.0:
            raise ParameterError(f"firm requires 0 <= alpha <= 1, got {self.alpha}")
        if self.kind in ("ridge", "hard_ridge") and not self.eta >= 0:
            raise ParameterError(f"{self.kind} requires eta >= 0, got {self.eta}")


def soft() -> ThresholdRule:
    return ThresholdRule("soft")


def ridge(eta: float) -> ThresholdRule:
    return ThresholdRule("ridge", eta=eta)


def hard() -> ThresholdRule:
    return ThresholdRule("hard")


def scad(a: float = 3.7) -> ThresholdRule:
    return ThresholdRule("scad", a=a)


def firm(alpha: float) -> ThresholdRule:
    return ThresholdRule("firm", alpha=alpha)


def hard_ridge(eta: float) -> ThresholdRule:
    return ThresholdRule("hard_ridge", eta=eta)


def _check_lambda(lam) -> np.ndarray:
    lam = np.asarray(lam, dtype=float)
    if np.any(lam < 0):
        raise ParameterError("lambda must be nonnegative")
    return lam


def threshold_scalar(rule: ThresholdRule, t, lam):
    """Apply the scalar rule Theta(t; lam) elementwise.

    Boundary convention: hard-type rules keep the boundary point, i.e.
    |t| >= lam survives.  Scalar inputs return a float.
    """
    lam = _check_lambda(lam)
    t_arr = np.asarray(t, dtype=float)
    t_b, lam_b = np.broadcast_arrays(t_arr, lam)
    at = np.abs(t_b)
    sg = np.sign(t_b)

    if rule.kind == "soft":
        out = sg * np.maximum(at - lam_b, 0.0)
    elif rule.kind == "ridge":
        out = t_b / (1.0 + rule.eta)
    elif rule.kind == "hard":
        out = np.where(at >= lam_b, t_b, 0.0)
    elif rule.kind == "hard_ridge":
        out = np.where(at >= lam_b, t_b / (1.0 + rule.eta), 0.0)
    elif rule.kind == "scad":
        a = rule.a
        mid = sg * ((a - 1.0) * at - a * lam_b) / (a - 2.0)
        out = np.where(
            at <= 2.0 * lam_b,
            sg * np.maximum(at - lam_b, 0.0),
            np.where(at <= a * lam_b, mid, t_b),
        )
    else:  # firm
        al = rule.alpha
        if al == 1.0:
            out = np.where(at >= lam_b, t_b, 0.0)
        else:
            mid = sg * (at - al * lam_b) / (1.0 - al)
            out = np.where(
                at < al * lam_b, 0.0, np.where(at < lam_b, mid, t_b)
            )

    if np.isscalar(t) or (t_arr.ndim == 0 and np.ndim(lam) == 0):
        return float(out)
    return out


def threshold_vector(rule: ThresholdRule, a, lam):
    """Multivariate rule: shrink the Euclidean norm, keep the direction.

    Maps the zero vector to itself; the output norm is
    ``threshold_scalar(rule, ||a||, lam)``.
    """
    a = np.asarray(a, dtype=float)
    nrm = float(np.linalg.norm(a))
    if nrm == 0.0:
        _check_lambda(lam)
        return np.zeros_like(a)
    return a * (threshold_scalar(rule, nrm, lam) / nrm)


def _hard_penalty(at, lam):
    return np.where(at < lam, -0.5 * at**2 + lam * at, 0.5 * lam**2)


def penalty_value(rule: ThresholdRule, theta, lam, form: str = "minimal"):
    """Penalty at |theta| for the rule, in closed form.

    ``form="minimal"`` is the smallest-curvature penalty recovered by the
    inversion construction (the one the solver's objective uses).
    ``form="l0"`` is the discrete variant sharing the same fixed points,
    available for the hard and hard_ridge rules only: a constant cost per
    nonzero (plus the ridge term for hard_ridge).
    """
    lam = _check_lambda(lam)
    th = np.asarray(theta, dtype=float)
    at, lam_b = np.broadcast_arrays(np.abs(th), lam)

    if form == "l0":
        if rule.kind == "hard":
            out = np.where(at > 0, 0.5 * lam_b**2, 0.0)
        elif rule.kind == "hard_ridge":
            eta = rule.eta
            out = 0.5 * eta * at**2 + np.where(
                at > 0, 0.5 * lam_b**2 / (1.0 + eta), 0.0
            )
        else:
            raise ParameterError(
                f"l0 penalty form is defined for hard/hard_ridge, not {rule.kind}"
            )
    elif form != "minimal":
        raise ParameterError(f"unknown penalty form {form!r}")
    elif rule.kind == "soft":
        out = lam_b * at
    elif rule.kind == "ridge":
        out = 0.5 * rule.eta * at**2
    elif rule.kind == "hard":
        out = _hard_penalty(at, lam_b)
    elif rule.kind == "firm":
        out = rule.alpha * _hard_penalty(at, lam_b)
    elif rule.kind == "scad":
        a = rule.a
        mid = (2.0 * a * lam_b * at - at**2 - lam_b**2) / (2.0 * (a - 1.0))
        out = np.where(
            at <= lam_b,
            lam_b * at,
            np.where(at <= a * lam_b, mid, 0.5 * (a + 1.0) * lam_b**2),
        )
    else:  # hard_ridge
        eta = rule.eta
        knee = lam_b / (1.0 + eta)
        out = np.where(
            at < knee,
            -0.5 * at**2 + lam_b * at,
            0.5 * eta * at**2 + 0.5 * lam_b**2 / (1.0 + eta),
        )

    if np.isscalar(theta) and np.ndim(lam) == 0:
        return float(out)
    return out


def penalty_numeric(
    rule: ThresholdRule,
    theta: float,
    lam: float,
    grid_step: float = 1e-4,
    n_grid: int = 100_000,
) -> float:
    """Evaluate the penalty by numerically inverting the rule.

    Brackets sup{t : Theta(t) <= u} on a uniform ``n_grid``-point grid and
    refines each bracket by bisection on the rule itself (the grid alone is
    too coarse for the 1e-6 agreement the closed forms are held to), then
    integrates s(u) = inv(u) - u by the trapezoid rule with step
    ``grid_step``.  Never consults the closed-form penalties.
    """
    if grid_step <= 0:
        raise ParameterError("grid_step must be positive")
    lam = float(lam)
    _check_lambda(lam)
    u_max = abs(float(theta))
    if u_max == 0.0:
        return 0.0

    # upper end of the inversion grid: grow until the rule clears u_max
    T = max(10.0 * lam, 10.0 * u_max)
    while threshold_scalar(rule, T, lam) <= u_max:
        T *= 2.0
    tgrid = np.linspace(0.0, T, n_grid)
    vals = threshold_scalar(rule, tgrid, lam)

    m = max(int(np.ceil(u_max / grid_step)) + 1, 2)
    u = np.linspace(0.0, u_max, m)

    hi_idx = np.searchsorted(vals, u, side="right")  # first grid value > u
    lo = tgrid[hi_idx - 1]
    hi = tgrid[hi_idx]
    for _ in range(60):
        midp = 0.5 * (lo + hi)
        inside = threshold_scalar(rule, midp, lam) <= u
        lo = np.where(inside, midp, lo)
        hi = np.where(inside, hi, midp)
    s = lo - u
    return float(np.trapezoid(s, u))


def curvature_constant(rule: ThresholdRule) -> float:
    """Largest negative slope of s(u) for the rule (0 <= value <= 1).

    Enters the convergence condition: the scaled design's information norm
    must stay below max(1, 2 - value).
    """
    if rule.kind in ("soft", "ridge"):
        return 0.0
    if rule.kind in ("hard", "hard_ridge"):
        return 1.0
    if rule.kind == "scad":
        return 1.0 / (rule.a - 1.0)
    return float(rule.alpha)  # firm
