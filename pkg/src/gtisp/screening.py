"""Proportional screening: thresholding iteration with an order-statistic
threshold that keeps exactly m = ceil(alpha * n) components per step.

The first iterate from the zero start ranks |X'(y - mu(0))|, i.e. plain
marginal screening; further iterations re-rank against the joint surrogate,
which can rescue predictors that are marginally masked by correlation.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .exceptions import ParameterError
from .families import mean_vector, scaling_bound
from .rules import ThresholdRule, threshold_scalar
from .solver import Problem

__all__ = ["ScreenResult", "screen_proportional"]


@dataclass(frozen=True)
class ScreenResult:
    kept: np.ndarray  # sorted column indices, exactly m of them
    iterations: int
    final_beta: np.ndarray  # on the scaled problem
    converged: bool
    history: tuple  # nonzero index set after each iteration


def screen_proportional(
    problem: Problem,
    alpha: float,
    rule_shape: ThresholdRule,
    k0: float = None,
    max_iter: int = 200,
    stable_repeats: int = 3,
) -> ScreenResult:
    """Keep the m = ceil(alpha * n) largest surrogate components per step.

    Per iteration the threshold is placed at the midpoint between the m-th
    and (m+1)-th largest |surrogate| (ties broken toward lower column
    index), every component outside the top m is zeroed, and the iteration
    stops once the kept set repeats ``stable_repeats`` times in a row.
    Defined for singleton groups only.
    """
    if not problem.groups.all_singletons:
        raise ParameterError("proportional screening needs singleton groups")
    if not 0.0 < alpha <= 1.0:
        raise ParameterError("alpha must be in (0, 1]")
    n, p = problem.n, problem.p
    m = math.ceil(alpha * n)
    if m > p:
        raise ParameterError(f"ceil(alpha*n)={m} exceeds p={p}")
    if k0 is None:
        k0 = scaling_bound(
            problem.family, problem.X, [rule_shape], y=problem.y
        )
    Xs = problem.X / k0
    y = problem.y
    fam = problem.family
    order_key = np.arange(p)  # tie-break: lower index wins

    beta = np.zeros(p)
    prev = None
    streak = 0
    history = []
    converged = False
    iterations = 0
    for _ in range(max_iter):
        s = beta + Xs.T @ (y - mean_vector(fam, Xs @ beta))
        mags = np.abs(s)
        order = np.lexsort((order_key, -mags))
        top = order[:m]
        if m == p:
            lam = 0.0
        else:
            lam = 0.5 * (mags[order[m - 1]] + mags[order[m]])
        beta = np.zeros(p)
        beta[top] = threshold_scalar(rule_shape, s[top], lam)
        iterations += 1
        history.append(np.sort(np.flatnonzero(beta)))
        kept = frozenset(top.tolist())
        if kept == prev:
            streak += 1
            if streak >= stable_repeats - 1:
                converged = True
                break
        else:
            streak = 0
        prev = kept

    if not converged:
        warnings.warn(
            "screening support kept changing; returning the last one",
            stacklevel=2,
        )
    return ScreenResult(
        kept=np.sort(np.fromiter(prev, dtype=int)),
        iterations=iterations,
        final_beta=beta,
        converged=converged,
        history=tuple(history),
    )
