"""Natural exponential families with canonical links.

Log density: log f(y; t) = y*t - b(t) + c(y) with linear predictor t.
Supported: gaussian (identity link, unit variance), bernoulli (logit),
poisson (log).  The Gaussian dispersion is fixed at 1; rescale y if your
noise variance differs.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import expit, gammaln

from .exceptions import DataError, ParameterError
from .linalg import spectral_norm
from .rules import curvature_constant, threshold_vector

__all__ = [
    "Family",
    "gaussian",
    "bernoulli",
    "poisson",
    "mean_vector",
    "variance_vector",
    "cumulant",
    "check_support",
    "log_likelihood",
    "fisher_information",
    "scaling_bound",
]

_FAMILIES = ("gaussian", "bernoulli", "poisson")


@dataclass(frozen=True)
class Family:
    name: str

    def __post_init__(self):
        if self.name not in _FAMILIES:
            raise ParameterError(f"unknown family {self.name!r}")


def gaussian() -> Family:
    return Family("gaussian")


def bernoulli() -> Family:
    return Family("bernoulli")


def poisson() -> Family:
    return Family("poisson")


def cumulant(family: Family, eta):
    """b(eta), the log-partition term of the density."""
    eta = np.asarray(eta, dtype=float)
    if family.name == "gaussian":
        return 0.5 * eta**2
    if family.name == "bernoulli":
        return np.logaddexp(0.0, eta)
    return np.exp(eta)


def mean_vector(family: Family, eta, max_mean: float = 1e12):
    """b'(eta): identity, sigmoid, or exp.

    The sigmoid uses the stable two-branch form.  Poisson means are capped
    at ``max_mean`` with a warning so a wild intermediate iterate cannot
    overflow downstream products.
    """
    eta = np.asarray(eta, dtype=float)
    if family.name == "gaussian":
        return eta.copy()
    if family.name == "bernoulli":
        return expit(eta)
    cap = np.log(max_mean)
    if np.any(eta > cap):
        warnings.warn(
            f"poisson mean capped at {max_mean:g} (linear predictor too large)",
            stacklevel=2,
        )
    return np.exp(np.minimum(eta, cap))


def variance_vector(family: Family, eta, max_mean: float = 1e12):
    """b''(eta), the conditional variance at the linear predictor."""
    eta = np.asarray(eta, dtype=float)
    if family.name == "gaussian":
        return np.ones_like(eta)
    if family.name == "bernoulli":
        mu = expit(eta)
        return mu * (1.0 - mu)
    return np.exp(np.minimum(eta, np.log(max_mean)))


def check_support(family: Family, y) -> None:
    """Raise DataError naming the first index whose response is unsupported."""
    y = np.asarray(y, dtype=float)
    if not np.all(np.isfinite(y)):
        i = int(np.argmin(np.isfinite(y)))
        raise DataError(f"y[{i}]={y.flat[i]} is not finite")
    if family.name == "bernoulli":
        bad = ~np.isin(y, (0.0, 1.0))
        if np.any(bad):
            i = int(np.argmax(bad))
            raise DataError(f"y[{i}]={y.flat[i]} is not a 0/1 bernoulli response")
    elif family.name == "poisson":
        bad = (y < 0) | (y != np.floor(y))
        if np.any(bad):
            i = int(np.argmax(bad))
            raise DataError(
                f"y[{i}]={y.flat[i]} is not a nonnegative integer poisson count"
            )


def _offset(family: Family, y):
    """c(y), making log-likelihoods comparable across fits."""
    y = np.asarray(y, dtype=float)
    if family.name == "gaussian":
        return -0.5 * y**2 - 0.5 * np.log(2.0 * np.pi)
    if family.name == "bernoulli":
        return np.zeros_like(y)
    return -gammaln(y + 1.0)


def log_likelihood(family: Family, y, eta) -> float:
    """sum_i y_i*eta_i - b(eta_i) + c(y_i)."""
    y = np.asarray(y, dtype=float)
    eta = np.asarray(eta, dtype=float)
    if y.shape != eta.shape:
        raise DataError(f"y has shape {y.shape} but eta has shape {eta.shape}")
    check_support(family, y)
    return float(np.sum(y * eta - cumulant(family, eta) + _offset(family, y)))


def fisher_information(family: Family, X, beta, intercept: float = 0.0):
    """X' W X with W = diag b''(X beta + intercept)."""
    X = np.asarray(X, dtype=float)
    beta = np.asarray(beta, dtype=float)
    if X.shape[1] != beta.size:
        raise DataError(
            f"X has {X.shape[1]} columns but beta has {beta.size} entries"
        )
    w = variance_vector(family, X @ beta + intercept)
    return X.T @ (w[:, None] * X)


def _sup_variance(family: Family):
    if family.name == "gaussian":
        return 1.0
    if family.name == "bernoulli":
        return 0.25
    return None  # poisson: unbounded


def scaling_bound(family: Family, X, rules, y=None, lambdas=None, groups=None):
    """Least certified divisor k0 so that X/k0 makes the iteration descend.

    k0 = ||X||_2 * sqrt(sup b'' / max(1, 2 - L)) with L the largest
    curvature constant among ``rules`` (a single rule is accepted).

    Poisson has no finite sup b'', so the bound is a flagged heuristic: a
    5-step preliminary run at k0 = ||X||_2 estimates the coefficient norm,
    linear predictors are bounded by max_i ||x_i|| * ||beta||, and the
    resulting k0 is doubled for safety.  Requires ``y`` (and optionally the
    ``lambdas``/``groups`` the real fit will use).  The runtime descent
    monitor remains the authoritative safeguard.
    """
    X = np.asarray(X, dtype=float)
    try:
        rules = list(rules)
    except TypeError:
        rules = [rules]
    if not rules:
        raise ParameterError("at least one threshold rule is required")
    L = max(curvature_constant(r) for r in rules)
    denom = max(1.0, 2.0 - L)
    norm_x = spectral_norm(X)
    if norm_x == 0.0:
        raise DataError("design matrix is identically zero")

    sup_b2 = _sup_variance(family)
    if sup_b2 is not None:
        return norm_x * np.sqrt(sup_b2 / denom)

    if y is None:
        raise ParameterError(
            "poisson scaling bound needs y for its preliminary run"
        )
    y = np.asarray(y, dtype=float)
    check_support(family, y)
    p = X.shape[1]
    if groups is None:
        groups = [np.array([j]) for j in range(p)]
    else:
        groups = [np.asarray(g, dtype=int) for g in groups]
    if lambdas is None:
        lams = np.zeros(len(groups))
    else:
        lams = np.broadcast_to(np.asarray(lambdas, dtype=float), (len(groups),))
    Xs = X / norm_x
    beta = np.zeros(p)
    for _ in range(5):
        s = beta + Xs.T @ (y - mean_vector(family, Xs @ beta))
        nxt = np.zeros(p)
        for k, g in enumerate(groups):
            nxt[g] = threshold_vector(rules[min(k, len(rules) - 1)], s[g], lams[k])
        beta = nxt
    beta_orig = beta / norm_x
    row_norms = np.linalg.norm(X, axis=1)
    bound = float(np.max(row_norms) * np.linalg.norm(beta_orig))
    k0 = 2.0 * norm_x * np.sqrt(np.exp(bound) / denom)
    warnings.warn(
        "poisson scaling bound is a heuristic (variance has no finite sup); "
        "rely on the solver's descent monitor",
        stacklevel=2,
    )
    return k0
