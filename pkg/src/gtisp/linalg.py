"""Small numerical helpers: spectral norm and column normalization."""

from __future__ import annotations

import warnings

import numpy as np


def spectral_norm(X, max_iter: int = 1000, rel_tol: float = 1e-10) -> float:
    """Largest singular value of X by power iteration on X'X.

    Deterministic start (vector of ones); falls back to a seeded random
    vector if that start is orthogonal to the top eigenspace (zero
    Rayleigh quotient).
    """
    X = np.asarray(X, dtype=float)
    if X.size == 0:
        return 0.0
    p = X.shape[1]
    v = np.ones(p) / np.sqrt(p)
    prev = 0.0
    for _ in range(max_iter):
        w = X.T @ (X @ v)
        ray = float(v @ w)
        if ray == 0.0:
            nv = np.linalg.norm(w)
            if nv == 0.0:
                v = np.random.default_rng(0).standard_normal(p)
                v /= np.linalg.norm(v)
                w = X.T @ (X @ v)
                if float(v @ w) == 0.0 and np.linalg.norm(w) == 0.0:
                    return 0.0
                prev = 0.0
            v = w / np.linalg.norm(w) if np.linalg.norm(w) > 0 else v
            continue
        if abs(ray - prev) <= rel_tol * ray:
            return float(np.sqrt(ray))
        prev = ray
        v = w / np.linalg.norm(w)
    return float(np.sqrt(prev))


def normalize_columns(X):
    """Scale columns to unit Euclidean norm.

    Returns (X_normalized, scales) with X_normalized[:, j] = X[:, j] / scales[j];
    estimates on the normalized design back-transform by dividing by scales.
    All-zero columns get scale 1 and a warning.
    """
    X = np.asarray(X, dtype=float)
    scales = np.linalg.norm(X, axis=0)
    zero = scales == 0.0
    if np.any(zero):
        warnings.warn(
            f"{int(zero.sum())} all-zero column(s) left unscaled", stacklevel=2
        )
        scales = np.where(zero, 1.0, scales)
    return X / scales, scales
