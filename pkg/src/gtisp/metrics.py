"""Selection and prediction summaries for experiment reports."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DataError, ParameterError

__all__ = [
    "SelectionStats",
    "selection_stats",
    "scaled_deviance_error",
    "trimmed_mean",
    "spectral_mse_star",
    "tone_groups",
    "tone_columns",
]


@dataclass(frozen=True)
class SelectionStats:
    miss: float  # share of relevant items not selected
    false_alarm: float  # share of irrelevant items selected
    joint: float  # 1.0 when every relevant item was selected
    n_relevant: int
    n_selected: int


def selection_stats(selected, relevant, p: int) -> SelectionStats:
    """Miss / false-alarm rates of an index selection against the truth."""
    selected = frozenset(int(j) for j in selected)
    relevant = frozenset(int(j) for j in relevant)
    if selected and (min(selected) < 0 or max(selected) >= p):
        raise ParameterError("selected indices out of range")
    if relevant and (min(relevant) < 0 or max(relevant) >= p):
        raise ParameterError("relevant indices out of range")
    missed = len(relevant - selected)
    false = len(selected - relevant)
    n_irrelevant = p - len(relevant)
    miss = missed / len(relevant) if relevant else 0.0
    fa = false / n_irrelevant if n_irrelevant else 0.0
    return SelectionStats(
        miss=miss,
        false_alarm=fa,
        joint=1.0 if missed == 0 else 0.0,
        n_relevant=len(relevant),
        n_selected=len(selected),
    )


def scaled_deviance_error(nll_hat: float, nll_true: float) -> float:
    """Percent excess held-out loss over the true model's, 100*(L/L* - 1).

    Signs follow the losses handed in, so use a convention where the true
    model's loss is positive (e.g. summed test NLL of discrete data).
    """
    if nll_true == 0.0:
        raise DataError("true-model loss is zero; the ratio is undefined")
    return 100.0 * (nll_hat / nll_true - 1.0)


def trimmed_mean(values, trim: float) -> float:
    """Mean after dropping floor(trim/2 * N) items from each tail."""
    if not 0.0 <= trim < 1.0:
        raise ParameterError("trim must be in [0, 1)")
    x = np.sort(np.asarray(values, dtype=float))
    if x.size == 0:
        raise DataError("nothing to average")
    cut = math.floor(0.5 * trim * x.size)
    return float(np.mean(x[cut : x.size - cut]))


def spectral_mse_star(y, prediction, sigma2: float) -> float:
    """Mean squared prediction error with the noise floor removed."""
    y = np.asarray(y, dtype=float)
    prediction = np.asarray(prediction, dtype=float)
    if y.shape != prediction.shape:
        raise DataError("y and prediction differ in shape")
    return float(np.mean((y - prediction) ** 2) - sigma2)


def _matching_groups(group_freqs, tones, tol):
    group_freqs = np.asarray(group_freqs, dtype=float)
    hits = np.zeros(group_freqs.size, dtype=bool)
    for f in np.atleast_1d(np.asarray(tones, dtype=float)):
        hits |= np.abs(group_freqs - f) <= tol
    return np.flatnonzero(hits)


def tone_groups(dictionary, tones, tol: float = 1e-3) -> np.ndarray:
    """Dictionary groups whose frequency lies within tol of some tone."""
    return _matching_groups(dictionary.group_freqs, tones, tol)


def tone_columns(dictionary, tones, tol: float = 1e-3) -> np.ndarray:
    """Columns of the groups found by :func:`tone_groups`."""
    cols = []
    for g in tone_groups(dictionary, tones, tol):
        cols.extend(dictionary.groups.blocks[g])
    return np.asarray(sorted(cols), dtype=int)
