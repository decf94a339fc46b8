"""Rank and linear correlation between a produced ranking and reference values.

Kendall (tie-corrected tau-b) and Pearson wrap scipy.stats with the edge
cases pinned down: constant inputs raise instead of returning NaN. Spearman
is computed from integer rank sums so perfectly concordant inputs yield
exactly +/-1.0; scipy's covariance route is an ulp off at n=2.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import stats

from .errors import InputError


def _as_arrays(a, b) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(a, dtype=float)
    y = np.asarray(b, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise InputError("inputs must be 1-d sequences of equal length")
    if x.size < 2:
        raise InputError("need at least 2 observations")
    return x, y


def _require_varying(x: np.ndarray, y: np.ndarray) -> None:
    if np.all(x == x[0]) or np.all(y == y[0]):
        raise InputError("correlation is undefined for constant input")


def spearman(a, b) -> float:
    x, y = _as_arrays(a, b)
    _require_varying(x, y)
    # average ranks are multiples of 0.5, so doubled they are exact ints and
    # the correlation reduces to one float division at the end
    rx = [int(v) for v in stats.rankdata(x, method="average") * 2]
    ry = [int(v) for v in stats.rankdata(y, method="average") * 2]
    n = len(rx)
    sx, sy = sum(rx), sum(ry)
    sxx = n * sum(v * v for v in rx) - sx * sx
    syy = n * sum(v * v for v in ry) - sy * sy
    sxy = n * sum(p * q for p, q in zip(rx, ry)) - sx * sy
    if sxy * sxy == sxx * syy:  # Cauchy-Schwarz equality, exact in integers
        return 1.0 if sxy > 0 else -1.0
    return sxy / math.sqrt(sxx * syy)


def kendall_tau_b(a, b) -> float:
    x, y = _as_arrays(a, b)
    _require_varying(x, y)
    return float(stats.kendalltau(x, y, variant="b").statistic)


def pearson(a, b) -> float:
    x, y = _as_arrays(a, b)
    _require_varying(x, y)
    return float(stats.pearsonr(x, y).statistic)


def ranking_scores(ranking: list[str], n: int | None = None) -> dict[str, int]:
    """Map a best-first ranking to descending numeric scores (first item
    highest), for correlating an order against ground-truth values."""
    n = len(ranking) if n is None else n
    return {item: n - pos for pos, item in enumerate(ranking)}
