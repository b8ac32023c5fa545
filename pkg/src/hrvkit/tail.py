"""Univariate tail-index estimation on upper order statistics.

All estimators work on the descending order statistics
``X_(1) >= X_(2) >= ... >= X_(n)`` of a data vector and take the
intermediate order ``k`` explicitly.  Nothing here chooses ``k`` for you:
sweep :func:`hill_series` over a grid and look at the plot data.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DegenerateDataError,
    EmptyInputError,
    KTooLargeError,
    NonPositiveDataError,
)

__all__ = [
    "TailFit",
    "TailSeriesPoint",
    "hill_estimate",
    "hill_series",
    "alt_tail_estimate",
    "intermediate_scale",
]


@dataclass(frozen=True)
class TailFit:
    """A fitted tail index together with the statistic anchoring it.

    ``scale_at_k`` is the k-th largest data value, the plug-in estimate of
    the scaling function at ``n/k``.
    """

    alpha_hat: float
    k: int
    method: str
    scale_at_k: float


@dataclass(frozen=True)
class TailSeriesPoint:
    """One entry of a k-sweep: either a fit or the reason it was skipped."""

    k: int
    fit: TailFit | None = None
    error: str | None = None


def _descending(data: Iterable[float]) -> np.ndarray:
    arr = np.asarray(data, dtype=np.float64)
    if arr.size == 0:
        raise EmptyInputError("empty data vector")
    if not np.isfinite(arr).all():
        raise NonPositiveDataError("data must be finite")
    return np.sort(arr)[::-1]


def hill_estimate(data: Iterable[float], k: int) -> TailFit:
    """Hill estimator on the top ``k`` log-ratios.

    ``alpha_hat = 1 / mean(log(X_(i) / X_(k+1)), i = 1..k)`` — exactly k
    ratios, anchored at the (k+1)-th largest value.
    """
    x = _descending(data)
    n = x.size
    if not 1 <= k <= n - 1:
        raise KTooLargeError(f"hill needs 1 <= k <= n-1, got k={k}, n={n}")
    anchor = x[k]
    if anchor <= 0.0:
        raise NonPositiveDataError(f"order statistic X_({k + 1}) = {anchor} must be > 0")
    hill_sum = float(np.mean(np.log(x[:k] / anchor)))
    if hill_sum <= 0.0:
        raise DegenerateDataError("top k+1 order statistics are all equal; Hill sum is 0")
    return TailFit(alpha_hat=1.0 / hill_sum, k=k, method="hill", scale_at_k=float(x[k - 1]))


def hill_series(
    data: Iterable[float],
    k_values: Sequence[int] | None = None,
) -> list[TailSeriesPoint]:
    """Hill fits over a grid of k, ascending, errors flagged per point.

    ``k_values`` defaults to the full range ``1..n-1``.  Points whose fit
    fails carry the failure reason instead of aborting the sweep.
    """
    x = _descending(data)
    n = x.size
    if k_values is None:
        k_values = range(1, n)
    ks = sorted(int(k) for k in k_values)

    positive = int(np.searchsorted(-x, 0.0, side="left"))  # count of strictly positive values
    logs = np.log(x[:positive]) if positive else np.empty(0)
    csum = np.concatenate([[0.0], np.cumsum(logs)])

    points: list[TailSeriesPoint] = []
    for k in ks:
        if not 1 <= k <= n - 1:
            points.append(TailSeriesPoint(k=k, error="KTooLarge"))
            continue
        if k + 1 > positive:
            points.append(TailSeriesPoint(k=k, error="NonPositiveData"))
            continue
        hill_sum = csum[k] / k - logs[k]
        if hill_sum <= 0.0:
            points.append(TailSeriesPoint(k=k, error="DegenerateData"))
            continue
        fit = TailFit(alpha_hat=1.0 / hill_sum, k=k, method="hill", scale_at_k=float(x[k - 1]))
        points.append(TailSeriesPoint(k=k, fit=fit))
    return points


def _qq_estimate(x: np.ndarray, k: int) -> TailFit:
    n = x.size
    if not 2 <= k <= n - 1:
        raise KTooLargeError(f"qq needs 2 <= k <= n-1, got k={k}, n={n}")
    if x[k - 1] <= 0.0:
        raise NonPositiveDataError("top k order statistics must be > 0")
    # Least squares through (-log(i/(k+1)), log X_(i)), i = 1..k.
    i = np.arange(1, k + 1, dtype=np.float64)
    qx = -np.log(i / (k + 1))
    qy = np.log(x[:k])
    slope = float(np.polyfit(qx, qy, 1)[0])
    if slope <= 1e-12:
        raise DegenerateDataError(f"qq slope {slope} is not positive")
    return TailFit(alpha_hat=1.0 / slope, k=k, method="qq", scale_at_k=float(x[k - 1]))


def _pickands_estimate(x: np.ndarray, k: int) -> TailFit:
    n = x.size
    if k < 1 or 4 * k > n:
        raise KTooLargeError(f"pickands needs 4k <= n, got k={k}, n={n}")
    a, b, c = x[k - 1], x[2 * k - 1], x[4 * k - 1]
    if b - c <= 0.0 or a - b <= 0.0:
        raise DegenerateDataError("pickands spacings collapsed")
    ratio = (a - b) / (b - c)
    if ratio == 1.0:
        raise DegenerateDataError("pickands log-ratio is zero")
    return TailFit(alpha_hat=float(np.log(2.0) / np.log(ratio)), k=k, method="pickands", scale_at_k=float(a))


def alt_tail_estimate(data: Iterable[float], k: int, method: str) -> TailFit:
    """QQ (regression) or Pickands (spacings) tail-index estimate."""
    x = _descending(data)
    if method == "qq":
        return _qq_estimate(x, k)
    if method == "pickands":
        return _pickands_estimate(x, k)
    raise ValueError(f"method must be 'qq' or 'pickands', got {method!r}")


def intermediate_scale(data: Iterable[float], k: int) -> float:
    """The k-th largest data value (1-based k)."""
    x = _descending(data)
    if not 1 <= k <= x.size:
        raise KTooLargeError(f"need 1 <= k <= n, got k={k}, n={x.size}")
    return float(x[k - 1])
