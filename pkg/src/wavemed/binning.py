"""Binning of equispaced observations into local medians."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

__all__ = [
    "BinningPlan",
    "BinnedMedians",
    "DegenerateDataError",
    "make_plan",
    "median_of",
    "bin_and_median",
    "estimate_h_inv_sq",
]


class DegenerateDataError(ValueError):
    """Raised when the noise-scale estimate vanishes (e.g. constant data)."""


@dataclass(frozen=True)
class BinningPlan:
    n: int
    gamma: float
    J: int

    @property
    def T(self) -> int:
        return 2**self.J

    @property
    def base_m(self) -> int:
        return self.n // self.T

    @property
    def remainder(self) -> int:
        return self.n % self.T

    def occupancy(self) -> NDArray[np.intp]:
        occ = np.full(self.T, self.base_m, dtype=np.intp)
        occ[: self.remainder] += 1
        return occ

    def edges(self) -> NDArray[np.intp]:
        """Start offsets of each bin plus the final end offset."""
        return np.concatenate([[0], np.cumsum(self.occupancy())])


def make_plan(n: int, gamma: float = 0.75) -> BinningPlan:
    """``T = 2**floor(log2(n**gamma))`` bins; the first ``n mod T`` hold one extra point."""
    n = int(n)
    gamma = float(gamma)
    if not 0 < gamma < 1:
        raise ValueError(f"gamma must lie in (0, 1), got {gamma}")
    if n < 2:
        raise ValueError(f"need at least 2 observations, got {n}")
    target = gamma * math.log2(n)
    # tolerance keeps exact powers such as (2**16)**0.75 from rounding down
    J = math.floor(target + 1e-9)
    if J < 1:
        raise ValueError(f"n={n} too small: floor(log2 n^gamma) = {J} < 1")
    return BinningPlan(n, gamma, J)


def median_of(values: ArrayLike) -> float:
    """Sample median; even lengths average the two central order statistics."""
    arr = np.asarray(values, dtype=np.float64).ravel()
    if arr.size == 0:
        raise ValueError("median of an empty sequence")
    return float(np.median(arr))


@dataclass
class BinnedMedians:
    plan: BinningPlan
    medians: NDArray[np.float64]
    sub_medians: NDArray[np.float64]

    @property
    def bias_hat(self) -> float:
        return float(np.mean(self.sub_medians - self.medians))


def _grouped_median(y: NDArray[np.float64], plan: BinningPlan, take) -> NDArray[np.float64]:
    # bins of equal size are reshaped and reduced together
    out = np.empty(plan.T)
    r, m = plan.remainder, plan.base_m
    head = y[: r * (m + 1)].reshape(r, m + 1) if r else np.empty((0, m + 1))
    tail = y[r * (m + 1) :].reshape(plan.T - r, m)
    if r:
        out[:r] = np.median(head[:, : take(m + 1)], axis=1)
    out[r:] = np.median(tail[:, : take(m)], axis=1)
    return out


def bin_and_median(y: ArrayLike, plan: BinningPlan) -> BinnedMedians:
    """Bin medians ``X_j`` and first-sub-bin medians ``X*_j`` of ordered data ``y``.

    The first sub-bin of a bin with ``c`` observations holds its first
    ``c // 2`` observations.
    """
    y = np.asarray(y, dtype=np.float64)
    if y.shape != (plan.n,):
        raise ValueError(f"expected {plan.n} observations, got shape {y.shape}")
    if plan.base_m < 2:
        raise ValueError(
            f"bins must hold at least 2 observations (n={plan.n}, T={plan.T}, m={plan.base_m})"
        )
    medians = _grouped_median(y, plan, lambda c: c)
    sub_medians = _grouped_median(y, plan, lambda c: c // 2)
    return BinnedMedians(plan, medians, sub_medians)


def estimate_h_inv_sq(medians: ArrayLike, plan: BinningPlan) -> float:
    """Estimate ``h(0)**-2`` from paired differences of adjacent bin medians.

    Each bin median has variance close to ``1 / (4 m h(0)**2)``, so
    ``(4m/T) * sum_k (X_{2k-1} - X_{2k})**2`` is consistent for ``h(0)**-2``.
    """
    x = np.asarray(medians, dtype=np.float64)
    T = x.size
    if T % 2:
        raise ValueError(f"need an even number of medians, got {T}")
    diffs = x[0::2] - x[1::2]
    value = float(4.0 * plan.base_m / T * np.dot(diffs, diffs))
    if value == 0.0:
        raise DegenerateDataError("noise-scale estimate is exactly zero (constant medians)")
    return value
