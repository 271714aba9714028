"""Wavelet median regression: bin, take medians, transform, shrink, bias-correct."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from numpy.typing import ArrayLike, NDArray

from . import binning, dwt
from .shrinkage import Rule, ShrinkageConfig, blockjs_shrink, visushrink

__all__ = ["EstimatorConfig", "FitResult", "fit", "pointwise_at", "default_j0"]

_NULL_DETAIL_TOL = 1e-12


def default_j0(filter_name: str, J: int) -> int:
    filt = dwt.get_filter(filter_name)
    return min(max(math.ceil(math.log2(filt.support_length)), 4), J - 1)


@dataclass(frozen=True)
class EstimatorConfig:
    gamma: float = 0.75
    filter: str = "S8"
    j0: int | None = None
    shrinkage: ShrinkageConfig = field(default_factory=ShrinkageConfig)
    bias_correction: bool = True

    def __post_init__(self):
        object.__setattr__(self, "filter", dwt.get_filter(self.filter).name)

    def resolve_j0(self, J: int) -> int:
        j0 = default_j0(self.filter, J) if self.j0 is None else int(self.j0)
        if not 0 <= j0 < J:
            raise ValueError(f"j0={j0} must satisfy 0 <= j0 < J={J}")
        return j0


@dataclass
class FitResult:
    grid: NDArray[np.float64]
    estimate: NDArray[np.float64]
    bias_hat: float
    h_inv_sq_hat: float
    pyramid_before: dwt.CoefficientPyramid
    pyramid_after: dwt.CoefficientPyramid
    medians: NDArray[np.float64] = field(repr=False)

    @property
    def T(self) -> int:
        return self.grid.size


def fit(y: ArrayLike, cfg: EstimatorConfig | None = None) -> FitResult:
    """Estimate ``f`` on the grid ``j/T`` from observations ``y_i`` at ``x_i = i/n``.

    Raises ``binning.DegenerateDataError`` when the medians carry no noise
    information (the shrinkage threshold would vanish).
    """
    cfg = cfg or EstimatorConfig()
    y = np.asarray(y, dtype=np.float64)
    if y.ndim != 1:
        raise ValueError("y must be one-dimensional")
    if not np.all(np.isfinite(y)):
        raise ValueError("observations must be finite")
    plan = binning.make_plan(y.size, cfg.gamma)
    j0 = cfg.resolve_j0(plan.J)
    binned = binning.bin_and_median(y, plan)
    T, n = plan.T, plan.n
    root_T = math.sqrt(T)
    before = dwt.forward(binned.medians, cfg.filter, j0).scaled(1.0 / root_T)
    try:
        h_inv_sq = binning.estimate_h_inv_sq(binned.medians, plan)
    except binning.DegenerateDataError:
        # with no detail content there is nothing to threshold; otherwise re-raise
        scale = max(1.0, float(np.max(np.abs(binned.medians))))
        if np.max(np.abs(before.all_details())) > _NULL_DETAIL_TOL * scale:
            raise
        h_inv_sq = 0.0

    if h_inv_sq == 0.0:
        after = before.map_details(lambda _j, d: d)
    else:
        sigma2 = h_inv_sq / (4.0 * n)
        shrink = replace(cfg.shrinkage, noise_variance=sigma2)
        if shrink.rule is Rule.BLOCKJS:
            after = blockjs_shrink(before, shrink, n)
        else:
            after = visushrink(before, math.sqrt(sigma2), n)
    g_hat = root_T * dwt.inverse(after, cfg.filter)

    bias_hat = binned.bias_hat
    estimate = g_hat - bias_hat if cfg.bias_correction else g_hat
    grid = np.arange(1, T + 1) / T
    return FitResult(grid, estimate, bias_hat, h_inv_sq, before, after, binned.medians)


def pointwise_at(result: FitResult, t0: float) -> float:
    """Estimate at the grid point nearest ``t0``; ties go to the lower index."""
    if not 0 < t0 < 1:
        raise ValueError(f"t0 must lie in (0, 1), got {t0}")
    # grid[i] = (i + 1) / T; t0 * T is exact for dyadic T
    nearest = math.ceil(t0 * result.T - 0.5)
    index = min(max(nearest, 1), result.T) - 1
    return float(result.estimate[index])
