"""Quantile coupling diagnostics for sample medians.

The exact law of the median of ``m = 2k + 1`` draws with CDF ``H`` is
``G(x) = I_{H(x)}(k + 1, k + 1)`` (regularized incomplete beta).  The
coupling map sends a standard normal ``z`` to ``G^{-1}(Phi(z))``, which has
the same law as the sample median; the helpers here measure how far the
rescaled map sits from ``z``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import special

from .noise import NoiseModel

__all__ = [
    "MedianLaw",
    "CouplingReport",
    "BiasCheck",
    "ModerateDeviationReport",
    "ConvergenceError",
    "median_cdf",
    "median_sf",
    "median_density",
    "coupling_map",
    "verify_coupling_bound",
    "sample_medians",
    "bias_expansion_check",
    "moderate_deviation_check",
]


class ConvergenceError(RuntimeError):
    """Bisection for the median quantile did not reach its tolerance."""


@dataclass(frozen=True)
class MedianLaw:
    """Law of the median of ``m`` i.i.d. draws from ``model`` (``m`` odd).

    ``m = 1`` is allowed and reduces to the model itself.
    """

    model: NoiseModel
    m: int

    def __post_init__(self):
        if self.m < 1 or self.m % 2 == 0:
            raise ValueError(f"median law needs odd m >= 1, got {self.m}")

    @property
    def k(self) -> int:
        return (self.m - 1) // 2


def median_cdf(law: MedianLaw, x: ArrayLike) -> NDArray[np.float64]:
    a = law.k + 1
    return special.betainc(a, a, law.model.cdf(x))


def median_sf(law: MedianLaw, x: ArrayLike) -> NDArray[np.float64]:
    """``1 - G(x)``, accurate in the upper tail (Beta(a, a) is symmetric)."""
    a = law.k + 1
    return special.betainc(a, a, law.model.sf(x))


def median_density(law: MedianLaw, x: ArrayLike) -> NDArray[np.float64]:
    """``(2k+1)! / (k!)^2 * H^k (1-H)^k h`` evaluated in log space."""
    k = law.k
    H = np.asarray(law.model.cdf(x), dtype=float)
    S = np.asarray(law.model.sf(x), dtype=float)
    h = np.asarray(law.model.density(x), dtype=float)
    log_c = special.gammaln(2 * k + 2) - 2 * special.gammaln(k + 1)
    with np.errstate(divide="ignore"):
        log_g = log_c + k * (np.log(H) + np.log(S)) + np.log(h)
    return np.exp(log_g)


def coupling_map(
    law: MedianLaw,
    z: ArrayLike,
    tol: float = 1e-12,
    max_iter: int = 400,
) -> NDArray[np.float64] | float:
    """``G^{-1}(Phi(z))`` by bracketed bisection on the median CDF.

    Negative ``z`` is solved on the CDF scale and positive ``z`` on the
    survival scale so that both tails keep full relative precision.
    Brackets start at the model quantile of the same probability and are
    widened geometrically if needed.
    """
    z_arr = np.asarray(z, dtype=np.float64)
    scalar = z_arr.ndim == 0
    z_arr = np.atleast_1d(z_arr)
    if not np.all(np.isfinite(z_arr)):
        raise ValueError("z must be finite")

    # reflect: solve for |z| on the lower-tail side
    target = special.ndtr(-np.abs(z_arr))
    upper = z_arr > 0

    def tail(x):
        return np.where(upper, median_sf(law, x), median_cdf(law, x))

    # G(0) = 1/2 for every median-zero law, so 0 is always one bracket end
    inner = np.zeros_like(z_arr)
    outer = np.where(upper, law.model.quantile(1.0 - target), law.model.quantile(target))
    outer = np.where(np.isfinite(outer), outer, np.sign(z_arr) * 1e300)
    outer = np.where(z_arr == 0, 0.0, outer)
    for _ in range(200):
        bad = tail(outer) > target
        bad &= z_arr != 0
        if not bad.any():
            break
        outer = np.where(bad, 2.0 * outer + np.sign(z_arr), outer)
    else:
        raise ConvergenceError("could not bracket the median quantile")

    done = z_arr == 0
    x = np.where(done, 0.0, 0.5 * (inner + outer))
    for _ in range(max_iter):
        mid = 0.5 * (inner + outer)
        stalled = (mid == inner) | (mid == outer)
        val = tail(mid)
        # tail() decreases as |x| grows on each side
        too_central = val > target
        inner = np.where(too_central & ~done, mid, inner)
        outer = np.where(~too_central & ~done, mid, outer)
        x = np.where(done, x, mid)
        converged = np.abs(val - target) <= tol * target / 0.5
        done = done | converged | stalled
        if done.all():
            break
    else:
        raise ConvergenceError(f"bisection did not converge in {max_iter} iterations")
    residual = np.abs(tail(x) - target)
    if np.any(residual > max(tol, 1e-12) * 100):
        raise ConvergenceError(f"bisection residual {residual.max():.3g} exceeds tolerance")
    return float(x[0]) if scalar else x


@dataclass
class CouplingReport:
    m: int
    z_grid: NDArray[np.float64]
    deviations: NDArray[np.float64]
    normalized_sup: float
    epsilon_used: float
    # sharper weighting relevant when h'(0) = 0: deviation * m / (1 + |z|^3)
    symmetric_sup: float

    def rows(self):
        budget = (1.0 + self.z_grid**2) / math.sqrt(self.m)
        return zip(np.full(self.z_grid.size, self.m), self.z_grid, self.deviations, budget)


def verify_coupling_bound(
    law: MedianLaw,
    epsilon: float = 0.25,
    grid_size: int = 401,
    z_cap: float = 2.0,
) -> CouplingReport:
    """Empirical constant in ``|sqrt(4m) h(0) X(z) - z| <= C (1 + z^2) / sqrt(m)``.

    The grid is symmetric on ``|z| <= min(epsilon sqrt(m), z_cap)``.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if grid_size < 2:
        raise ValueError("grid_size must be at least 2")
    m = law.m
    half = min(epsilon * math.sqrt(m), z_cap)
    z = np.linspace(-half, half, grid_size)
    x = coupling_map(law, z)
    dev = np.abs(math.sqrt(4.0 * m) * law.model.h0 * x - z)
    normalized = dev * math.sqrt(m) / (1.0 + z**2)
    symmetric = dev * m / (1.0 + np.abs(z) ** 3)
    return CouplingReport(m, z, dev, float(normalized.max()), half / math.sqrt(m), float(symmetric.max()))


def sample_medians(
    model: NoiseModel, m: int, replications: int, rng: np.random.Generator, chunk: int = 20_000
) -> NDArray[np.float64]:
    """Medians of ``replications`` independent samples of size ``m`` (odd)."""
    if m % 2 == 0:
        raise ValueError("sample_medians expects odd m")
    k = (m - 1) // 2
    out = np.empty(replications)
    for start in range(0, replications, chunk):
        rows = min(chunk, replications - start)
        draws = model.sample(rng, (rows, m))
        out[start : start + rows] = np.partition(draws, k, axis=1)[:, k]
    return out


@dataclass(frozen=True)
class BiasCheck:
    mc_mean: float
    mc_se: float
    predicted: float

    @property
    def error(self) -> float:
        return abs(self.mc_mean - self.predicted)


def predicted_bias(model: NoiseModel, m: int) -> float:
    """Leading term ``-h'(0) / (8 h(0)^3 m)`` of the expected median."""
    return -model.h0_prime / (8.0 * model.h0**3 * m)


def bias_expansion_check(
    model: NoiseModel,
    m: int,
    replications: int,
    rng: np.random.Generator,
    chunk: int = 20_000,
    workers: int = 1,
) -> BiasCheck:
    """Monte Carlo mean of sample medians against the leading bias term.

    Each chunk draws from its own child stream spawned from ``rng``, so the
    result does not depend on ``workers``.
    """
    if m % 2 == 0:
        raise ValueError("bias_expansion_check expects odd m")
    sizes = [min(chunk, replications - s) for s in range(0, replications, chunk)]
    streams = rng.spawn(len(sizes))

    def run(args):
        size, stream = args
        med = sample_medians(model, m, size, stream, chunk=size)
        return float(med.sum()), float(np.dot(med, med))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, zip(sizes, streams)))
    else:
        parts = [run(a) for a in zip(sizes, streams)]
    total = sum(p[0] for p in parts)
    total_sq = sum(p[1] for p in parts)
    mean = total / replications
    var = (total_sq - replications * mean * mean) / (replications - 1)
    return BiasCheck(mean, math.sqrt(max(var, 0.0) / replications), predicted_bias(model, m))


@dataclass
class ModerateDeviationReport:
    """Log-ratios on a grid ``u`` of normalized (``h(0) = 1``) abscissae."""

    m: int
    u: NDArray[np.float64]
    x: NDArray[np.float64]
    log_ratio: NDArray[np.float64]
    budget: NDArray[np.float64]

    @property
    def ratio(self) -> NDArray[np.float64]:
        return np.abs(self.log_ratio) / self.budget

    def rows(self):
        return zip(np.full(self.u.size, self.m), self.u, self.log_ratio, self.budget)


def moderate_deviation_check(law: MedianLaw, u_grid: ArrayLike) -> ModerateDeviationReport:
    """``log(G(u / h(0)) / Phi(sqrt(8k) u))`` on a grid of nonpositive ``u``.

    ``u`` is measured in units where the noise density at zero is one, so
    the median CDF is evaluated at ``x = u / h(0)``.  ``budget`` is
    ``k|u|^3 + |u| + k^{-1/2}``.
    """
    u = np.asarray(u_grid, dtype=np.float64)
    if np.any(u > 0):
        raise ValueError("moderate deviation grid must be nonpositive")
    if law.k < 1:
        raise ValueError("moderate deviation check needs m >= 3")
    k = law.k
    x = u / law.model.h0
    log_normal = special.log_ndtr(math.sqrt(8.0 * k) * u)
    with np.errstate(divide="ignore"):
        log_g = np.log(median_cdf(law, x))
    if np.any(~np.isfinite(log_g)) or np.any(~np.isfinite(log_normal)):
        raise ValueError("median CDF underflows on this grid; cap the grid")
    budget = k * np.abs(u) ** 3 + np.abs(u) + k**-0.5
    return ModerateDeviationReport(law.m, u, x, log_g - log_normal, budget)
