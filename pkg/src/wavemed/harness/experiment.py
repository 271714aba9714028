"""Monte Carlo risk experiments and rate-slope regression."""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray
from scipy import stats

from .. import dwt
from ..estimator import EstimatorConfig, fit, pointwise_at
from ..noise import NoiseModel
from ..shrinkage import visushrink
from .signals import SignalSpec, evaluate, generate_dataset

__all__ = [
    "ExperimentSpec",
    "RiskRow",
    "RiskReport",
    "SlopeFit",
    "raw_visushrink",
    "replicate",
    "run_experiment",
    "fit_slope",
    "thread_count",
]

log = logging.getLogger(__name__)

MAD_SCALE = 1.4826


@dataclass(frozen=True)
class ExperimentSpec:
    signal: SignalSpec
    noise: NoiseModel
    n_list: tuple[int, ...]
    replications: int = 50
    estimator: EstimatorConfig = field(default_factory=EstimatorConfig)
    t0: float | None = None
    seed: int = 0
    baseline: str | None = None

    def __post_init__(self):
        n_list = tuple(int(n) for n in self.n_list)
        object.__setattr__(self, "n_list", n_list)
        if not n_list:
            raise ValueError("n_list must not be empty")
        if any(n < 4 or n & (n - 1) for n in n_list):
            raise ValueError(f"n_list entries must be powers of two, got {n_list}")
        if any(b <= a for a, b in zip(n_list, n_list[1:])):
            raise ValueError(f"n_list must be strictly increasing, got {n_list}")
        if self.replications < 1:
            raise ValueError("replications must be at least 1")
        if self.t0 is not None and not 0 < self.t0 < 1:
            raise ValueError("t0 must lie in (0, 1)")
        if self.baseline is not None and self.baseline.lower() != "rawvisushrink":
            raise ValueError(f"unknown baseline {self.baseline!r}; only RawVisuShrink is supported")


@dataclass(frozen=True)
class RiskRow:
    n: int
    global_mse_mean: float
    global_mse_se: float
    pointwise_mse_mean: float
    pointwise_mse_se: float
    baseline_mse: float
    failures: int = 0

    FIELDS = (
        "n",
        "global_mse_mean",
        "global_mse_se",
        "pointwise_mse_mean",
        "pointwise_mse_se",
        "baseline_mse",
        "failures",
    )

    def as_tuple(self):
        return tuple(getattr(self, f) for f in self.FIELDS)


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    intercept: float
    ci: tuple[float, float]


@dataclass
class RiskReport:
    rows: list[RiskRow]
    slope: float
    slope_ci: tuple[float, float]
    pointwise_slope: float = math.nan
    # per-replication squared errors, keyed by n; kept for paired comparisons
    global_errors: dict[int, NDArray[np.float64]] = field(default_factory=dict, repr=False)
    baseline_errors: dict[int, NDArray[np.float64]] = field(default_factory=dict, repr=False)


def thread_count() -> int:
    """Worker threads from ``WAVEMED_THREADS`` (0 or unset means one per CPU)."""
    raw = os.environ.get("WAVEMED_THREADS", "0").strip() or "0"
    try:
        requested = int(raw)
    except ValueError:
        raise ValueError(f"WAVEMED_THREADS must be an integer, got {raw!r}") from None
    if requested < 0:
        raise ValueError("WAVEMED_THREADS must be nonnegative")
    return requested or (os.cpu_count() or 1)


def raw_visushrink(y: NDArray[np.float64], filter_name: str = "S8", j0: int | None = None) -> NDArray[np.float64]:
    """VisuShrink on the raw observations with a MAD noise estimate from the finest level."""
    y = np.asarray(y, dtype=np.float64)
    n = y.size
    J = n.bit_length() - 1
    filt = dwt.get_filter(filter_name)
    if j0 is None:
        j0 = min(max(filt.min_j0, 4), J - 1)
    coeffs = dwt.forward(y, filt, j0)
    sigma = MAD_SCALE * float(np.median(np.abs(coeffs.details[J - 1])))
    return dwt.inverse(visushrink(coeffs, sigma, n), filt)


def _substream(seed: int, n: int, rep: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, n, rep]))


def replicate(spec: ExperimentSpec, n: int, rep: int) -> tuple[float, float, float]:
    """One replication: (global squared error, pointwise squared error, baseline error).

    Undefined entries are ``nan``; an estimator failure yields a ``nan``
    global error.
    """
    rng = _substream(spec.seed, n, rep)
    y = generate_dataset(spec.signal, spec.noise, n, rng)
    try:
        result = fit(y, spec.estimator)
    except (ValueError, ArithmeticError) as exc:
        log.warning("fit failed at n=%d rep=%d: %s", n, rep, exc)
        return math.nan, math.nan, math.nan
    truth = evaluate(spec.signal, result.grid)
    global_err = float(np.mean((result.estimate - truth) ** 2))
    point_err = math.nan
    if spec.t0 is not None:
        point_err = (pointwise_at(result, spec.t0) - float(evaluate(spec.signal, [spec.t0])[0])) ** 2
    base_err = math.nan
    if spec.baseline is not None:
        raw = raw_visushrink(y, spec.estimator.filter)
        idx = np.rint(result.grid * n).astype(int) - 1
        base_err = float(np.mean((raw[idx] - truth) ** 2))
    return global_err, point_err, base_err


def _mean_se(values: NDArray[np.float64]) -> tuple[float, float]:
    values = values[np.isfinite(values)]
    if values.size == 0:
        return math.nan, math.nan
    mean = float(values.mean())
    se = float(values.std(ddof=1) / math.sqrt(values.size)) if values.size > 1 else math.nan
    return mean, se


def fit_slope(n_values, means, ses=None, level: float = 0.95) -> SlopeFit:
    """Least-squares slope of ``log2(mean)`` against ``log2(n)``.

    The interval propagates the Monte Carlo standard errors of the means
    (delta method on the log scale); without them it falls back to the
    regression residuals.
    """
    x = np.log2(np.asarray(n_values, dtype=float))
    means = np.asarray(means, dtype=float)
    if x.size < 2 or np.any(~np.isfinite(means)) or np.any(means <= 0):
        return SlopeFit(math.nan, math.nan, (math.nan, math.nan))
    y = np.log2(means)
    xc = x - x.mean()
    weights = xc / np.dot(xc, xc)
    slope = float(np.dot(weights, y))
    intercept = float(y.mean() - slope * x.mean())
    z = stats.norm.ppf(0.5 + level / 2)
    if ses is not None and np.all(np.isfinite(ses)):
        se_log = np.asarray(ses, dtype=float) / (means * math.log(2.0))
        half = z * math.sqrt(float(np.dot(weights**2, se_log**2)))
    elif x.size > 2:
        resid = y - (intercept + slope * x)
        s2 = float(np.dot(resid, resid)) / (x.size - 2)
        half = stats.t.ppf(0.5 + level / 2, x.size - 2) * math.sqrt(s2 / np.dot(xc, xc))
    else:
        half = math.nan
    return SlopeFit(slope, intercept, (float(slope - half), float(slope + half)))


def run_experiment(spec: ExperimentSpec, workers: int | None = None) -> RiskReport:
    """Simulate, fit and score every (n, replication) pair.

    Replication ``r`` at sample size ``n`` always draws from the stream
    keyed by ``(seed, n, r)`` and results are gathered in that order, so
    the report does not depend on ``workers``.
    """
    workers = thread_count() if workers is None else max(1, int(workers))
    tasks = [(n, r) for n in spec.n_list for r in range(spec.replications)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda task: replicate(spec, *task), tasks))
    else:
        results = [replicate(spec, *task) for task in tasks]
    table = np.asarray(results, dtype=float).reshape(len(spec.n_list), spec.replications, 3)

    rows = []
    report = RiskReport([], math.nan, (math.nan, math.nan))
    for i, n in enumerate(spec.n_list):
        g, p, b = table[i, :, 0], table[i, :, 1], table[i, :, 2]
        g_mean, g_se = _mean_se(g)
        p_mean, p_se = _mean_se(p)
        b_mean, _ = _mean_se(b)
        failures = int(np.count_nonzero(~np.isfinite(g)))
        rows.append(RiskRow(n, g_mean, g_se, p_mean, p_se, b_mean, failures))
        report.global_errors[n] = g
        report.baseline_errors[n] = b
    report.rows = rows
    fitted = fit_slope(
        [r.n for r in rows],
        [r.global_mse_mean for r in rows],
        [r.global_mse_se for r in rows] if spec.replications > 1 else None,
    )
    report.slope, report.slope_ci = fitted.slope, fitted.ci
    if spec.t0 is not None:
        report.pointwise_slope = fit_slope([r.n for r in rows], [r.pointwise_mse_mean for r in rows]).slope
    return report
