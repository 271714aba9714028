"""Median-zero error laws used for simulation and coupling diagnostics."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import special

__all__ = [
    "NoiseModel",
    "Gaussian",
    "Cauchy",
    "StudentT",
    "ShiftedExponential",
    "Uniform",
    "make_model",
    "parse_model",
    "sample_iid",
    "MODEL_NAMES",
]

_LN2 = math.log(2.0)


class NoiseModel:
    """Base class: a univariate law with median zero.

    Subclasses supply ``density``, ``cdf``, ``quantile``, ``sample`` and the
    local quantities ``h0`` (density at zero) and ``h0_prime``.
    """

    name: str = "noise"
    symmetric: bool = True

    h0: float
    h0_prime: float

    def density(self, x: ArrayLike) -> NDArray[np.float64]:
        raise NotImplementedError

    def cdf(self, x: ArrayLike) -> NDArray[np.float64]:
        raise NotImplementedError

    def sf(self, x: ArrayLike) -> NDArray[np.float64]:
        """Survival function ``1 - cdf``; overridden where a stabler form exists."""
        return 1.0 - self.cdf(x)

    def quantile(self, u: ArrayLike) -> NDArray[np.float64]:
        raise NotImplementedError

    def sample(self, rng: np.random.Generator, size: int | tuple[int, ...]) -> NDArray[np.float64]:
        return self.quantile(rng.random(size))

    def spec_string(self) -> str:
        raise NotImplementedError


def _positive(value: float, what: str) -> float:
    value = float(value)
    if not value > 0 or not math.isfinite(value):
        raise ValueError(f"{what} must be positive and finite, got {value}")
    return value


@dataclass(frozen=True, repr=False)
class Gaussian(NoiseModel):
    sigma: float = 1.0
    name = "gaussian"

    def __post_init__(self):
        _positive(self.sigma, "sigma")

    @property
    def h0(self):
        return 1.0 / (self.sigma * math.sqrt(2.0 * math.pi))

    h0_prime = 0.0

    def density(self, x):
        z = np.asarray(x, dtype=float) / self.sigma
        return np.exp(-0.5 * z * z) / (self.sigma * math.sqrt(2.0 * math.pi))

    def cdf(self, x):
        return special.ndtr(np.asarray(x, dtype=float) / self.sigma)

    def sf(self, x):
        return special.ndtr(-np.asarray(x, dtype=float) / self.sigma)

    def quantile(self, u):
        return self.sigma * special.ndtri(u)

    def sample(self, rng, size):
        return self.sigma * rng.standard_normal(size)

    def spec_string(self):
        return f"gaussian:{self.sigma!r}"

    def __repr__(self):
        return f"Gaussian({self.sigma})"


@dataclass(frozen=True, repr=False)
class Cauchy(NoiseModel):
    scale: float = 1.0
    name = "cauchy"

    def __post_init__(self):
        _positive(self.scale, "scale")

    @property
    def h0(self):
        return 1.0 / (math.pi * self.scale)

    h0_prime = 0.0

    def density(self, x):
        z = np.asarray(x, dtype=float) / self.scale
        return 1.0 / (math.pi * self.scale * (1.0 + z * z))

    def cdf(self, x):
        return 0.5 + np.arctan(np.asarray(x, dtype=float) / self.scale) / math.pi

    def sf(self, x):
        return 0.5 - np.arctan(np.asarray(x, dtype=float) / self.scale) / math.pi

    def quantile(self, u):
        return self.scale * np.tan(math.pi * (np.asarray(u, dtype=float) - 0.5))

    def spec_string(self):
        return f"cauchy:{self.scale!r}"

    def __repr__(self):
        return f"Cauchy({self.scale})"


@dataclass(frozen=True, repr=False)
class StudentT(NoiseModel):
    nu: float = 3.0
    scale: float = 1.0
    name = "studentt"

    def __post_init__(self):
        _positive(self.nu, "nu")
        _positive(self.scale, "scale")

    @property
    def h0(self):
        log_c = (
            math.lgamma((self.nu + 1) / 2)
            - math.lgamma(self.nu / 2)
            - 0.5 * math.log(self.nu * math.pi)
        )
        return math.exp(log_c) / self.scale

    h0_prime = 0.0

    def density(self, x):
        z = np.asarray(x, dtype=float) / self.scale
        return self.h0 * (1.0 + z * z / self.nu) ** (-(self.nu + 1) / 2)

    def cdf(self, x):
        return special.stdtr(self.nu, np.asarray(x, dtype=float) / self.scale)

    def sf(self, x):
        return special.stdtr(self.nu, -np.asarray(x, dtype=float) / self.scale)

    def quantile(self, u):
        return self.scale * special.stdtrit(self.nu, u)

    def sample(self, rng, size):
        z = rng.standard_normal(size)
        chi2 = rng.chisquare(self.nu, size)
        return self.scale * z / np.sqrt(chi2 / self.nu)

    def spec_string(self):
        return f"studentt:{self.nu!r},{self.scale!r}"

    def __repr__(self):
        return f"StudentT({self.nu}, {self.scale})"


@dataclass(frozen=True, repr=False)
class ShiftedExponential(NoiseModel):
    """``E / rate - ln 2 / rate`` with ``E`` standard exponential.

    The only built-in law with ``h'(0) != 0``.
    """

    rate: float = 1.0
    name = "shiftedexp"
    symmetric = False

    def __post_init__(self):
        _positive(self.rate, "rate")

    @property
    def h0(self):
        return self.rate / 2.0

    @property
    def h0_prime(self):
        return -self.rate**2 / 2.0

    @property
    def lower(self):
        return -_LN2 / self.rate

    def density(self, x):
        x = np.asarray(x, dtype=float)
        inside = x >= self.lower
        return np.where(inside, 0.5 * self.rate * np.exp(-self.rate * np.where(inside, x, 0.0)), 0.0)

    def sf(self, x):
        x = np.asarray(x, dtype=float)
        return 0.5 * np.exp(-self.rate * np.maximum(x, self.lower))

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        inside = x >= self.lower
        return np.where(inside, -np.expm1(-self.rate * np.where(inside, x, self.lower) - _LN2), 0.0)

    def quantile(self, u):
        return -np.log1p(-np.asarray(u, dtype=float)) / self.rate + self.lower

    def spec_string(self):
        return f"shiftedexp:{self.rate!r}"

    def __repr__(self):
        return f"ShiftedExponential({self.rate})"


@dataclass(frozen=True, repr=False)
class Uniform(NoiseModel):
    half_width: float = 0.5
    name = "uniform"

    def __post_init__(self):
        _positive(self.half_width, "half_width")

    @property
    def h0(self):
        return 0.5 / self.half_width

    h0_prime = 0.0

    def density(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(np.abs(x) <= self.half_width, self.h0, 0.0)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.clip(0.5 + 0.5 * x / self.half_width, 0.0, 1.0)

    def sf(self, x):
        x = np.asarray(x, dtype=float)
        return np.clip(0.5 - 0.5 * x / self.half_width, 0.0, 1.0)

    def quantile(self, u):
        return self.half_width * (2.0 * np.asarray(u, dtype=float) - 1.0)

    def spec_string(self):
        return f"uniform:{self.half_width!r}"

    def __repr__(self):
        return f"Uniform({self.half_width})"


_REGISTRY = {
    "gaussian": Gaussian,
    "normal": Gaussian,
    "cauchy": Cauchy,
    "studentt": StudentT,
    "student_t": StudentT,
    "t": StudentT,
    "shiftedexp": ShiftedExponential,
    "shiftedexponential": ShiftedExponential,
    "shifted_exponential": ShiftedExponential,
    "uniform": Uniform,
}

MODEL_NAMES = ("gaussian", "cauchy", "studentt", "shiftedexp", "uniform")


def make_model(name: str, *params: float) -> NoiseModel:
    """Instantiate a built-in model, e.g. ``make_model("studentt", 3, 1.0)``."""
    cls = _REGISTRY.get(name.strip().lower())
    if cls is None:
        raise ValueError(f"unknown noise model {name!r}; choose from {MODEL_NAMES}")
    return cls(*(float(p) for p in params))


def parse_model(text: str) -> NoiseModel:
    """Parse ``"name[:p1[,p2]]"``, e.g. ``"cauchy:1.0"`` or ``"studentt:3,1"``."""
    name, _, rest = text.partition(":")
    params = [p for p in rest.split(",") if p.strip()] if rest else []
    try:
        values = [float(p) for p in params]
    except ValueError as exc:
        raise ValueError(f"bad noise parameters in {text!r}") from exc
    return make_model(name, *values)


def sample_iid(model: NoiseModel, count: int, rng: np.random.Generator) -> NDArray[np.float64]:
    if count < 0:
        raise ValueError("count must be nonnegative")
    return np.asarray(model.sample(rng, count), dtype=np.float64)
