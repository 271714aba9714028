"""Standard test signals on [0, 1] and dataset generation."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np
from numpy.typing import NDArray

from ..noise import NoiseModel, sample_iid

__all__ = ["SignalSpec", "SIGNAL_NAMES", "evaluate", "generate_dataset", "parse_signal"]

_JUMPS = np.array([0.1, 0.13, 0.15, 0.23, 0.25, 0.40, 0.44, 0.65, 0.76, 0.78, 0.81])
_BLOCK_HEIGHTS = np.array([4, -5, 3, -4, 5, -4.2, 2.1, 4.3, -3.1, 2.1, -4.2])
_BUMP_HEIGHTS = np.array([4, 5, 3, 4, 5, 4.2, 2.1, 4.3, 3.1, 5.1, 4.2])
_BUMP_WIDTHS = np.array([0.005, 0.005, 0.006, 0.01, 0.01, 0.03, 0.01, 0.01, 0.005, 0.008, 0.005])


def _blocks(t):
    return ((1 + np.sign(t[:, None] - _JUMPS)) / 2 * _BLOCK_HEIGHTS).sum(axis=1)


def _bumps(t):
    return (_BUMP_HEIGHTS * (1 + np.abs((t[:, None] - _JUMPS) / _BUMP_WIDTHS)) ** -4).sum(axis=1)


def _heavisine(t):
    return 4 * np.sin(4 * np.pi * t) - np.sign(t - 0.3) - np.sign(0.72 - t)


def _doppler(t):
    eps = 0.05
    return np.sqrt(t * (1 - t)) * np.sin(2 * np.pi * (1 + eps) / (t + eps))


_SHAPES = {"blocks": _blocks, "bumps": _bumps, "heavisine": _heavisine, "doppler": _doppler}
SIGNAL_NAMES = ("blocks", "bumps", "heavisine", "doppler", "constant", "custom")


@lru_cache(maxsize=None)
def _unit_scale(name: str) -> float:
    # standard deviation on a fine reference grid; fixed so signals are n-independent
    t = np.arange(1, 2**16 + 1) / 2**16
    return float(np.std(_SHAPES[name](t)))


@dataclass(frozen=True)
class SignalSpec:
    """A regression function on [0, 1].

    Blocks, Bumps, HeaviSine and Doppler are rescaled to unit standard
    deviation and then multiplied by ``amplitude``.  ``constant`` returns
    ``value * amplitude``; ``custom`` linearly interpolates an ``x,f`` CSV.
    """

    name: str
    amplitude: float = 1.0
    value: float = 0.0
    path: str | None = None

    def __post_init__(self):
        name = self.name.lower()
        if name not in SIGNAL_NAMES:
            raise ValueError(f"unknown signal {self.name!r}; choose from {SIGNAL_NAMES}")
        object.__setattr__(self, "name", name)
        if name == "custom" and not self.path:
            raise ValueError("custom signal needs a path")

    def label(self) -> str:
        if self.name == "constant":
            return f"constant:{self.value!r}"
        if self.name == "custom":
            return f"custom:{self.path}"
        return self.name


def parse_signal(text: str, amplitude: float = 1.0) -> SignalSpec:
    """``"heavisine"``, ``"constant:3"`` or ``"custom:path.csv"``."""
    name, _, arg = text.partition(":")
    name = name.strip().lower()
    if name == "constant":
        return SignalSpec("constant", amplitude, value=float(arg or 0.0))
    if name == "custom":
        return SignalSpec("custom", amplitude, path=arg)
    return SignalSpec(name, amplitude)


@lru_cache(maxsize=16)
def _load_custom(path: str) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    xs, fs = [], []
    with open(Path(path), newline="") as fh:
        reader = csv.DictReader(fh)
        for line, row in enumerate(reader, start=2):
            try:
                xs.append(float(row["x"]))
                fs.append(float(row["f"]))
            except (KeyError, TypeError, ValueError) as exc:
                raise ValueError(f"{path}:{line}: expected numeric columns x,f") from exc
    order = np.argsort(xs)
    return np.asarray(xs)[order], np.asarray(fs)[order]


def evaluate(spec: SignalSpec, t) -> NDArray[np.float64]:
    t = np.asarray(t, dtype=np.float64)
    if spec.name == "constant":
        values = np.full(t.shape, spec.value * spec.amplitude)
    elif spec.name == "custom":
        xs, fs = _load_custom(spec.path)
        values = spec.amplitude * np.interp(t, xs, fs)
    else:
        values = spec.amplitude * _SHAPES[spec.name](t) / _unit_scale(spec.name)
    if not np.all(np.isfinite(values)):
        raise ValueError(f"signal {spec.label()} is not finite on the grid")
    return values


def generate_dataset(spec: SignalSpec, noise: NoiseModel, n: int, rng: np.random.Generator) -> NDArray[np.float64]:
    """``Y_i = f(i/n) + xi_i`` for ``i = 1..n``."""
    if n < 2:
        raise ValueError("need n >= 2")
    t = np.arange(1, n + 1) / n
    return evaluate(spec, t) + sample_iid(noise, n, rng)
