"""Periodized orthonormal discrete wavelet transform.

Coefficients are stored level by level in a :class:`CoefficientPyramid`
(gross scaling coefficients at ``j0`` plus detail levels ``j0 .. J-1``).
Every level uses circular convolution followed by keeping the even-indexed
outputs; the inverse is the exact adjoint of that operator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike, NDArray

__all__ = [
    "WaveletFilter",
    "CoefficientPyramid",
    "BesovSpec",
    "get_filter",
    "FILTER_NAMES",
    "forward",
    "inverse",
    "besov_seq_norm",
]

_SQRT_HALF = math.sqrt(0.5)

# Low-pass (scaling) taps from the standard published tables.  The S8 values
# are re-solved to double precision from the orthonormality and
# vanishing-moment equations; the 16-digit table misses the 1e-12 checks.
_TAPS = {
    "Haar": (_SQRT_HALF, _SQRT_HALF),
    "D4": (
        0.48296291314453416,
        0.8365163037378079,
        0.2241438680420134,
        -0.12940952255126037,
    ),
    "D8": (
        0.2303778133088965,
        0.7148465705529157,
        0.6308807679298589,
        -0.027983769416859854,
        -0.18703481171909309,
        0.030841381835560764,
        0.0328830116668852,
        -0.010597401785069032,
    ),
    "S8": (
        0.001889950332767689,
        -0.0003029205147241331,
        -0.014952258337062199,
        0.0038087520138944896,
        0.04913717967373029,
        -0.027219029917103486,
        -0.0519458381078818,
        0.36444189483617895,
        0.777185751699628,
        0.4813596512590534,
        -0.061273359067811076,
        -0.14329423835127267,
        0.007607487324976609,
        0.03169508781152599,
        -0.0005421323318000107,
        -0.0033824159510050028,
    ),
}

FILTER_NAMES = tuple(_TAPS)


@dataclass(frozen=True)
class WaveletFilter:
    """Quadrature-mirror filter pair of a compactly supported orthonormal wavelet.

    ``support_length`` is the width of the scaling function support,
    i.e. the number of taps minus one.
    """

    name: str
    low_pass: NDArray[np.float64] = field(repr=False)
    high_pass: NDArray[np.float64] = field(repr=False)

    @property
    def support_length(self) -> int:
        return len(self.low_pass) - 1

    @property
    def min_j0(self) -> int:
        """Smallest primary level with ``2**j0 >= support_length``."""
        return max(0, math.ceil(math.log2(self.support_length)))

    def check(self, atol: float = 1e-12) -> None:
        h, g = self.low_pass, self.high_pass
        if abs(h.sum() - math.sqrt(2.0)) > atol:
            raise ValueError(f"{self.name}: low-pass taps do not sum to sqrt(2)")
        if abs(h @ h - 1.0) > atol or abs(g @ g - 1.0) > atol:
            raise ValueError(f"{self.name}: taps are not unit norm")
        if abs(g.sum()) > atol:
            raise ValueError(f"{self.name}: high-pass taps do not sum to zero")


def _quadrature_mirror(h: NDArray[np.float64]) -> NDArray[np.float64]:
    # g[i] = (-1)^i h[L-1-i]
    signs = np.where(np.arange(len(h)) % 2 == 0, 1.0, -1.0)
    return signs * h[::-1]


_FILTERS: dict[str, WaveletFilter] = {}


def get_filter(name: str | WaveletFilter) -> WaveletFilter:
    """Return the named filter (``Haar``, ``D4``, ``D8`` or ``S8``; case-insensitive)."""
    if isinstance(name, WaveletFilter):
        return name
    key = {k.lower(): k for k in _TAPS}.get(str(name).lower())
    if key is None:
        raise ValueError(f"unknown wavelet filter {name!r}; choose from {FILTER_NAMES}")
    if key not in _FILTERS:
        h = np.asarray(_TAPS[key], dtype=np.float64)
        h.setflags(write=False)
        g = _quadrature_mirror(h)
        g.setflags(write=False)
        filt = WaveletFilter(key, h, g)
        filt.check()
        _FILTERS[key] = filt
    return _FILTERS[key]


@dataclass
class CoefficientPyramid:
    """Wavelet coefficients of a length ``2**J`` sequence.

    ``gross`` holds the ``2**j0`` scaling coefficients and ``details[j]``
    the ``2**j`` wavelet coefficients of level ``j`` for ``j0 <= j < J``.
    """

    j0: int
    J: int
    gross: NDArray[np.float64]
    details: dict[int, NDArray[np.float64]]

    def __post_init__(self) -> None:
        self.gross = np.asarray(self.gross, dtype=np.float64)
        self.details = {int(j): np.asarray(d, dtype=np.float64) for j, d in self.details.items()}
        self.validate()

    def validate(self) -> None:
        if not 0 <= self.j0 < self.J:
            raise ValueError(f"need 0 <= j0 < J, got j0={self.j0}, J={self.J}")
        if self.gross.shape != (2**self.j0,):
            raise ValueError(f"gross level must have {2**self.j0} coefficients, got {self.gross.shape}")
        if sorted(self.details) != list(range(self.j0, self.J)):
            raise ValueError(f"detail levels must be exactly {self.j0}..{self.J - 1}")
        for j, d in self.details.items():
            if d.shape != (2**j,):
                raise ValueError(f"detail level {j} must have {2**j} coefficients, got {d.shape}")

    @property
    def size(self) -> int:
        return 2**self.J

    def to_vector(self) -> NDArray[np.float64]:
        """Stack as (gross, level j0, ..., level J-1)."""
        return np.concatenate([self.gross] + [self.details[j] for j in range(self.j0, self.J)])

    @classmethod
    def from_vector(cls, vec: ArrayLike, j0: int) -> "CoefficientPyramid":
        vec = np.asarray(vec, dtype=np.float64)
        J = _dyadic_level(len(vec))
        gross = vec[: 2**j0]
        details = {j: vec[2**j : 2 ** (j + 1)] for j in range(j0, J)}
        return cls(j0, J, gross.copy(), {j: d.copy() for j, d in details.items()})

    def map_details(self, func) -> "CoefficientPyramid":
        """New pyramid with ``func(level, coefficients)`` applied to each detail level."""
        return CoefficientPyramid(
            self.j0,
            self.J,
            self.gross.copy(),
            {j: np.asarray(func(j, d.copy()), dtype=np.float64) for j, d in self.details.items()},
        )

    def scaled(self, c: float) -> "CoefficientPyramid":
        return CoefficientPyramid(
            self.j0, self.J, c * self.gross, {j: c * d for j, d in self.details.items()}
        )

    def all_details(self) -> NDArray[np.float64]:
        return np.concatenate([self.details[j] for j in range(self.j0, self.J)])


def _dyadic_level(size: int) -> int:
    if size < 1 or size & (size - 1):
        raise ValueError(f"length must be a power of two, got {size}")
    return size.bit_length() - 1


def _index_matrix(size: int, taps: int) -> NDArray[np.intp]:
    k = np.arange(size // 2)[:, None]
    i = np.arange(taps)[None, :]
    return (2 * k + i) % size


def _analysis_step(a, filt):
    idx = _index_matrix(len(a), len(filt.low_pass))
    windows = a[idx]
    return windows @ filt.low_pass, windows @ filt.high_pass


def _synthesis_step(approx, detail, filt):
    size = 2 * len(approx)
    idx = _index_matrix(size, len(filt.low_pass))
    contrib = np.outer(approx, filt.low_pass) + np.outer(detail, filt.high_pass)
    out = np.zeros(size)
    np.add.at(out, idx.ravel(), contrib.ravel())
    return out


def forward(data: ArrayLike, filt: str | WaveletFilter, j0: int) -> CoefficientPyramid:
    """Orthonormal periodized DWT of ``data`` down to primary level ``j0``."""
    filt = get_filter(filt)
    a = np.asarray(data, dtype=np.float64)
    if a.ndim != 1:
        raise ValueError("data must be one-dimensional")
    J = _dyadic_level(a.size)
    if not 0 <= j0 < J:
        raise ValueError(f"need 0 <= j0 < J, got j0={j0}, J={J}")
    if 2**j0 < filt.support_length:
        raise ValueError(
            f"j0={j0} too small for {filt.name}: need 2**j0 >= {filt.support_length}"
        )
    details = {}
    for j in range(J - 1, j0 - 1, -1):
        a, details[j] = _analysis_step(a, filt)
    return CoefficientPyramid(j0, J, a, details)


def inverse(coeffs: CoefficientPyramid, filt: str | WaveletFilter) -> NDArray[np.float64]:
    """Reconstruct the length ``2**J`` sequence from its pyramid."""
    filt = get_filter(filt)
    coeffs.validate()
    a = coeffs.gross
    for j in range(coeffs.j0, coeffs.J):
        a = _synthesis_step(a, coeffs.details[j], filt)
    return a


@dataclass(frozen=True)
class BesovSpec:
    alpha: float
    p: float
    q: float
    M: float = 1.0

    def __post_init__(self) -> None:
        if self.alpha <= 0 or self.p < 1 or self.q < 1 or self.M <= 0:
            raise ValueError("need alpha > 0, p >= 1, q >= 1, M > 0")
        if self.s <= 0:
            raise ValueError(f"s = alpha + 1/2 - 1/p must be positive, got {self.s}")

    @property
    def s(self) -> float:
        return self.alpha + 0.5 - 1.0 / self.p

    @property
    def d(self) -> float:
        return min(self.alpha - 1.0 / self.p, 1.0)


def besov_seq_norm(coeffs: CoefficientPyramid, spec: BesovSpec) -> float:
    """Besov sequence norm of a pyramid, truncated at level ``J-1``.

    ``p`` or ``q`` equal to ``inf`` give the usual max-norms.
    """
    coeffs.validate()
    total = float(np.linalg.norm(coeffs.gross, ord=spec.p))
    weighted = np.array(
        [2.0 ** (j * spec.s) * np.linalg.norm(coeffs.details[j], ord=spec.p) for j in range(coeffs.j0, coeffs.J)]
    )
    if math.isinf(spec.q):
        return total + float(weighted.max(initial=0.0))
    return total + float(np.sum(weighted**spec.q) ** (1.0 / spec.q))
