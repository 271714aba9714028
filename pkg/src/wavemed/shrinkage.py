"""Block James-Stein and VisuShrink thresholding of wavelet pyramids."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .dwt import CoefficientPyramid

__all__ = [
    "LAMBDA_STAR",
    "Rule",
    "BlockLengthRule",
    "ShrinkageConfig",
    "block_length",
    "block_partition",
    "blockjs_factors",
    "blockjs_shrink",
    "soft_threshold",
    "visushrink",
]

# root of  lambda - ln(lambda) = 3
LAMBDA_STAR = 4.50524


class Rule(str, Enum):
    BLOCKJS = "BlockJS"
    VISUSHRINK = "VisuShrink"


class BlockLengthRule(str, Enum):
    DYADIC_LOG_N = "DyadicLogN"
    CEIL_LOG_N = "CeilLogN"


def _enum(cls, value):
    if isinstance(value, cls):
        return value
    for member in cls:
        if str(value).lower() == member.value.lower():
            return member
    raise ValueError(f"unknown {cls.__name__} {value!r}; choose from {[m.value for m in cls]}")


@dataclass(frozen=True)
class ShrinkageConfig:
    """Thresholding parameters.

    ``noise_variance`` is the per-coefficient variance; the estimator fills
    it in from the data when left as ``None``.
    """

    rule: Rule = Rule.BLOCKJS
    lambda_star: float = LAMBDA_STAR
    block_length_rule: BlockLengthRule = BlockLengthRule.DYADIC_LOG_N
    noise_variance: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "rule", _enum(Rule, self.rule))
        object.__setattr__(self, "block_length_rule", _enum(BlockLengthRule, self.block_length_rule))
        if not self.lambda_star > 0:
            raise ValueError("lambda_star must be positive")
        if self.noise_variance is not None and not self.noise_variance > 0:
            raise ValueError(f"noise_variance must be positive, got {self.noise_variance}")


def block_length(n: int, rule: BlockLengthRule | str = BlockLengthRule.DYADIC_LOG_N) -> int:
    """Block length ``L`` for sample size ``n`` (natural logarithm)."""
    rule = _enum(BlockLengthRule, rule)
    log_n = math.log(n)
    if rule is BlockLengthRule.CEIL_LOG_N:
        return max(1, math.ceil(log_n))
    return 2 ** max(0, math.ceil(math.log2(log_n)))


def block_partition(level_size: int, L: int) -> list[range]:
    """Contiguous blocks of length ``L`` covering ``range(level_size)``; the last may be shorter."""
    if L < 1:
        raise ValueError("block length must be at least 1")
    return [range(start, min(start + L, level_size)) for start in range(0, level_size, L)]


def blockjs_factors(y: np.ndarray, L: int, sigma2: float, lambda_star: float = LAMBDA_STAR) -> np.ndarray:
    """Per-coefficient shrinkage factors ``(1 - lambda* L_b sigma^2 / S^2)_+`` for one level."""
    y = np.asarray(y, dtype=np.float64)
    factors = np.empty_like(y)
    for block in block_partition(y.size, L):
        sl = slice(block.start, block.stop)
        s2 = float(np.dot(y[sl], y[sl]))
        if s2 == 0.0:
            factors[sl] = 0.0
        else:
            factors[sl] = max(0.0, 1.0 - lambda_star * len(block) * sigma2 / s2)
    return factors


def blockjs_shrink(coeffs: CoefficientPyramid, cfg: ShrinkageConfig, n: int) -> CoefficientPyramid:
    """Shrink every detail block by a common James-Stein factor; gross level untouched."""
    if cfg.noise_variance is None or not cfg.noise_variance > 0:
        raise ValueError(f"noise_variance must be positive, got {cfg.noise_variance}")
    L = block_length(n, cfg.block_length_rule)
    return coeffs.map_details(
        lambda _j, d: blockjs_factors(d, L, cfg.noise_variance, cfg.lambda_star) * d
    )


def soft_threshold(x: np.ndarray, threshold: float) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    return np.sign(x) * np.maximum(np.abs(x) - threshold, 0.0)


def visushrink(coeffs: CoefficientPyramid, sigma: float, n: int) -> CoefficientPyramid:
    """Soft-threshold detail coefficients at ``sigma * sqrt(2 ln n)``."""
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    lam = sigma * math.sqrt(2.0 * math.log(n))
    return coeffs.map_details(lambda _j, d: soft_threshold(d, lam))
