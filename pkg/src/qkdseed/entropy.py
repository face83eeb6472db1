"""Min-entropy of seed sources.

Exact min-entropy for known distributions, a most-common-value (MCV)
estimator for sampled RNG output, and the conversion from a per-bit
"average min-entropy" figure to the total seed min-entropy of a hash seed.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from statistics import NormalDist
from typing import Sequence

import numpy as np

from .errors import EstimationError, ValidationError

MIN_SAMPLES = 1000
SUPPORTED_SYMBOL_BITS = (1, 8)


@dataclass(frozen=True)
class SymbolDistribution:
    """Probability vector over an alphabet ``0 .. alphabet_size - 1``."""

    alphabet_size: int
    probabilities: tuple[float, ...]

    def __post_init__(self):
        probs = tuple(float(p) for p in self.probabilities)
        object.__setattr__(self, "probabilities", probs)
        if self.alphabet_size < 1:
            raise ValidationError("alphabet_size must be positive")
        if len(probs) != self.alphabet_size:
            raise ValidationError(
                f"got {len(probs)} probabilities for alphabet of size {self.alphabet_size}"
            )
        if any(p < 0 or math.isnan(p) for p in probs):
            raise ValidationError("probabilities must be non-negative")
        total = math.fsum(probs)
        if abs(total - 1.0) > 1e-12:
            raise ValidationError(f"probabilities sum to {total!r}, not 1")

    @classmethod
    def from_probabilities(cls, probabilities: Sequence[float]) -> "SymbolDistribution":
        return cls(len(probabilities), tuple(probabilities))

    @classmethod
    def uniform(cls, alphabet_size: int) -> "SymbolDistribution":
        return cls(alphabet_size, (1.0 / alphabet_size,) * alphabet_size)


@dataclass(frozen=True)
class MinEntropyEstimate:
    """Result of :func:`estimate_min_entropy_mcv`, in bits per symbol."""

    point_estimate: float
    lower_confidence_bound: float
    sample_count: int
    confidence_level: float
    symbol_bits: int = 1

    @property
    def per_bit(self) -> float:
        return self.point_estimate / self.symbol_bits

    @property
    def lower_per_bit(self) -> float:
        return self.lower_confidence_bound / self.symbol_bits


@dataclass(frozen=True)
class SeedQuality:
    """Seed length ``alpha`` and seed min-entropy ``beta``, both in bits."""

    alpha: float
    beta: float

    def __post_init__(self):
        if self.alpha < 0:
            raise ValidationError("alpha must be non-negative")
        if not 0 <= self.beta <= self.alpha:
            raise ValidationError(f"need 0 <= beta <= alpha, got beta={self.beta}, alpha={self.alpha}")

    @property
    def gap(self) -> float:
        return self.alpha - self.beta

    @classmethod
    def uniform(cls, alpha: float) -> "SeedQuality":
        return cls(alpha, alpha)


def min_entropy(dist: SymbolDistribution) -> float:
    """Return ``-log2(max_x P(x))`` in bits."""
    pmax = max(dist.probabilities)
    # exact for the uniform case, where rounding in 1/k could leave a tiny residue
    if all(p == pmax for p in dist.probabilities):
        return math.log2(dist.alphabet_size)
    return -math.log2(pmax)


def count_symbols(samples, symbol_bits: int = 1) -> np.ndarray:
    """Histogram of symbols. Counts from separate chunks can simply be added."""
    _check_symbol_bits(symbol_bits)
    arr = np.asarray(samples)
    k = 1 << symbol_bits
    if arr.size and (arr.min() < 0 or arr.max() >= k):
        raise ValidationError(f"symbols must lie in [0, {k})")
    return np.bincount(arr.ravel().astype(np.int64), minlength=k)


def estimate_from_counts(counts, confidence_level: float = 0.99,
                         symbol_bits: int = 1) -> MinEntropyEstimate:
    """MCV estimate from a symbol histogram (see :func:`estimate_min_entropy_mcv`)."""
    counts = np.asarray(counts, dtype=np.int64)
    n = int(counts.sum())
    if n == 0:
        raise ValidationError("empty sample stream")
    if n < MIN_SAMPLES:
        raise EstimationError(f"need at least {MIN_SAMPLES} samples, got {n}")
    if not 0.5 <= confidence_level < 1:
        raise ValidationError("confidence_level must lie in [0.5, 1)")
    p_hat = int(counts.max()) / n
    z = NormalDist().inv_cdf(confidence_level)
    p_upper = min(1.0, p_hat + z * math.sqrt(p_hat * (1.0 - p_hat) / n))
    point = 0.0 if p_hat == 1.0 else -math.log2(p_hat)
    lower = 0.0 if p_upper == 1.0 else -math.log2(p_upper)
    return MinEntropyEstimate(point, lower, n, confidence_level, symbol_bits)


def estimate_min_entropy_mcv(samples, confidence_level: float = 0.99,
                             symbol_bits: int = 1) -> MinEntropyEstimate:
    """Most-common-value min-entropy estimate of an i.i.d. symbol stream.

    Parameters
    ----------
    samples : array_like of int
        Symbols in ``[0, 2**symbol_bits)``.
    confidence_level : float
        One-sided confidence for the upper bound on the max probability.
    symbol_bits : int
        Width of one symbol, 1 or 8.

    Returns
    -------
    MinEntropyEstimate
        ``point_estimate = -log2(p_hat)`` and the lower bound
        ``-log2(min(1, p_hat + z*sqrt(p_hat*(1-p_hat)/N)))``.
    """
    arr = np.asarray(samples)
    if arr.size == 0:
        raise ValidationError("empty sample stream")
    return estimate_from_counts(count_symbols(arr, symbol_bits), confidence_level, symbol_bits)


def bytes_to_symbols(data: bytes, symbol_bits: int = 1) -> np.ndarray:
    """Split raw bytes into symbols, most significant bit first."""
    _check_symbol_bits(symbol_bits)
    raw = np.frombuffer(data, dtype=np.uint8)
    if symbol_bits == 8:
        return raw
    return np.unpackbits(raw, bitorder="big")


def estimate_file(path: str | os.PathLike, confidence_level: float = 0.99,
                  symbol_bits: int = 1, chunk_size: int = 1 << 22) -> MinEntropyEstimate:
    """Run the MCV estimator over a raw binary file, reading it in chunks."""
    _check_symbol_bits(symbol_bits)
    counts = np.zeros(1 << symbol_bits, dtype=np.int64)
    with open(path, "rb") as fh:
        while chunk := fh.read(chunk_size):
            counts += count_symbols(bytes_to_symbols(chunk, symbol_bits), symbol_bits)
    return estimate_from_counts(counts, confidence_level, symbol_bits)


def seed_quality_from_per_bit(alpha: float, h_avg: float) -> SeedQuality:
    """Total seed min-entropy ``beta = h_avg * alpha`` for an ``alpha``-bit seed.

    Treats the seed bits as independent, each carrying ``h_avg`` bits of
    min-entropy.
    """
    if not 0.0 <= h_avg <= 1.0:
        raise ValidationError(f"h_avg must lie in [0, 1], got {h_avg}")
    if alpha < 1:
        raise ValidationError("alpha must be at least 1")
    beta = alpha if h_avg == 1.0 else h_avg * alpha
    return SeedQuality(alpha, beta)


def _check_symbol_bits(symbol_bits: int) -> None:
    if symbol_bits not in SUPPORTED_SYMBOL_BITS:
        raise ValidationError(f"symbol_bits must be one of {SUPPORTED_SYMBOL_BITS}")
