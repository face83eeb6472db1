"""Toeplitz hashing over GF(2).

An ``l x n`` Toeplitz matrix is fixed by ``n + l - 1`` seed bits via
``T[i][j] = bits[i - j + n - 1]``. Bit vectors are 0/1 ``uint8`` arrays;
when a vector is packed into an integer, element 0 is the most significant
bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import ResourceError, ValidationError

MAX_EXHAUSTIVE_INPUT_LEN = 12


def _as_bits(x, name="bits") -> np.ndarray:
    arr = np.asarray(x, dtype=np.uint8).ravel()
    if arr.size and arr.max() > 1:
        raise ValidationError(f"{name} must contain only 0/1")
    return arr


def bits_to_int(bits) -> int:
    value = 0
    for b in np.asarray(bits).ravel():
        value = (value << 1) | int(b)
    return value


def int_to_bits(value: int, width: int) -> np.ndarray:
    return np.array([(value >> (width - 1 - k)) & 1 for k in range(width)], dtype=np.uint8)


@dataclass(frozen=True)
class HashFamilyDescriptor:
    input_len: int
    output_len: int

    def __post_init__(self):
        if not 1 <= self.output_len <= self.input_len:
            raise ValidationError("need 1 <= output_len <= input_len")

    @property
    def seed_len(self) -> int:
        return self.input_len + self.output_len - 1

    @property
    def family_size(self) -> int:
        return 1 << self.seed_len

    @property
    def delta(self) -> float:
        return 2.0 ** -self.output_len


@dataclass(frozen=True, eq=False)
class ToeplitzSeed:
    bits: np.ndarray
    input_len: int
    output_len: int

    def __post_init__(self):
        bits = _as_bits(self.bits)
        object.__setattr__(self, "bits", bits)
        if not 1 <= self.output_len <= self.input_len:
            raise ValidationError("need 1 <= output_len <= input_len")
        if bits.size != self.input_len + self.output_len - 1:
            raise ValidationError(
                f"seed needs {self.input_len + self.output_len - 1} bits, got {bits.size}"
            )

    @classmethod
    def from_int(cls, value: int, input_len: int, output_len: int) -> "ToeplitzSeed":
        return cls(int_to_bits(value, input_len + output_len - 1), input_len, output_len)

    @classmethod
    def random(cls, input_len: int, output_len: int, rng: np.random.Generator) -> "ToeplitzSeed":
        return cls(rng.integers(0, 2, input_len + output_len - 1, dtype=np.uint8),
                   input_len, output_len)

    @property
    def family(self) -> HashFamilyDescriptor:
        return HashFamilyDescriptor(self.input_len, self.output_len)

    def matrix(self) -> np.ndarray:
        """The explicit ``output_len x input_len`` matrix."""
        n, l = self.input_len, self.output_len
        i = np.arange(l)[:, None]
        j = np.arange(n)[None, :]
        return self.bits[i - j + n - 1]

    def __eq__(self, other):
        if not isinstance(other, ToeplitzSeed):
            return NotImplemented
        return (self.input_len, self.output_len) == (other.input_len, other.output_len) \
            and np.array_equal(self.bits, other.bits)

    def __hash__(self):
        return hash((self.input_len, self.output_len, self.bits.tobytes()))


def toeplitz_hash(seed: ToeplitzSeed, x) -> np.ndarray:
    """Compute ``T @ x mod 2``.

    Row ``i`` of ``T @ x`` is entry ``i + n - 1`` of the full convolution of
    the seed bits with ``x``, so the matrix is never materialized.
    """
    x = _as_bits(x, "input")
    n = seed.input_len
    if x.size != n:
        raise ValidationError(f"input has {x.size} bits, seed expects {n}")
    conv = np.convolve(seed.bits.astype(np.int64), x.astype(np.int64))
    return (conv[n - 1 : n - 1 + seed.output_len] & 1).astype(np.uint8)


def privacy_amplify(corrected_key, seed: ToeplitzSeed) -> np.ndarray:
    """Compress an error-corrected key to ``seed.output_len`` bits."""
    key = _as_bits(corrected_key, "corrected_key")
    if key.size != seed.input_len:
        raise ValidationError(
            f"key has {key.size} bits but seed is for {seed.input_len}-bit inputs"
        )
    return toeplitz_hash(seed, key)


def enumerate_seeds(n: int, l: int) -> Iterator[ToeplitzSeed]:
    """Every seed of the ``n -> l`` family, in increasing integer order."""
    fam = HashFamilyDescriptor(n, l)
    for value in range(fam.family_size):
        yield ToeplitzSeed.from_int(value, n, l)


def hash_table(n: int, l: int) -> np.ndarray:
    """Outputs of every seed on every input.

    Returns an int array of shape ``(2**(n+l-1), 2**n)`` whose entry
    ``[s, x]`` is the packed output of seed ``s`` on input ``x``.
    """
    fam = HashFamilyDescriptor(n, l)
    alpha = fam.seed_len
    seeds = np.arange(fam.family_size, dtype=np.int64)
    seed_bits = (seeds[:, None] >> (alpha - 1 - np.arange(alpha))) & 1  # (S, alpha)
    i = np.arange(l)[:, None]
    j = np.arange(n)[None, :]
    mats = seed_bits[:, i - j + n - 1]  # (S, l, n)
    xs = np.arange(1 << n, dtype=np.int64)
    x_bits = (xs[:, None] >> (n - 1 - np.arange(n))) & 1  # (X, n)
    out = np.einsum("sln,xn->slx", mats, x_bits) & 1  # (S, l, X)
    weights = 1 << (l - 1 - np.arange(l))
    return np.einsum("slx,l->sx", out, weights)


def collision_probability_exhaustive(n: int, l: int, x, x2) -> float:
    """Fraction of all ``2**(n+l-1)`` seeds under which ``x`` and ``x2`` collide.

    ``f(x) == f(x2)`` iff ``T @ (x ^ x2) == 0``; row ``i`` of that product is
    the parity of the seed bits selected by a mask built from the difference.
    """
    if n > MAX_EXHAUSTIVE_INPUT_LEN:
        raise ResourceError(f"exhaustive enumeration limited to n <= {MAX_EXHAUSTIVE_INPUT_LEN}")
    fam = HashFamilyDescriptor(n, l)
    x, x2 = _as_bits(x, "x"), _as_bits(x2, "x2")
    if x.size != n or x2.size != n:
        raise ValidationError(f"inputs must have {n} bits")
    d = x ^ x2
    if not d.any():
        raise ValidationError("x and x2 must differ")
    alpha = fam.seed_len
    seeds = np.arange(fam.family_size, dtype=np.uint32)
    collide = np.ones(seeds.size, dtype=bool)
    for i in range(l):
        mask = 0
        for j in np.flatnonzero(d):
            k = i - int(j) + n - 1  # seed bit index; bit k sits at position alpha-1-k
            mask |= 1 << (alpha - 1 - k)
        collide &= (np.bitwise_count(seeds & np.uint32(mask)) & 1) == 0
    return int(collide.sum()) / fam.family_size
