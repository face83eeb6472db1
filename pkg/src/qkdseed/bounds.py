"""Leftover-hash security bounds with a non-uniform hash seed.

``gap = alpha - beta`` is how far the seed falls short of uniform. The
distance-to-ideal bounds are clamped to 1 by default; pass ``clamp=False``
for the raw formula value.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from .entropy import SeedQuality
from .errors import ParameterError, ValidationError

DEFAULT_EPS_SEC = 1e-9
DEFAULT_EPS_COR = 1e-15
EQUAL_TOL = 1e-12


@dataclass(frozen=True)
class SecurityParams:
    eps_sec: float = DEFAULT_EPS_SEC
    eps_cor: float = DEFAULT_EPS_COR
    eps_smooth: float | None = None  # defaults to eps_sec / 10

    def __post_init__(self):
        if self.eps_smooth is None:
            object.__setattr__(self, "eps_smooth", self.eps_sec / 10)
        if not 0 <= self.eps_smooth < self.eps_sec <= 1:
            raise ParameterError(
                f"need 0 <= eps_smooth < eps_sec <= 1, got eps_smooth={self.eps_smooth}, "
                f"eps_sec={self.eps_sec}"
            )
        if not 0 < self.eps_cor <= 1:
            raise ParameterError(f"need 0 < eps_cor <= 1, got {self.eps_cor}")

    @property
    def eps_total(self) -> float:
        return epsilon_secure(self.eps_sec, self.eps_cor)


@dataclass(frozen=True)
class BoundInputs:
    hmin: float
    key_len: float
    seed: SeedQuality = field(default_factory=lambda: SeedQuality(0, 0))
    eps_smooth: float = 0.0

    def __post_init__(self):
        if self.key_len < 0:
            raise ValidationError("key_len must be non-negative")
        if self.eps_smooth < 0:
            raise ValidationError("eps_smooth must be non-negative")
        if math.isnan(self.hmin):
            raise ValidationError("hmin is NaN")


class Tighter(enum.Enum):
    THEOREM1 = "Theorem1"
    ALTERNATIVE = "Alternative"
    EQUAL = "Equal"


@dataclass(frozen=True)
class BoundComparison:
    theorem1_value: float
    alternative_value: float
    theorem1_raw: float
    alternative_raw: float
    tighter: Tighter
    theorem1_tighter_predicate: bool


@dataclass(frozen=True)
class KeyLengthBudget:
    hmin: float
    leak_ec: float
    security: SecurityParams
    seed: SeedQuality
    pa_cost: float
    ec_verification_cost: float
    unclamped: float
    max_key_len: int


def _exp2(x: float) -> float:
    try:
        return 2.0 ** x
    except OverflowError:
        return math.inf


def theorem1_bound(inp: BoundInputs, clamp: bool = True) -> float:
    """``(1/2) * 2**gap * 2**(-(hmin - l)/2) + eps``."""
    raw = 0.5 * _exp2(inp.seed.gap - 0.5 * (inp.hmin - inp.key_len)) + inp.eps_smooth
    return min(1.0, raw) if clamp else raw


def alternative_bound(inp: BoundInputs, clamp: bool = True) -> float:
    """``(1/2) * sqrt(2**(l - hmin) + 2**gap - 1) + eps``.

    Looser than :func:`theorem1_bound` except at ``gap = 0``, where the two
    coincide.
    """
    # expm1 keeps 2**gap - 1 exact at gap == 0
    seed_term = math.expm1(inp.seed.gap * math.log(2)) if inp.seed.gap < 1000 else math.inf
    raw = 0.5 * math.sqrt(_exp2(inp.key_len - inp.hmin) + seed_term) + inp.eps_smooth
    return min(1.0, raw) if clamp else raw


def compare_bounds(inp: BoundInputs) -> BoundComparison:
    """Evaluate both bounds and report which is tighter.

    The ordering is decided on the unclamped values, since clamping maps any
    two vacuous bounds to 1. ``theorem1_tighter_predicate`` is the closed form
    ``2**(l - hmin) * (2**gap + 1) <= 1``, which for ``gap > 0`` holds exactly
    when the first bound is no larger than the second.
    """
    t_raw = theorem1_bound(inp, clamp=False)
    a_raw = alternative_bound(inp, clamp=False)
    if abs(t_raw - a_raw) <= EQUAL_TOL or t_raw == a_raw:
        tighter = Tighter.EQUAL
    elif t_raw < a_raw:
        tighter = Tighter.THEOREM1
    else:
        tighter = Tighter.ALTERNATIVE
    predicate = _exp2(inp.key_len - inp.hmin) * (_exp2(inp.seed.gap) + 1) <= 1
    return BoundComparison(min(1.0, t_raw), min(1.0, a_raw), t_raw, a_raw, tighter, predicate)


def key_length_budget(hmin: float, leak_ec: float, security: SecurityParams | None = None,
                      seed: SeedQuality | None = None) -> KeyLengthBudget:
    """Itemized secure key length with the seed-gap penalty."""
    security = security or SecurityParams()
    seed = seed or SeedQuality(0, 0)
    if hmin < 0 or leak_ec < 0:
        raise ValidationError("hmin and leak_ec must be non-negative")
    slack = security.eps_sec - security.eps_smooth
    if slack <= 0:
        raise ParameterError("eps_sec must exceed eps_smooth")
    pa_cost = 2 * math.log2(1 / (2 * slack))
    ec_cost = math.log2(2 / security.eps_cor)
    unclamped = hmin - leak_ec - pa_cost - ec_cost - seed.gap
    return KeyLengthBudget(hmin, leak_ec, security, seed, pa_cost, ec_cost, unclamped,
                           max(0, math.floor(unclamped)))


def key_length(hmin: float, leak_ec: float, security: SecurityParams | None = None,
               seed: SeedQuality | None = None) -> int:
    """Largest secure key length in bits, floored and clamped at zero."""
    return key_length_budget(hmin, leak_ec, security, seed).max_key_len


def epsilon_secure(eps_sec: float, eps_cor: float) -> float:
    """Composed security parameter: secrecy plus correctness failure."""
    return eps_sec + eps_cor
