"""Exhaustive check of the non-uniform-seed leftover hash bound.

Side information is classical, so a cq-state is a joint distribution
``P(x, e)`` and the trace distance becomes a total-variation distance.
Everything here enumerates the full Toeplitz family, so sizes are small.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .bounds import BoundInputs, theorem1_bound
from .entropy import SeedQuality
from .errors import ResourceError, ValidationError
from .hashing import HashFamilyDescriptor, hash_table

MAX_N = 8
MAX_L = 3
PASS_TOL = 1e-10
STRATEGIES = ("spike", "block", "uniform")


@dataclass(frozen=True, eq=False)
class JointDistribution:
    """``p[x, e] = P(X = x, E = e)``; rows indexed by the packed integer ``x``."""

    p: np.ndarray

    def __post_init__(self):
        p = np.array(self.p, dtype=float)
        if p.ndim != 2:
            raise ValidationError("p must be a 2-D array")
        if (p < 0).any() or not np.isfinite(p).all():
            raise ValidationError("probabilities must be finite and non-negative")
        total = math.fsum(p.ravel())
        if total == 0:
            raise ValidationError("all-zero distribution")
        if abs(total - 1.0) > 1e-12:
            raise ValidationError(f"probabilities sum to {total!r}, not 1")
        p.setflags(write=False)
        object.__setattr__(self, "p", p)

    @property
    def n(self) -> int:
        rows = self.p.shape[0]
        n = rows.bit_length() - 1
        if 1 << n != rows:
            raise ValidationError("row count is not a power of two")
        return n

    @property
    def e_alphabet(self) -> int:
        return self.p.shape[1]


@dataclass(frozen=True, eq=False)
class SeedDistribution:
    family: HashFamilyDescriptor
    weights: np.ndarray
    beta: float
    strategy: str = "custom"

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        if w.shape != (self.family.family_size,):
            raise ValidationError(f"need {self.family.family_size} weights, got {w.shape}")
        if (w < 0).any() or abs(math.fsum(w) - 1.0) > 1e-12:
            raise ValidationError("weights must form a probability distribution")
        if self.min_entropy_of(w) < self.beta - 1e-9:
            raise ValidationError("weights have less min-entropy than the declared beta")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @staticmethod
    def min_entropy_of(w) -> float:
        return -math.log2(float(np.max(w)))

    @property
    def min_entropy(self) -> float:
        return self.min_entropy_of(self.weights)


@dataclass(frozen=True)
class VerificationReport:
    n: int
    l: int
    e_alphabet: int
    strategy: str
    alpha: int
    beta: float
    hmin: float
    delta: float
    bound: float
    margin: float
    passed: bool


def conditional_min_entropy(p: JointDistribution) -> float:
    """Guessing-probability form ``-log2 sum_e max_x P(x, e)``."""
    guess = math.fsum(p.p.max(axis=0))
    return max(0.0, -math.log2(guess))


def uniformity_distance(p_se) -> float:
    """``(1/2) * sum |P(s, e) - 2**-l P(e)|`` for a joint over ``S x E``."""
    p = p_se.p if isinstance(p_se, JointDistribution) else np.asarray(p_se, dtype=float)
    return 0.5 * float(np.abs(p - p.sum(axis=0) / p.shape[0]).sum())


def _check_size(n: int, l: int) -> None:
    if n > MAX_N or l > MAX_L:
        raise ResourceError(f"oracle limited to n <= {MAX_N}, l <= {MAX_L}; got n={n}, l={l}")


@lru_cache(maxsize=64)
def _hashed_onehot(n: int, l: int) -> np.ndarray:
    """``M[s, z, x] = 1`` iff seed ``s`` maps ``x`` to ``z``."""
    table = hash_table(n, l)
    onehot = (table[:, None, :] == np.arange(1 << l)[None, :, None]).astype(float)
    onehot.setflags(write=False)
    return onehot


def per_seed_distances(p_xe: JointDistribution, family: HashFamilyDescriptor) -> np.ndarray:
    """Distance from uniform of the hashed key, one entry per seed."""
    n, l = family.input_len, family.output_len
    _check_size(n, l)
    if p_xe.n != n:
        raise ValidationError(f"distribution is over {p_xe.n}-bit inputs, family over {n}")
    p_se = _hashed_onehot(n, l) @ p_xe.p  # (S, 2**l, E)
    p_e = p_se.sum(axis=1, keepdims=True)
    return 0.5 * np.abs(p_se - p_e / (1 << l)).sum(axis=(1, 2))


def delta_exact(p_xe: JointDistribution, seed_dist: SeedDistribution) -> float:
    """``sum_f P(f) * d(S|E)`` for the hashed key, seed by seed."""
    d = per_seed_distances(p_xe, seed_dist.family)
    return math.fsum(seed_dist.weights * d)


def verify_theorem1(p_xe: JointDistribution, seed_dist: SeedDistribution) -> VerificationReport:
    """Compare the exact distance with the bound at ``eps = 0``.

    The bound uses the measured min-entropy of the seed weights (never below
    the declared ``beta``), which is the strictest admissible choice.
    """
    fam = seed_dist.family
    hmin = conditional_min_entropy(p_xe)
    beta = min(float(fam.seed_len), seed_dist.min_entropy)
    bound = theorem1_bound(BoundInputs(hmin, fam.output_len, SeedQuality(fam.seed_len, beta)))
    delta = delta_exact(p_xe, seed_dist)
    return VerificationReport(fam.input_len, fam.output_len, p_xe.e_alphabet,
                              seed_dist.strategy, fam.seed_len, beta, hmin, delta,
                              bound, bound - delta, delta <= bound + PASS_TOL)


def _uniform(family: HashFamilyDescriptor) -> SeedDistribution:
    size = family.family_size
    return SeedDistribution(family, np.full(size, 1.0 / size), float(family.seed_len), "uniform")


def _spike(family, beta, order) -> SeedDistribution:
    size = family.family_size
    top = 2.0 ** -beta
    w = np.full(size, (1.0 - top) / (size - 1) if size > 1 else 0.0)
    w[order[0]] = top
    return SeedDistribution(family, w / math.fsum(w), beta, "spike")


def _block(family, beta, order) -> SeedDistribution:
    size = family.family_size
    level = 2.0 ** -beta
    k = min(size, int(math.floor(2.0 ** beta + 1e-9)))
    w = np.zeros(size)
    w[order[:k]] = level
    rest = 1.0 - k * level
    if rest > 1e-15 and k < size:
        w[order[k]] = rest
    return SeedDistribution(family, w / math.fsum(w), beta, "block")


def adversarial_seed_distributions(family: HashFamilyDescriptor, beta: float,
                                   strategy: str = "all",
                                   p_xe: JointDistribution | None = None) -> list[SeedDistribution]:
    """Seed distributions with min-entropy exactly ``beta`` that stress the bound.

    ``spike`` puts mass ``2**-beta`` on one seed and spreads the rest evenly;
    ``block`` puts ``2**-beta`` on each of ``2**beta`` seeds; ``uniform`` is the
    baseline. If ``p_xe`` is given, the heavy seeds are the ones whose hashed
    key is furthest from uniform, otherwise seed 0 (the all-zero matrix)
    first.
    """
    alpha = family.seed_len
    if not 0 <= beta <= alpha:
        raise ValidationError(f"need 0 <= beta <= alpha={alpha}, got {beta}")
    names = STRATEGIES if strategy == "all" else (strategy,)
    for name in names:
        if name not in STRATEGIES:
            raise ValidationError(f"unknown strategy {name!r}")
    if beta == alpha:
        return [_uniform(family)]
    if p_xe is None:
        order = np.arange(family.family_size)
    else:
        # stable sort keeps ties in seed order, for reproducibility
        order = np.argsort(-per_seed_distances(p_xe, family), kind="stable")
    out = []
    for name in names:
        if name == "spike":
            out.append(_spike(family, beta, order))
        elif name == "block":
            out.append(_block(family, beta, order))
        else:
            out.append(_uniform(family))
    return out


def random_joint_distribution(n: int, e_alphabet: int, rng: np.random.Generator) -> JointDistribution:
    """Random ``P(x, e)``; the Dirichlet concentration varies so both near-uniform
    and very skewed instances show up."""
    concentration = 10.0 ** rng.uniform(-1.5, 1.0)
    p = rng.dirichlet(np.full((1 << n) * e_alphabet, concentration)).reshape(1 << n, e_alphabet)
    if rng.random() < 0.25:
        # knock out part of the support
        p[rng.random(p.shape) < 0.5] = 0.0
        if p.sum() == 0:
            p[0, 0] = 1.0
    return JointDistribution(p / p.sum())


def sweep_betas(alpha: int) -> list[int]:
    """``alpha, alpha-1, alpha-2, ceil(alpha/2)`` (deduplicated, non-negative)."""
    out = []
    for b in (alpha, alpha - 1, alpha - 2, math.ceil(alpha / 2)):
        if b >= 0 and b not in out:
            out.append(b)
    return out


def run_sweep(ns: Iterable[int] = range(2, 7), ls: Iterable[int] = range(1, 4),
              trials: int = 100, e_alphabets: Sequence[int] = (1, 2, 3, 4),
              strategies: Sequence[str] = STRATEGIES, rng_seed: int = 0,
              betas: Sequence[float] | None = None) -> list[VerificationReport]:
    """Verify the bound over a grid of random instances.

    Each cell ``(n, l)`` with ``l <= n`` draws ``trials`` joint distributions;
    every distribution is checked against every strategy and beta.
    """
    ns, ls = list(ns), list(ls)
    for n in ns:
        for l in ls:
            _check_size(n, l)
    rng = np.random.default_rng(rng_seed)
    reports = []
    for n in ns:
        for l in ls:
            if l > n:
                continue
            fam = HashFamilyDescriptor(n, l)
            for _ in range(trials):
                e = int(rng.choice(e_alphabets))
                p_xe = random_joint_distribution(n, e, rng)
                for beta in (betas if betas is not None else sweep_betas(fam.seed_len)):
                    # every strategy collapses to the uniform seed at beta == alpha
                    for strat in (strategies[:1] if beta == fam.seed_len else strategies):
                        for sd in adversarial_seed_distributions(fam, beta, strat, p_xe):
                            reports.append(verify_theorem1(p_xe, sd))
    return reports


REPORT_COLUMNS = ("n", "l", "e_alphabet", "strategy", "alpha", "beta", "hmin",
                  "delta", "bound", "margin", "pass")


def write_report_csv(reports: Iterable[VerificationReport], fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(REPORT_COLUMNS)
    for r in reports:
        w.writerow([r.n, r.l, r.e_alphabet, r.strategy, r.alpha, _g(r.beta), _g(r.hmin),
                    _g(r.delta), _g(r.bound), _g(r.margin), int(r.passed)])


def _g(x: float) -> str:
    return format(x, ".12g")
