"""Two-decoy (vacuum + weak) BB84 over fiber with a non-uniform PA seed.

Asymptotic decoy estimates, finite-key privacy-amplification terms, and a
Toeplitz seed of ``n_sift + l - 1`` bits whose per-bit min-entropy is
``h_avg``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, fields, replace

import numpy as np

from .bounds import SecurityParams
from .errors import ConvergenceError, ValidationError

E0 = 0.5

TABLE1_PRESETS = (
    ("IDQ Quantis-PCIe-40M", 0.990),
    ("MATLAB unifrnd", 0.988),
    ("Random.org", 0.931),
    ("Intel DRNG", 0.930),
)


@dataclass(frozen=True)
class ChannelModel:
    attenuation: float = 0.2  # dB/km
    distance: float = 0.0  # km
    detector_efficiency: float = 0.1
    dark_count: float = 1e-5  # Y0, per pulse
    misalignment: float = 0.01  # e_d

    def __post_init__(self):
        if self.attenuation < 0 or self.distance < 0:
            raise ValidationError("attenuation and distance must be non-negative")
        for name in ("detector_efficiency", "dark_count", "misalignment"):
            v = getattr(self, name)
            if not 0 <= v <= 1:
                raise ValidationError(f"{name} must lie in [0, 1], got {v}")

    @property
    def transmittance(self) -> float:
        """Overall eta: fiber loss times detector efficiency."""
        return self.detector_efficiency * 10 ** (-self.attenuation * self.distance / 10)


@dataclass(frozen=True)
class ProtocolParams:
    mu: float = 0.5
    nu: float = 0.1
    pulse_count: float = 1e10
    p_signal: float = 0.8
    p_weak: float = 0.1
    p_vacuum: float = 0.1
    sifting: float = 0.5
    ec_efficiency: float = 1.16

    def __post_init__(self):
        if not 0 < self.nu < self.mu:
            raise ValidationError("need 0 < nu < mu")
        probs = (self.p_signal, self.p_weak, self.p_vacuum)
        if any(p < 0 for p in probs) or abs(math.fsum(probs) - 1) > 1e-12:
            raise ValidationError("intensity probabilities must form a distribution")
        if self.pulse_count < 1:
            raise ValidationError("pulse_count must be at least 1")
        if not 0 < self.sifting <= 1:
            raise ValidationError("sifting must lie in (0, 1]")
        if self.ec_efficiency < 1:
            raise ValidationError("ec_efficiency must be >= 1")


@dataclass(frozen=True)
class DecoyEstimate:
    y1_lower: float
    e1_upper: float
    q1: float

    @property
    def has_single_photons(self) -> bool:
        return self.y1_lower > 0


@dataclass(frozen=True)
class KeyRateResult:
    distance: float
    h_avg: float
    q_mu: float
    e_mu: float
    q_nu: float
    e_nu: float
    q_vac: float
    y1_lower: float
    e1_upper: float
    n_sift: float
    n_single: float
    hmin: float
    leak_ec: float
    key_len: int
    skr: float
    seed_alpha: float
    seed_beta: float
    iterations: int = 0

    @property
    def penalty(self) -> float:
        return self.seed_alpha - self.seed_beta


def binary_entropy(p: float) -> float:
    if p <= 0 or p >= 1:
        return 0.0
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def gain_qber(ch: ChannelModel, intensity: float) -> tuple[float, float]:
    """Gain and QBER of a phase-randomized coherent state of mean ``intensity``."""
    if intensity < 0:
        raise ValidationError("intensity must be non-negative")
    detect = -math.expm1(-ch.transmittance * intensity)
    q = ch.dark_count + detect
    if q == 0:
        return 0.0, E0
    return q, (E0 * ch.dark_count + ch.misalignment * detect) / q


def decoy_estimates(q_mu: float, e_mu: float, q_nu: float, e_nu: float, q_vac: float,
                    mu: float, nu: float) -> DecoyEstimate:
    """Vacuum + weak decoy lower bound on Y1 and upper bound on e1.

    ``e_mu`` is accepted for symmetry with the measured quantities; the
    bounds only need the weak-decoy error.
    """
    if not 0 < nu < mu:
        raise ValidationError("need 0 < nu < mu")
    for v in (q_mu, q_nu, q_vac):
        if not 0 <= v <= 1:
            raise ValidationError("gains must lie in [0, 1]")
    y0 = q_vac
    y1 = (mu / (mu * nu - nu * nu)) * (
        q_nu * math.exp(nu)
        - q_mu * math.exp(mu) * (nu * nu) / (mu * mu)
        - (mu * mu - nu * nu) / (mu * mu) * y0
    )
    y1 = min(1.0, max(0.0, y1))
    if y1 <= 0:
        return DecoyEstimate(0.0, E0, 0.0)
    e1 = (e_nu * q_nu * math.exp(nu) - E0 * y0) / (y1 * nu)
    e1 = min(1.0, max(0.0, e1))
    return DecoyEstimate(y1, e1, y1 * mu * math.exp(-mu))


def _solve_key_length(base: float, gap_rate: float, n_sift: float,
                      max_iter: int = 1000) -> tuple[int, int]:
    """Largest ``l`` with ``l <= base - gap_rate * (n_sift + l - 1)``.

    Iterates ``x <- (x + rhs(x)) / 2`` from 0. rhs has slope ``-gap_rate`` in
    ``[-1, 0]``, so the averaged map has slope in ``[0, 1/2]`` and the
    sequence converges monotonically. The result is floored at the end.
    """
    def rhs(x):
        return base - gap_rate * (n_sift + x - 1)

    x = 0.0
    tol = 1e-9 * max(1.0, abs(base))
    for it in range(1, max_iter + 1):
        nxt = 0.5 * (x + rhs(x))
        if abs(nxt - x) <= tol:
            x = nxt
            break
        x = nxt
    else:
        raise ConvergenceError(f"no convergence: base={base}, gap_rate={gap_rate}, n_sift={n_sift}")
    l = math.floor(x)
    # the stopping tolerance can leave x a hair to either side of an integer
    while l > 0 and l > rhs(l):
        l -= 1
    while l + 1 <= rhs(l + 1):
        l += 1
    return max(0, l), it


def key_rate(ch: ChannelModel, proto: ProtocolParams, sec: SecurityParams | None = None,
             h_avg: float = 1.0) -> KeyRateResult:
    """Secret key length and rate for one channel and seed quality."""
    if not 0 <= h_avg <= 1:
        raise ValidationError(f"h_avg must lie in [0, 1], got {h_avg}")
    sec = sec or SecurityParams()
    q_mu, e_mu = gain_qber(ch, proto.mu)
    q_nu, e_nu = gain_qber(ch, proto.nu)
    q_vac, _ = gain_qber(ch, 0.0)
    est = decoy_estimates(q_mu, e_mu, q_nu, e_nu, q_vac, proto.mu, proto.nu)

    n_sift = proto.pulse_count * proto.p_signal * q_mu * proto.sifting
    n_single = n_sift * est.q1 / q_mu if q_mu > 0 else 0.0
    phase = 1.0 - binary_entropy(est.e1_upper) if est.e1_upper < 0.5 else 0.0
    hmin = n_single * phase
    leak = proto.ec_efficiency * n_sift * binary_entropy(e_mu)
    pa_cost = 2 * math.log2(1 / (2 * (sec.eps_sec - sec.eps_smooth)))
    ec_cost = math.log2(2 / sec.eps_cor)
    base = hmin - leak - pa_cost - ec_cost

    gap_rate = 1.0 - h_avg
    if n_sift < 1 or hmin <= 0:
        l, iters = 0, 0
    else:
        l, iters = _solve_key_length(base, gap_rate, n_sift)
    alpha = n_sift + l - 1 if n_sift >= 1 else 0.0
    beta = alpha if h_avg == 1.0 else h_avg * alpha
    return KeyRateResult(
        distance=ch.distance, h_avg=h_avg, q_mu=q_mu, e_mu=e_mu, q_nu=q_nu, e_nu=e_nu,
        q_vac=q_vac, y1_lower=est.y1_lower, e1_upper=est.e1_upper, n_sift=n_sift,
        n_single=n_single, hmin=hmin, leak_ec=leak, key_len=l,
        skr=l / proto.pulse_count, seed_alpha=alpha, seed_beta=beta, iterations=iters,
    )


def critical_h_avg(ch: ChannelModel, proto: ProtocolParams, sec: SecurityParams | None = None,
                   tol: float = 1e-4) -> float:
    """Smallest per-bit seed min-entropy giving a positive key, to within ``tol``.

    Returns ``nan`` when even a uniform seed yields no key, and 0.0 when any
    seed quality does.
    """
    if key_rate(ch, proto, sec, 1.0).key_len == 0:
        return math.nan
    if key_rate(ch, proto, sec, 0.0).key_len > 0:
        return 0.0
    lo, hi = 0.0, 1.0  # key_len(lo) == 0 < key_len(hi)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if key_rate(ch, proto, sec, mid).key_len > 0:
            hi = mid
        else:
            lo = mid
    return hi


@dataclass
class ScanResult:
    rows: list[KeyRateResult]
    critical: list[tuple[float, float]] = field(default_factory=list)


def scan(h_grid, distance_grid, ch: ChannelModel | None = None,
         proto: ProtocolParams | None = None, sec: SecurityParams | None = None) -> ScanResult:
    """Key rate over the cross product of seed qualities and distances.

    Rows are sorted by ``(distance, h_avg)``; ``critical`` lists
    ``(distance, h*)`` with ``h*`` from :func:`critical_h_avg`.
    """
    h_grid, distance_grid = list(h_grid), list(distance_grid)
    if not h_grid or not distance_grid:
        raise ValidationError("h_grid and distance_grid must be non-empty")
    ch = ch or ChannelModel()
    proto = proto or ProtocolParams()
    rows, critical = [], []
    for d in sorted(set(distance_grid)):
        ch_d = replace(ch, distance=d)
        for h in sorted(set(h_grid)):
            rows.append(key_rate(ch_d, proto, sec, h))
        critical.append((d, critical_h_avg(ch_d, proto, sec)))
    return ScanResult(rows, critical)


def table1_presets() -> dict[str, float]:
    """Per-bit average min-entropy of common RNGs used for PA seeds."""
    return dict(TABLE1_PRESETS)


def preset(name: str) -> float:
    try:
        return table1_presets()[name]
    except KeyError:
        raise KeyError(f"unknown RNG preset {name!r}; known: {', '.join(table1_presets())}") from None


SCAN_COLUMNS = ("distance_km", "h_avg", "Q_mu", "E_mu", "Y1_lower", "e1_upper",
                "n_sift", "key_len", "penalty_bits", "skr")
CRITICAL_COLUMNS = ("distance_km", "h_critical")


def _g(x: float) -> str:
    return format(x, ".12g")


def write_scan_csv(rows, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(SCAN_COLUMNS)
    for r in rows:
        w.writerow([_g(r.distance), _g(r.h_avg), _g(r.q_mu), _g(r.e_mu), _g(r.y1_lower),
                    _g(r.e1_upper), _g(r.n_sift), r.key_len, _g(r.penalty), _g(r.skr)])


def write_critical_csv(critical, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CRITICAL_COLUMNS)
    for d, h in critical:
        w.writerow([_g(d), _g(h)])


def photon_resolved_truth(ch: ChannelModel, intensity: float, n_max: int = 60):
    """Gain/QBER from an explicit sum over photon numbers, plus true Y1 and e1.

    Independent of :func:`gain_qber`: it builds ``Q = sum_n Y_n P(n)`` from
    per-photon-number yields ``Y_n = Y0 + 1 - (1 - eta)**n``.
    """
    eta, y0, ed = ch.transmittance, ch.dark_count, ch.misalignment
    k = np.arange(n_max + 1)
    log_pois = -intensity + k * (math.log(intensity) if intensity > 0 else 0.0) \
        - np.array([math.lgamma(i + 1) for i in k])
    pois = np.exp(log_pois) if intensity > 0 else (k == 0).astype(float)
    eta_n = 1.0 - (1.0 - eta) ** k
    y_n = y0 + eta_n
    err_n = E0 * y0 + ed * eta_n
    q = float(np.dot(pois, y_n))
    e = float(np.dot(pois, err_n)) / q if q > 0 else E0
    y1 = y0 + eta
    e1 = (E0 * y0 + ed * eta) / y1 if y1 > 0 else E0
    return q, e, y1, e1


def channel_from_mapping(values: dict) -> tuple[ChannelModel, ProtocolParams, SecurityParams]:
    """Build the three parameter objects from a flat ``key -> float`` mapping."""
    groups = {cls: {f.name for f in fields(cls)} for cls in (ChannelModel, ProtocolParams, SecurityParams)}
    known = set().union(*groups.values())
    unknown = sorted(set(values) - known)
    if unknown:
        raise KeyError(unknown[0])
    built = [cls(**{k: float(v) for k, v in values.items() if k in names})
             for cls, names in groups.items()]
    return tuple(built)
