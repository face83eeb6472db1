import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qkdseed.entropy import (SeedQuality, SymbolDistribution, bytes_to_symbols,
                             count_symbols, estimate_file, estimate_from_counts,
                             estimate_min_entropy_mcv, min_entropy, seed_quality_from_per_bit)
from qkdseed.errors import EstimationError, ValidationError


def test_min_entropy_uniform_16():
    assert min_entropy(SymbolDistribution.uniform(16)) == 4.0


def test_min_entropy_point_mass():
    assert min_entropy(SymbolDistribution.from_probabilities([0, 1, 0])) == 0.0


def test_min_entropy_biased_coin():
    # -log2 0.6 at 50 digits
    assert min_entropy(SymbolDistribution.from_probabilities([0.6, 0.4])) == pytest.approx(
        0.73696559416620617, abs=1e-12)


@pytest.mark.parametrize("probs", [[0.5, 0.6], [1.2, -0.2], [0.5], [float("nan"), 1.0]])
def test_invalid_distribution(probs):
    with pytest.raises(ValidationError):
        SymbolDistribution.from_probabilities(probs)


def test_length_must_match_alphabet():
    with pytest.raises(ValidationError):
        SymbolDistribution(3, (0.5, 0.5))


prob_vectors = st.lists(st.floats(0.0, 1.0), min_size=1, max_size=12).filter(
    lambda v: sum(v) > 1e-3).map(lambda v: [x / math.fsum(v) for x in v])


@given(prob_vectors, st.randoms(use_true_random=False))
def test_min_entropy_range_and_permutation(probs, rnd):
    try:
        dist = SymbolDistribution.from_probabilities(probs)
    except ValidationError:
        return  # renormalization rounding can miss the 1e-12 window
    h = min_entropy(dist)
    assert 0 <= h <= math.log2(len(probs)) + 1e-12
    shuffled = list(probs)
    rnd.shuffle(shuffled)
    assert min_entropy(SymbolDistribution.from_probabilities(shuffled)) == h


@pytest.mark.parametrize("k", [1, 2, 3, 5, 7, 10])
def test_uniform_attains_log_alphabet(k):
    assert min_entropy(SymbolDistribution.uniform(k)) == pytest.approx(math.log2(k), abs=1e-15)


def test_non_uniform_strictly_below_log_alphabet():
    assert min_entropy(SymbolDistribution.from_probabilities([0.26, 0.25, 0.25, 0.24])) < 2


def test_mcv_constant_stream():
    est = estimate_min_entropy_mcv(np.zeros(5000, dtype=np.uint8))
    assert est.point_estimate == 0.0
    assert est.lower_confidence_bound == 0.0


@pytest.mark.parametrize("p0,expected", [(0.5, 1.0), (0.6, 0.73696559416620617)])
def test_mcv_seeded_bit_streams(p0, expected):
    rng = np.random.default_rng(2024)
    bits = (rng.random(10**6) >= p0).astype(np.uint8)
    est = estimate_min_entropy_mcv(bits)
    assert est.point_estimate == pytest.approx(expected, abs=0.01)
    assert est.lower_confidence_bound <= est.point_estimate <= 1.0
    assert est.sample_count == 10**6


def test_mcv_lower_bound_formula():
    counts = np.array([6000, 4000])
    est = estimate_from_counts(counts, 0.99)
    z = 2.3263478740408408
    p_u = 0.6 + z * math.sqrt(0.6 * 0.4 / 10000)
    assert est.lower_confidence_bound == pytest.approx(-math.log2(p_u), rel=1e-12)


def test_mcv_errors():
    with pytest.raises(ValidationError):
        estimate_min_entropy_mcv([])
    with pytest.raises(EstimationError):
        estimate_min_entropy_mcv(np.zeros(999, dtype=np.uint8))
    with pytest.raises(ValidationError):
        estimate_min_entropy_mcv([0, 2] * 600)


def test_chunked_counts_add_up():
    rng = np.random.default_rng(1)
    data = rng.integers(0, 256, 4096, dtype=np.uint8)
    whole = count_symbols(data, 8)
    parts = count_symbols(data[:1000], 8) + count_symbols(data[1000:], 8)
    assert np.array_equal(whole, parts)


def test_bytes_to_symbols_msb_first():
    assert bytes_to_symbols(b"\x80\x01").tolist() == [1, 0, 0, 0, 0, 0, 0, 0,
                                                     0, 0, 0, 0, 0, 0, 0, 1]
    assert bytes_to_symbols(b"\x80\x01", 8).tolist() == [128, 1]


def test_estimate_file_bytes(tmp_path):
    rng = np.random.default_rng(7)
    path = tmp_path / "rng.bin"
    path.write_bytes(rng.integers(0, 256, 200_000, dtype=np.uint8).tobytes())
    per_bit = estimate_file(path, symbol_bits=1, chunk_size=4096)
    assert per_bit.sample_count == 1_600_000
    assert per_bit.per_bit == pytest.approx(1.0, abs=0.01)
    per_byte = estimate_file(path, symbol_bits=8)
    assert per_byte.sample_count == 200_000
    assert per_byte.lower_confidence_bound <= per_byte.point_estimate <= 8


@pytest.mark.parametrize("alpha,h,beta,gap", [
    (100, 1.0, 100, 0),
    (100, 0.95, 95, 5),
    (1000, 0.931, 931, 69),  # Random.org figure
])
def test_seed_quality_from_per_bit(alpha, h, beta, gap):
    sq = seed_quality_from_per_bit(alpha, h)
    assert sq.beta == pytest.approx(beta, abs=1e-9)
    assert sq.gap == pytest.approx(gap, abs=1e-9)


@given(st.integers(1, 10**9))
def test_uniform_seed_has_zero_gap(alpha):
    assert seed_quality_from_per_bit(alpha, 1.0).gap == 0


@pytest.mark.parametrize("h", [-0.1, 1.01])
def test_seed_quality_rejects_bad_h(h):
    with pytest.raises(ValidationError):
        seed_quality_from_per_bit(10, h)


def test_seed_quality_invariants():
    with pytest.raises(ValidationError):
        SeedQuality(10, 11)
    with pytest.raises(ValidationError):
        SeedQuality(10, -1)
