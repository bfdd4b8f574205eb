import math

import numpy as np
import pytest

from gaahsim.basis import (MAX_SITES, SectorBasis, enumerate_sector,
                           occupation_vectors, state_from_string,
                           state_to_string)


def brute_sector(L, M):
    return [s for s in range(1 << L) if bin(s).count("1") == M]


def test_sector_sizes_against_binomial():
    for L in range(1, 15):
        for M in range(L + 1):
            b = SectorBasis(L, M)
            assert len(b) == math.comb(L, M)


def test_half_filled_ten_site_sector_size():
    assert len(SectorBasis(10, 5)) == 252


def test_empty_sector_single_state():
    b = SectorBasis(4, 0)
    assert list(b.states) == [0]


def test_four_site_two_particle_enumeration():
    b = SectorBasis(4, 2)
    assert list(b.states) == [0b0011, 0b0101, 0b0110, 0b1001, 0b1010, 0b1100]
    assert list(b.states) == brute_sector(4, 2)


def test_enumeration_matches_brute_force():
    for L in range(1, 9):
        for M in range(L + 1):
            assert list(SectorBasis(L, M).states) == brute_sector(L, M)


def test_rank_of_lowest_state_is_zero():
    for L, M in [(4, 2), (6, 3), (10, 5), (7, 1)]:
        b = SectorBasis(L, M)
        assert b.rank(int(b.states[0])) == 0


def test_rank_examples():
    assert SectorBasis(4, 2).rank(0b0101) == 1
    assert SectorBasis(10, 5).rank(0b1111100000) == 251


def test_unrank_examples():
    assert SectorBasis(4, 2).unrank(0) == 0b0011
    for L, M in [(4, 2), (8, 3), (10, 5)]:
        b = SectorBasis(L, M)
        assert b.unrank(len(b) - 1) == ((1 << M) - 1) << (L - M)


def test_rank_unrank_round_trip_exhaustive():
    b = SectorBasis(8, 4)
    for k, s in enumerate(b.states):
        s = int(s)
        assert b.rank(s) == k
        assert b.unrank(k) == s


def test_rank_rejects_wrong_popcount():
    b = SectorBasis(6, 3)
    with pytest.raises(ValueError):
        b.rank(0b000001)
    with pytest.raises(ValueError):
        b.rank(1 << 6 | 0b11)


def test_unrank_rejects_out_of_range():
    b = SectorBasis(6, 3)
    with pytest.raises(ValueError):
        b.unrank(len(b))
    with pytest.raises(ValueError):
        b.unrank(-1)


def test_site_count_cap():
    with pytest.raises(ValueError):
        SectorBasis(MAX_SITES + 1, 1)


def test_state_from_string_leftmost_is_site_one():
    assert state_from_string("1000000000") == 0b0000000001
    assert state_from_string("0000000000") == 0
    neel = state_from_string("1010101010")
    assert bin(neel).count("1") == 5
    assert neel == 0b0101010101


def test_state_string_round_trip():
    for spec in ("10", "0110", "1010101010", "111000"):
        s = state_from_string(spec)
        assert state_to_string(s, len(spec)) == spec


def test_state_from_string_rejects_bad_chars():
    with pytest.raises(ValueError):
        state_from_string("10a0")


def test_occupation_vectors():
    b = SectorBasis(4, 2)
    occ = occupation_vectors(b)
    assert occ.shape == (6, 4)
    # first basis state is 0b0011: sites 1 and 2 occupied
    assert list(occ[0]) == [1.0, 1.0, 0.0, 0.0]
    assert np.all(occ.sum(axis=1) == 2)


def test_rank_unrank_property_thousand_cases():
    rng = np.random.default_rng(1234)
    for _ in range(1000):
        L = int(rng.integers(1, 15))
        M = int(rng.integers(0, L + 1))
        b = SectorBasis(L, M)
        k = int(rng.integers(0, len(b)))
        s = b.unrank(k)
        assert b.rank(s) == k
