import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from polarflash.mapping import (
    MappingScheme,
    RegionErrorProfile,
    bits_from_states,
    count_changes,
    enumerate_schemes,
    expected_raw_bit_errors,
    is_gray,
    scheme_by_name,
    states_from_bits,
)


def test_gray_bit_table(gray):
    assert gray.bit_table.tolist() == [[0, 0], [1, 0], [1, 1], [0, 1]]
    assert gray.name == "ABCD"
    assert count_changes(gray) == 3
    assert gray.region_distances() == (1, 1, 1)


def test_role_sets(gray):
    assert gray.ones_set(0) == (1, 2) and gray.zeros_set(0) == (0, 3)
    assert gray.ones_set(1) == (2, 3) and gray.zeros_set(1) == (0, 1)
    assert gray.transition_regions(0) == [0, 2]
    assert gray.transition_regions(1) == [1]


def test_direct_scheme(direct):
    assert direct.region_distances() == (1, 2, 1)
    assert not is_gray(direct)
    assert scheme_by_name("direct") == direct
    assert scheme_by_name("dcba").name == "DCBA"


def test_invalid_scheme():
    with pytest.raises(ValueError):
        MappingScheme(((0, 0), (0, 0), (1, 1), (0, 1)))


def test_enumeration_brute_force():
    # independent count straight from the symbol rows
    rows = {"A": (0, 0), "B": (1, 0), "C": (1, 1), "D": (0, 1)}
    got = {s.name: c for s, c in enumerate_schemes()}
    for perm in itertools.permutations("ABCD"):
        cols = [rows[c] for c in perm]
        changes = sum(cols[i][b] != cols[i + 1][b] for i in range(3) for b in range(2))
        assert got["".join(perm)] == changes


def test_expected_errors_example(gray, direct):
    p = RegionErrorProfile(0.01, 0.02, 0.01)
    assert expected_raw_bit_errors(gray, p) == pytest.approx(0.04)
    assert expected_raw_bit_errors(direct, p) == pytest.approx(0.06)
    with pytest.raises(ValueError):
        RegionErrorProfile(-0.1, 0, 0)


@given(st.permutations("ABCD"))
def test_gray_iff_three_changes(perm):
    s = MappingScheme.from_letters("".join(perm))
    assert is_gray(s) == (count_changes(s) == 3)


@given(st.lists(st.integers(0, 1), min_size=2, max_size=64).filter(lambda b: len(b) % 2 == 0),
       st.permutations("ABCD"))
def test_bits_states_roundtrip(bits, perm):
    s = MappingScheme.from_letters("".join(perm))
    b = np.array(bits)
    states = states_from_bits(b, s)
    assert states.shape == (len(bits) // 2,)
    assert np.array_equal(bits_from_states(states, s), b)


def test_bit_order_in_cell(gray):
    # consecutive bits are (msb, lsb) of one cell
    assert states_from_bits([1, 0, 0, 1], gray).tolist() == [1, 3]
