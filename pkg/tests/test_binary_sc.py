import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from polarflash.binary_sc import (
    MINUS,
    PLUS,
    TYPE1_TABLE,
    TYPE2_TABLE,
    ZERO,
    InvalidTc2Error,
    Tc2,
    binary_sc_decode,
    from_bitplanes,
    to_bitplanes,
    trace_binary_sc,
    type1_bits,
    type1_pe,
    type1_pe_lookup,
    type2_pe,
    type2_pe_lookup,
)
from polarflash.polar import PeCounter, PolarCode, encode, sc_decode

VALUES = (-1, 0, 1)


def test_tc2_encoding():
    assert (str(ZERO), str(PLUS), str(MINUS)) == ("00", "01", "11")
    for v in VALUES:
        assert Tc2.from_value(v).value == v
    with pytest.raises(InvalidTc2Error):
        Tc2(1, 0)


@given(st.sampled_from([0, 1]), st.sampled_from(VALUES), st.sampled_from(VALUES))
def test_type1_is_saturated_sum(u, x, y):
    z = type1_pe(u, Tc2.from_value(x), Tc2.from_value(y)).value
    assert z == int(np.clip((-x if u else x) + y, -1, 1))


@given(st.sampled_from(VALUES), st.sampled_from(VALUES))
def test_type2_is_sign_product(x, y):
    assert type2_pe(Tc2.from_value(x), Tc2.from_value(y)).value == x * y


def test_logic_and_lookup_agree():
    words = [ZERO, PLUS, MINUS]
    for u, x, y in itertools.product((0, 1), words, words):
        assert type1_pe(u, x, y) == type1_pe_lookup(u, x, y)
    for x, y in itertools.product(words, words):
        assert type2_pe(x, y) == type2_pe_lookup(x, y)
    assert len(TYPE1_TABLE) == 18 and len(TYPE2_TABLE) == 9


def test_invalid_operands():
    with pytest.raises(InvalidTc2Error):
        type2_pe((0, 1), PLUS)
    with pytest.raises(ValueError):
        type1_pe(2, PLUS, PLUS)


def test_logic_never_emits_pattern_10():
    for bits in itertools.product((0, 1), repeat=5):
        u, xm, xl, ym, yl = bits
        if (xm, xl) == (1, 0) or (ym, yl) == (1, 0):
            continue
        zm, zl = type1_bits(u, xm, xl, ym, yl)
        assert (zm, zl) != (1, 0)


@given(st.lists(st.sampled_from(VALUES), min_size=1, max_size=40))
def test_bitplane_roundtrip(vals):
    m, l = to_bitplanes(vals)
    assert from_bitplanes(m, l).tolist() == vals


def test_bitplanes_reject_out_of_range():
    with pytest.raises(InvalidTc2Error):
        to_bitplanes([2])


@pytest.mark.parametrize("n", [2, 8, 64])
def test_matches_saturated_reference(n, rng):
    for _ in range(5):
        k = int(rng.integers(0, n + 1))
        code = PolarCode(n, k, tuple(rng.choice(n, n - k, replace=False)))
        y = rng.choice([-1, 1], size=(200, n)).astype(np.int8)
        assert np.array_equal(binary_sc_decode(y, code, check=True), sc_decode(y, code, clip=1.0)[0])


def test_zero_inputs_accepted(rng):
    code = PolarCode(16, 8, tuple(range(8)))
    y = rng.choice([-1, 0, 1], size=(50, 16))
    assert np.array_equal(binary_sc_decode(y, code, check=True), sc_decode(y, code, clip=1.0)[0])


def test_noiseless_and_counter(rng):
    n = 128
    code = PolarCode(n, 64, tuple(range(64)))
    u = code.source_word(rng.integers(0, 2, size=(10, 64)))
    y = 1 - 2 * encode(u, code).astype(np.int8)
    counter = PeCounter()
    assert np.array_equal(binary_sc_decode(y[0], code, counter=counter), u[0])
    assert counter.type1 == counter.type2 == n // 2 * 7
    assert np.array_equal(binary_sc_decode(y, code), u)


def test_trace_dump():
    code = PolarCode(4, 2, (0, 1))
    text = trace_binary_sc(np.array([1, -1, -1, 1]), code)
    lines = text.splitlines()
    assert lines[0].startswith("# binary SC trace N=4 K=2")
    assert sum(l.startswith("type2") for l in lines) == 3
    assert sum(l.startswith("type1") for l in lines) == 3
    assert lines[-1].startswith("u_hat ")
    assert len(lines[-1].split()[1]) == 4
