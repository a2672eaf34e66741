import math

import numpy as np
import pytest
from _oracles import grid_argmax_2d, lsb_mi, msb_mi
from hypothesis import given
from hypothesis import strategies as st
from scipy import optimize
from scipy.stats import norm

from polarflash.boundary_opt import (
    BoundaryError,
    Boundaries,
    DiscreteChannel,
    binary_entropy_vec,
    bit_channel,
    bit_mutual_information,
    bit_references,
    boundaries_for_scheme,
    constant_ratio_boundaries,
    constant_ratio_scheme,
    hard_only,
    mutual_information,
    practical_bit_mi,
    practical_smmi,
    smmi_lsb,
    smmi_msb,
)
from polarflash.flash_channel import FlashModel, hard_boundaries


def h2(p):
    return 0.0 if p in (0.0, 1.0) else -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def test_entropy():
    assert binary_entropy_vec([0.5, 0.5]) == pytest.approx(1.0)
    assert binary_entropy_vec([1.0, 0.0]) == 0.0
    with pytest.raises(ValueError):
        binary_entropy_vec([0.7, 0.7])
    with pytest.raises(ValueError):
        binary_entropy_vec([-0.1, 1.1])


@given(st.floats(0, 1))
def test_bsc_capacity(p):
    ch = DiscreteChannel(np.array([[1 - p, p], [p, 1 - p]]))
    assert mutual_information(ch) == pytest.approx(1 - h2(p), abs=1e-12)


@given(st.floats(0, 1))
def test_bec_capacity(e):
    ch = DiscreteChannel(np.array([[1 - e, e, 0], [0, e, 1 - e]]))
    assert mutual_information(ch) == pytest.approx(1 - e, abs=1e-12)


def test_channel_validation():
    with pytest.raises(ValueError):
        DiscreteChannel(np.array([[0.5, 0.4], [0.5, 0.5]]))
    with pytest.raises(ValueError):
        DiscreteChannel(np.array([[1.0]]))


def test_boundaries_merge_and_validate():
    b = Boundaries((1.0, 3.0), (2.0, 0.5))
    assert b.references.tolist() == [0.5, 1.0, 2.0, 3.0]
    assert len(b) == 4
    with pytest.raises(BoundaryError):
        Boundaries((1.0, 2.0), (1.0,))


def test_constant_ratio_equal_sigma_closed_form():
    m = FlashModel.uniform(1.0, 0.25)
    for ratio in (1.5, 2.0, 8.0):
        bl, br = constant_ratio_boundaries(m, 1, ratio)
        shift = 0.25**2 * math.log(ratio) / 1.0
        assert bl == pytest.approx(2.5 - shift, abs=1e-9)
        assert br == pytest.approx(2.5 + shift, abs=1e-9)


def test_constant_ratio_unit_ratio_collapses(nand):
    for k in range(3):
        bl, br = constant_ratio_boundaries(nand, k, 1.0)
        assert bl == pytest.approx(hard_boundaries(nand)[k], abs=1e-12)
        assert br == pytest.approx(bl, abs=1e-12)


@pytest.mark.parametrize("ratio", [2.0, 4.0, 8.0])
def test_constant_ratio_bisection_oracle(nand, ratio):
    for k in range(3):
        a, b = nand.states[k], nand.states[k + 1]
        lr = lambda x: norm.logpdf(x, a.mean, a.sigma) - norm.logpdf(x, b.mean, b.sigma)
        hk = hard_boundaries(nand)[k]
        bl_ref = optimize.bisect(lambda x: lr(x) - math.log(ratio), a.mean, hk, xtol=1e-13)
        br_ref = optimize.bisect(lambda x: lr(x) + math.log(ratio), hk, b.mean, xtol=1e-13)
        bl, br = constant_ratio_boundaries(nand, k, ratio)
        assert bl == pytest.approx(bl_ref, abs=1e-9)
        assert br == pytest.approx(br_ref, abs=1e-9)


def test_constant_ratio_errors(nand):
    with pytest.raises(BoundaryError):
        constant_ratio_boundaries(nand, 0, 0.5)
    with pytest.raises(ValueError):
        constant_ratio_boundaries(nand, 3, 2.0)
    with pytest.raises(BoundaryError):
        constant_ratio_boundaries(FlashModel.uniform(1.0, 0.25), 0, 1e9)


def test_scheme_layouts(nand, gray):
    assert len(constant_ratio_scheme(nand, 2.0).references) == 9
    assert len(hard_only(nand).references) == 3
    assert len(practical_smmi(nand, gray).references) == 9
    with pytest.raises(ValueError):
        boundaries_for_scheme("nope", nand, gray)


def test_bit_channel_output_counts(nand, gray):
    h = hard_boundaries(nand)
    assert bit_channel(nand, gray, 1, [3.7, 4.1]).transition.shape == (2, 3)
    assert bit_channel(nand, gray, 1, [3.7, h[1], 4.1]).transition.shape == (2, 4)
    msb = bit_references(practical_smmi(nand, gray), nand, gray, 0)
    assert msb.size == 6
    assert bit_channel(nand, gray, 0, msb).transition.shape == (2, 6)


def test_bit_mi_matches_oracle(nand, gray):
    h = hard_boundaries(nand)
    assert bit_mutual_information(nand, gray, 1, [3.7, h[1], 4.1]) == pytest.approx(
        float(lsb_mi(3.7, 4.1, nand, True, h[1])), abs=1e-12)
    refs = [1.9, h[0], 2.4, 5.1, h[2], 5.6]
    assert bit_mutual_information(nand, gray, 0, refs) == pytest.approx(
        float(msb_mi(1.9, 2.4, 5.1, 5.6, nand, True, h)), abs=1e-12)


@pytest.mark.parametrize("practical", [False, True])
def test_smmi_lsb_near_grid_oracle(practical, gray):
    m = FlashModel.nand_mlc(0.28)
    h, mu = hard_boundaries(m), m.means
    opt = smmi_lsb(m, gray, practical)
    arg, best = grid_argmax_2d(lambda a, b: lsb_mi(a, b, m, practical, h[1]), (mu[1], h[1]), (h[1], mu[2]))
    assert np.allclose(opt, arg, atol=1e-3)
    assert float(lsb_mi(*opt, m, practical, h[1])) >= best - 1e-12


def test_smmi_msb_blockwise_optimal(gray):
    m = FlashModel.nand_mlc(0.28)
    h, mu = hard_boundaries(m), m.means
    q = smmi_msb(m, gray, practical=True)
    arg, _ = grid_argmax_2d(lambda a, b: msb_mi(q[0], q[1], a, b, m, True, h), (mu[2], h[2]), (h[2], mu[3]))
    assert np.allclose(q[2:], arg, atol=1e-3)


def test_smmi_order_and_improvement(nand, gray):
    b = practical_smmi(nand, gray)
    refs = b.references
    assert np.all(np.diff(refs) > 0)
    mi = practical_bit_mi(b, nand, gray)
    base = practical_bit_mi(hard_only(nand), nand, gray)
    assert mi["msb"] > base["msb"] and mi["lsb"] > base["lsb"]


@given(st.floats(0.15, 0.4))
def test_ratio_mi_at_least_hard(sigma):
    from polarflash.mapping import gray_scheme
    g = gray_scheme()
    m = FlashModel.nand_mlc(sigma)
    hard = practical_bit_mi(hard_only(m), m, g)
    ratio = practical_bit_mi(constant_ratio_scheme(m, 4.0), m, g)
    for bit in ("msb", "lsb"):
        assert ratio[bit] >= hard[bit] - 1e-12
