import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from polarflash.ldpc_baseline import (
    LdpcConstructionError,
    QcLdpcCode,
    bitflip_decode,
    construct_qc,
    encode_ldpc,
    expand_prototype,
    load_prototype,
    save_prototype,
    syndrome,
    tanner_girth,
)


@pytest.fixture(scope="module")
def small():
    return construct_qc(32, 16, 4, seed=0)


def has_four_cycle(H):
    """Two columns sharing two or more checks."""
    d = H.toarray().astype(int)
    overlap = d.T @ d
    np.fill_diagonal(overlap, 0)
    return bool((overlap >= 2).any())


def test_dimensions(small):
    assert small.prototype.shape == (4, 8)
    assert small.H.shape == (16, 32)
    assert np.all(small.column_weights == 3)
    proto_w = (small.prototype >= 0).sum(axis=1) * 4
    assert np.array_equal(small.row_weights, np.repeat((small.prototype >= 0).sum(axis=1), 4))
    assert proto_w.sum() == small.H.nnz


def test_expansion_matches_dense_definition():
    proto = np.array([[1, -1, 0], [2, 3, -1]])
    z = 4
    dense = np.zeros((8, 12), dtype=int)
    for (i, j), s in np.ndenumerate(proto):
        if s >= 0:
            dense[i * z:(i + 1) * z, j * z:(j + 1) * z] = np.roll(np.eye(z, dtype=int), s, axis=1)
    assert np.array_equal(expand_prototype(proto, z).toarray(), dense)


def test_incompatible_dimensions():
    with pytest.raises(LdpcConstructionError):
        construct_qc(30, 16, 4)
    with pytest.raises(LdpcConstructionError):
        construct_qc(32, 30, 4)


def test_deterministic_given_seed():
    a = construct_qc(64, 32, 8, seed=5)
    b = construct_qc(64, 32, 8, seed=5)
    assert np.array_equal(a.prototype, b.prototype)


@pytest.mark.parametrize("n,k,z", [(32, 16, 4), (64, 32, 8), (256, 192, 16), (1024, 896, 32)])
def test_girth_at_least_six(n, k, z):
    code = construct_qc(n, k, z, seed=1)
    assert not has_four_cycle(code.H)
    if n <= 256:
        assert tanner_girth(code.H) >= 6


def test_girth_search_on_known_graphs():
    four = np.array([[1, 1], [1, 1]])
    six = np.array([[1, 1, 0], [0, 1, 1], [1, 0, 1]])
    tree = np.array([[1, 1, 0], [0, 0, 1]])
    assert tanner_girth(four) == 4
    assert tanner_girth(six) == 6
    assert tanner_girth(tree, limit=12) == 14


def test_encoding_zero_and_parity(small, rng):
    assert not encode_ldpc(np.zeros(16, dtype=np.uint8), small).any()
    msgs = rng.integers(0, 2, size=(50, 16))
    x = encode_ldpc(msgs, small)
    assert not syndrome(x, small).any()
    assert np.array_equal(x[:, small.info_positions], msgs)
    with pytest.raises(ValueError):
        encode_ldpc(np.zeros(15), small)


def test_encoding_matches_exhaustive_solver(small, rng):
    # the unique codeword with the message on the info positions, by brute force
    H = small.H.toarray().astype(int)
    info = small.info_positions
    rest = np.setdiff1d(np.arange(32), info)
    cand = np.array(list(itertools.product((0, 1), repeat=rest.size)))
    for _ in range(3):
        msg = rng.integers(0, 2, size=16)
        x = np.zeros((cand.shape[0], 32), dtype=int)
        x[:, info] = msg
        x[:, rest] = cand
        ok = ~((x @ H.T) % 2).any(axis=1)
        assert ok.sum() == 1
        assert np.array_equal(encode_ldpc(msg, small), x[ok][0])


def test_rank_deficiency_reported():
    proto = np.array([[0, 0], [0, 0]])  # duplicate block rows
    with pytest.raises(LdpcConstructionError):
        QcLdpcCode(proto, 2, 3)


def test_zero_syndrome_needs_no_iterations(small):
    x, ok, it = bitflip_decode(np.zeros(32, dtype=np.uint8), small)
    assert ok and it == 0 and not x.any()


def test_every_single_error_corrected(small, rng):
    cw = encode_ldpc(rng.integers(0, 2, size=16), small)
    noisy = np.repeat(cw[None, :], 32, axis=0)
    noisy[np.arange(32), np.arange(32)] ^= 1
    x, ok, it = bitflip_decode(noisy, small)
    assert ok.all()
    assert np.array_equal(x, np.repeat(cw[None, :], 32, axis=0))
    assert np.all(it == 1)


def test_termination_contract(small, rng):
    noisy = rng.integers(0, 2, size=(40, 32)).astype(np.uint8)
    x, ok, it = bitflip_decode(noisy, small, max_iter=3)
    assert np.all(it <= 3)
    assert np.array_equal(ok, ~syndrome(x, small).any(axis=1))
    assert not ok.all()
    with pytest.raises(ValueError):
        bitflip_decode(noisy, small, max_iter=0)


@given(st.integers(0, 2**31 - 1))
def test_converged_outputs_are_codewords(seed):
    code = construct_qc(32, 16, 4, seed=0)
    rng = np.random.default_rng(seed)
    cw = encode_ldpc(rng.integers(0, 2, size=16), code)
    flips = rng.random(32) < 0.05
    x, ok, it = bitflip_decode(cw ^ flips.astype(np.uint8), code)
    assert it <= 15
    if ok:
        assert not syndrome(x, code).any()


def test_tie_goes_to_lowest_index():
    # two variables in identical single checks: both counts equal, index 0 flips
    code = QcLdpcCode(np.array([[0, 0]]), 1, 1)
    x, ok, it = bitflip_decode(np.array([1, 0], dtype=np.uint8), code)
    assert x.tolist() == [0, 0] and ok and it == 1


def test_prototype_roundtrip(tmp_path, small):
    p = tmp_path / "proto.txt"
    save_prototype(p, small)
    assert p.read_text().splitlines()[0] == "# circulant=4 k_bits=16"
    back = load_prototype(p)
    assert np.array_equal(back.prototype, small.prototype) and back.k_bits == 16
    assert (back.H != small.H).nnz == 0
