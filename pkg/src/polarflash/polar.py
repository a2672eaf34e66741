"""Polar codes: construction, encoding and min-sum successive cancellation.

The generator is Arikan's ``G_N = B_N F^{(x)n}`` (bit-reversal permutation
times the Kronecker power of ``F = [[1, 0], [1, 1]]``).  Because ``B_N``
commutes with ``F^{(x)n}``, encoding is a natural-order butterfly followed
by a bit-reversal of the output, and decoding bit-reverses the channel LLRs
before running the natural-order SC recursion.

Every array routine accepts a single frame ``(N,)`` or a batch ``(B, N)``.
LLRs use the convention ``log P(bit=0) / P(bit=1)``; a decision is 0 when
the LLR is >= 0.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

LLR_CLAMP = 1e3


def is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def bit_reversal(n: int) -> np.ndarray:
    m = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.int64)
    for b in range(m):
        rev |= ((idx >> b) & 1) << (m - 1 - b)
    return rev


@dataclass(frozen=True)
class PolarCode:
    n_bits: int
    k_bits: int
    frozen_set: tuple[int, ...]

    def __post_init__(self):
        if not is_power_of_two(self.n_bits):
            raise ValueError(f"N must be a power of 2, got {self.n_bits}")
        fs = tuple(sorted(int(i) for i in self.frozen_set))
        if len(set(fs)) != len(fs) or (fs and not 0 <= fs[0] <= fs[-1] < self.n_bits):
            raise ValueError("frozen_set must hold distinct positions in [0, N)")
        if len(fs) != self.n_bits - self.k_bits:
            raise ValueError(f"|frozen_set| = {len(fs)} but N - K = {self.n_bits - self.k_bits}")
        object.__setattr__(self, "frozen_set", fs)

    @property
    def frozen_mask(self) -> np.ndarray:
        m = np.zeros(self.n_bits, dtype=bool)
        m[list(self.frozen_set)] = True
        return m

    @property
    def info_positions(self) -> np.ndarray:
        return np.flatnonzero(~self.frozen_mask)

    @property
    def rate(self) -> float:
        return self.k_bits / self.n_bits

    def source_word(self, info_bits) -> np.ndarray:
        """Place ``K`` information bits (or a batch) at the information positions."""
        info = np.asarray(info_bits, dtype=np.uint8)
        u = np.zeros(info.shape[:-1] + (self.n_bits,), dtype=np.uint8)
        u[..., self.info_positions] = info
        return u


def polar_transform(u) -> np.ndarray:
    """``u G_N`` over GF(2) for any power-of-two length, no frozen-bit checks."""
    x = np.array(u, dtype=np.uint8, copy=True)
    n = x.shape[-1]
    h = n // 2
    while h >= 1:
        v = x.reshape(x.shape[:-1] + (n // (2 * h), 2, h))
        v[..., 0, :] ^= v[..., 1, :]
        h //= 2
    return x[..., bit_reversal(n)]


def encode(u, code: PolarCode) -> np.ndarray:
    u = np.asarray(u, dtype=np.uint8)
    if u.shape[-1] != code.n_bits:
        raise ValueError(f"source word length {u.shape[-1]} != N = {code.n_bits}")
    if np.any(u[..., code.frozen_mask]):
        raise ValueError("source word has nonzero frozen positions")
    return polar_transform(u)


def f_node(llr_a, llr_b):
    """Type II update: sign(a) sign(b) min(|a|, |b|), with sign(0) = 0."""
    return np.sign(llr_a) * np.sign(llr_b) * np.minimum(np.abs(llr_a), np.abs(llr_b))


def g_node(llr_a, llr_b, u_prev):
    """Type I update: (-1)^u_prev * a + b."""
    return np.where(np.asarray(u_prev) == 1, -np.asarray(llr_a), llr_a) + llr_b


@dataclass
class PeCounter:
    """Per-frame tally of Type I (g) and Type II (f) node evaluations."""

    type1: int = 0
    type2: int = 0


@dataclass
class _ScState:
    frozen: np.ndarray
    clip: float | None
    counter: PeCounter | None
    genie: np.ndarray | None
    leaf: np.ndarray
    u: np.ndarray = field(default=None)


def _sc_node(llr, lo, st: _ScState):
    """Decode leaves [lo, lo + n) from ``llr`` (B, n); returns partial sums (B, n)."""
    n = llr.shape[1]
    if n == 1:
        l = llr[:, 0]
        st.leaf[:, lo] = l
        if st.frozen[lo]:
            dec = np.zeros(l.shape, dtype=np.uint8)
        else:
            dec = (l < 0).astype(np.uint8)
        st.u[:, lo] = dec
        fb = st.genie[:, lo] if st.genie is not None else dec
        return fb[:, None]
    h = n // 2
    a, b = llr[:, :h], llr[:, h:]
    left = f_node(a, b)
    if st.clip is not None:
        np.clip(left, -st.clip, st.clip, out=left)
    if st.counter is not None:
        st.counter.type2 += h
    x1 = _sc_node(left, lo, st)
    right = g_node(a, b, x1)
    if st.clip is not None:
        np.clip(right, -st.clip, st.clip, out=right)
    if st.counter is not None:
        st.counter.type1 += h
    x2 = _sc_node(right, lo + h, st)
    return np.concatenate((x1 ^ x2, x2), axis=1)


def _run_sc(channel_llrs, frozen, clip=None, counter=None, genie=None):
    llr = np.asarray(channel_llrs, dtype=float)
    single = llr.ndim == 1
    llr = np.atleast_2d(llr)
    n = llr.shape[1]
    llr = llr[:, bit_reversal(n)]
    if genie is not None:
        genie = np.atleast_2d(np.asarray(genie, dtype=np.uint8))
    st = _ScState(frozen=frozen, clip=clip, counter=counter, genie=genie,
                  leaf=np.empty(llr.shape), u=np.empty(llr.shape, dtype=np.uint8))
    _sc_node(llr, 0, st)
    return st, single


def sc_decode(channel_llrs, code: PolarCode, clip: float | None = None,
              counter: PeCounter | None = None):
    """Min-sum SC decoding.

    Parameters
    ----------
    channel_llrs : array_like, shape (N,) or (B, N)
        Channel LLRs, ``log P(0)/P(1)``.
    code : PolarCode
    clip : float, optional
        Saturate every f/g output to ``[-clip, clip]``.  With ``clip=1`` and
        ``+-1`` inputs this is the reference model of the 2-bit binary decoder.
    counter : PeCounter, optional
        Accumulates per-frame node evaluations.

    Returns
    -------
    u_hat, x_hat : ndarray of uint8
        Estimated source word and its re-encoding.
    """
    if np.shape(channel_llrs)[-1] != code.n_bits:
        raise ValueError(f"expected {code.n_bits} LLRs, got {np.shape(channel_llrs)[-1]}")
    st, single = _run_sc(channel_llrs, code.frozen_mask, clip, counter)
    u = st.u
    x = polar_transform(u)
    return (u[0], x[0]) if single else (u, x)


def genie_leaf_llrs(channel_llrs, true_u, n_bits: int) -> np.ndarray:
    """Bit-channel LLRs seen by SC when every earlier bit is fed back correctly."""
    st, single = _run_sc(channel_llrs, np.zeros(n_bits, dtype=bool), genie=true_u)
    return st.leaf[0] if single else st.leaf


class ConstructionError(RuntimeError):
    pass


def construct(n_bits: int, k_bits: int, design_model, mapping, trials: int = 20000,
              seed: int = 0, batch: int = 1000) -> PolarCode:
    """Genie-aided Monte Carlo construction over the flash channel.

    Random source words are transmitted through ``design_model`` with
    ``mapping`` and pure-soft LLRs; each bit channel's error frequency under
    genie feedback ranks the positions.  The ``N - K`` worst are frozen; ties
    are broken by the mean signed bit-channel LLR (less reliable first).
    """
    from .llr_engine import channel_llrs_pure_soft
    from .flash_channel import program
    from .mapping import states_from_bits

    if not is_power_of_two(n_bits):
        raise ValueError(f"N must be a power of 2, got {n_bits}")
    if not 0 <= k_bits <= n_bits:
        raise ValueError(f"K must lie in [0, N], got {k_bits}")
    if k_bits == n_bits:
        return PolarCode(n_bits, k_bits, ())
    if k_bits == 0:
        return PolarCode(n_bits, 0, tuple(range(n_bits)))
    if trials < 1:
        raise ValueError("trials must be positive")

    rng = np.random.default_rng(seed)
    errors = np.zeros(n_bits)
    reliability = np.zeros(n_bits)
    done = 0
    while done < trials:
        b = min(batch, trials - done)
        u = rng.integers(0, 2, size=(b, n_bits), dtype=np.uint8)
        x = polar_transform(u)
        v = program(states_from_bits(x, mapping), design_model, rng)
        leaf = genie_leaf_llrs(channel_llrs_pure_soft(v, design_model, mapping), u, n_bits)
        errors += ((leaf < 0).astype(np.uint8) != u).sum(axis=0)
        reliability += (leaf * (1.0 - 2.0 * u)).sum(axis=0)
        done += b
    if errors.sum() == 0:
        raise ConstructionError(
            f"no bit-channel errors in {trials} trials; increase trials or use a noisier design point")
    order = np.lexsort((reliability, -errors))
    return PolarCode(n_bits, k_bits, tuple(int(i) for i in order[: n_bits - k_bits]))


def save_frozen_set(path, code: PolarCode) -> None:
    lines = [f"# n_bits={code.n_bits} k_bits={code.k_bits}"]
    lines += [str(i) for i in code.frozen_set]
    Path(path).write_text("\n".join(lines) + "\n")


def load_frozen_set(path, n_bits: int | None = None) -> PolarCode:
    positions = []
    header_n = None
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            for tok in line[1:].split():
                if tok.startswith("n_bits="):
                    header_n = int(tok.split("=", 1)[1])
            continue
        positions.append(int(line))
    n = n_bits if n_bits is not None else header_n
    if n is None:
        raise ValueError("code length unknown: pass n_bits or keep the header line")
    if positions != sorted(positions):
        raise ValueError("frozen positions must be ascending")
    return PolarCode(n, n - len(positions), tuple(positions))
