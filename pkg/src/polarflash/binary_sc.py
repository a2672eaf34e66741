"""Bit-exact model of the binary-input SC decoder.

LLRs are held in 2-bit two's complement (``Tc2``): 00 = 0, 01 = +1,
11 = -1.  The pattern 10 (-2) is excluded; the Type I PE saturates +-2 to
+-1.  Both PEs are written as Boolean functions of the operand bits and
work unchanged on Python ints or numpy bit-plane arrays.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .polar import PeCounter, PolarCode, bit_reversal

_ENCODE = {0: (0, 0), 1: (0, 1), -1: (1, 1)}
_DECODE = {v: k for k, v in _ENCODE.items()}


class InvalidTc2Error(ValueError):
    pass


@dataclass(frozen=True)
class Tc2:
    msb: int
    lsb: int

    def __post_init__(self):
        if (self.msb, self.lsb) not in _DECODE:
            raise InvalidTc2Error(f"bit pattern {self.msb}{self.lsb} is not a valid Tc2 word")

    @classmethod
    def from_value(cls, value: int) -> "Tc2":
        return cls(*_ENCODE[int(value)])

    @property
    def value(self) -> int:
        return _DECODE[(self.msb, self.lsb)]

    def __str__(self):
        return f"{self.msb}{self.lsb}"


ZERO, PLUS, MINUS = Tc2(0, 0), Tc2(0, 1), Tc2(1, 1)


def _not(a):
    return 1 ^ a


def type1_bits(u, xm, xl, ym, yl):
    """Z = X + Y (u=0) or -X + Y (u=1), saturated to {-1, 0, 1}.

    Sum-of-products forms with the 10 input pattern as a don't-care.
    """
    nu = _not(u)
    z0m = (xm & ym) | (xm & _not(yl)) | (ym & _not(xl))
    z0l = (xm & ym) | (xl & _not(yl)) | (yl & _not(xl)) | (yl & _not(xm) & _not(ym))
    z1m = (ym & _not(xm)) | (xl & _not(xm) & _not(yl))
    z1l = (xl & _not(yl)) | (xm & _not(ym)) | (yl & _not(xl)) | (ym & _not(xm))
    return (nu & z0m) | (u & z1m), (nu & z0l) | (u & z1l)


def type2_bits(xm, xl, ym, yl):
    """Sign product: MSB is an XOR, LSB fixed to 1, zero if either input is zero."""
    nonzero = xl & yl
    return (xm ^ ym) & nonzero, nonzero


def _check(*words: Tc2):
    for w in words:
        if not isinstance(w, Tc2):
            raise InvalidTc2Error(f"expected Tc2, got {w!r}")


def type1_pe(u_prev: int, x: Tc2, y: Tc2) -> Tc2:
    _check(x, y)
    if u_prev not in (0, 1):
        raise ValueError("u_prev must be a bit")
    return Tc2(*type1_bits(u_prev, x.msb, x.lsb, y.msb, y.lsb))


def type2_pe(x: Tc2, y: Tc2) -> Tc2:
    _check(x, y)
    return Tc2(*type2_bits(x.msb, x.lsb, y.msb, y.lsb))


# truth tables in two's complement: (u, X, Y) -> Z
TYPE1_TABLE = {
    (0, "11", "11"): "11", (0, "11", "00"): "11", (0, "11", "01"): "00",
    (0, "00", "11"): "11", (0, "00", "00"): "00", (0, "00", "01"): "01",
    (0, "01", "11"): "00", (0, "01", "00"): "01", (0, "01", "01"): "01",
    (1, "11", "11"): "00", (1, "11", "00"): "01", (1, "11", "01"): "01",
    (1, "00", "11"): "11", (1, "00", "00"): "00", (1, "00", "01"): "01",
    (1, "01", "11"): "11", (1, "01", "00"): "11", (1, "01", "01"): "00",
}
# (X, Y) -> Z on the full {0, +1, -1} alphabet
TYPE2_TABLE = {
    ("11", "11"): "01", ("11", "01"): "11", ("01", "01"): "01", ("01", "11"): "11",
    ("00", "00"): "00", ("00", "01"): "00", ("00", "11"): "00",
    ("01", "00"): "00", ("11", "00"): "00",
}


def _word(s: str) -> Tc2:
    return Tc2(int(s[0]), int(s[1]))


def type1_pe_lookup(u_prev: int, x: Tc2, y: Tc2) -> Tc2:
    _check(x, y)
    return _word(TYPE1_TABLE[(u_prev, str(x), str(y))])


def type2_pe_lookup(x: Tc2, y: Tc2) -> Tc2:
    _check(x, y)
    return _word(TYPE2_TABLE[(str(x), str(y))])


def to_bitplanes(values):
    """Tc2 bit planes (msb, lsb) of integer values in {-1, 0, 1}."""
    v = np.asarray(values)
    if np.any((v < -1) | (v > 1)):
        raise InvalidTc2Error("values must lie in {-1, 0, 1}")
    return (v < 0).astype(np.uint8), (v != 0).astype(np.uint8)


def from_bitplanes(msb, lsb):
    m = np.asarray(msb, dtype=np.int8)
    l = np.asarray(lsb, dtype=np.int8)
    return np.where(l == 0, 0, 1 - 2 * m).astype(np.int8)


class _Decoder:
    def __init__(self, frozen, counter, check, trace):
        self.frozen = frozen
        self.counter = counter
        self.check = check
        self.trace = trace

    def _guard(self, m, l):
        if self.check and np.any((m == 1) & (l == 0)):
            raise InvalidTc2Error("pattern 10 produced inside the decoder")

    def node(self, m, l, lo):
        n = m.shape[1]
        if n == 1:
            # value -1 decides 1; 0 and +1 decide 0, so the decision is the MSB
            dec = np.zeros(m.shape[0], dtype=np.uint8) if self.frozen[lo] else m[:, 0].copy()
            self.u[:, lo] = dec
            if self.trace is not None:
                self.trace.append(("leaf", lo, 1, from_bitplanes(m[0], l[0]), int(dec[0])))
            return dec[:, None]
        h = n // 2
        am, al, bm, bl = m[:, :h], l[:, :h], m[:, h:], l[:, h:]
        fm, fl = type2_bits(am, al, bm, bl)
        self._guard(fm, fl)
        if self.counter is not None:
            self.counter.type2 += h
        if self.trace is not None:
            self.trace.append(("type2", lo, n, from_bitplanes(fm[0], fl[0]), None))
        x1 = self.node(fm, fl, lo)
        gm, gl = type1_bits(x1, am, al, bm, bl)
        self._guard(gm, gl)
        if self.counter is not None:
            self.counter.type1 += h
        if self.trace is not None:
            self.trace.append(("type1", lo + h, n, from_bitplanes(gm[0], gl[0]), None))
        x2 = self.node(gm, gl, lo + h)
        return np.concatenate((x1 ^ x2, x2), axis=1)

    def run(self, hard_llrs):
        v = np.asarray(hard_llrs)
        single = v.ndim == 1
        v = np.atleast_2d(v)
        v = v[:, bit_reversal(v.shape[1])]
        m, l = to_bitplanes(v)
        self.u = np.empty(v.shape, dtype=np.uint8)
        self.node(m, l, 0)
        return self.u[0] if single else self.u


def binary_sc_decode(hard_llrs, code: PolarCode, counter: PeCounter | None = None,
                     check: bool = False) -> np.ndarray:
    """SC decoding with 2-bit PEs.

    ``hard_llrs`` holds +1/-1 channel values (0 is accepted too), shape
    ``(N,)`` or ``(B, N)``.  Returns the estimated source word(s).  With
    ``check`` every intermediate word is verified not to be pattern 10.
    """
    if np.shape(hard_llrs)[-1] != code.n_bits:
        raise ValueError(f"expected {code.n_bits} inputs, got {np.shape(hard_llrs)[-1]}")
    return _Decoder(code.frozen_mask, counter, check, None).run(hard_llrs)


def trace_binary_sc(hard_llrs, code: PolarCode) -> str:
    """Text dump of every PE output word for one frame, in evaluation order."""
    trace = []
    u = _Decoder(code.frozen_mask, None, True, trace).run(np.asarray(hard_llrs)[None, :])
    lines = [f"# binary SC trace N={code.n_bits} K={code.k_bits}",
             "# kind first_leaf node_size values(Tc2) decision"]
    for kind, lo, size, vals, dec in trace:
        words = " ".join(str(Tc2.from_value(int(x))) for x in vals)
        lines.append(f"{kind} {lo} {size} {words}" + ("" if dec is None else f" -> {dec}"))
    lines.append("u_hat " + "".join(str(int(b)) for b in u[0]))
    return "\n".join(lines) + "\n"
