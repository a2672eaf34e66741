"""Operation counts of the compared decoders (comparisons count as additions)."""
from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class OpCount:
    label: str
    additions: int
    xors: int = 0
    per_iteration: int | None = None

    def __post_init__(self):
        if self.additions < 0 or self.xors < 0:
            raise ValueError("counts must be non-negative")


def _log2(n: int) -> int:
    m = n.bit_length() - 1
    if n < 1 or 1 << m != n:
        raise ValueError(f"N must be a power of 2, got {n}")
    return m


def sc_ops(n: int) -> OpCount:
    """Min-sum SC: N/2 log N Type I additions plus N/2 log N Type II comparisons."""
    nl = n * _log2(n)
    return OpCount("sc", nl, nl // 2)


def binary_sc_ops(n: int) -> OpCount:
    nl = n * _log2(n)
    return OpCount("binary_sc", nl // 2, nl // 2)


def lbp_ops(n: int, k: int, d_v: int, d_c: int, iters: int) -> OpCount:
    """Layered BP (min-sum) LDPC: (N-K)(2 d_c + 1) + 2 N d_v per iteration."""
    if min(n, d_v, d_c) <= 0 or not 0 <= k < n or iters < 0:
        raise ValueError("invalid LDPC parameters")
    per = (n - k) * (2 * d_c + 1) + 2 * n * d_v
    return OpCount("lbp", iters * per, per_iteration=per)


def bitflip_ops(n: int, iters: int) -> OpCount:
    """Worst case of the bit-flipping search: N - 1 comparisons per iteration."""
    if n <= 0 or iters < 0:
        raise ValueError("invalid bit-flipping parameters")
    return OpCount("bitflip", iters * (n - 1), per_iteration=n - 1)


def comparison_table(n=8192, k=7372, d_v=4, d_c=30, iters=20) -> list[OpCount]:
    return [binary_sc_ops(n), bitflip_ops(n, iters), sc_ops(n), lbp_ops(n, k, d_v, d_c, iters)]


def predicted_pe_activations(n: int) -> int:
    """Type I (and separately Type II) activations per decoded frame."""
    return n // 2 * _log2(n)

