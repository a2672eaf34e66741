"""Assignments of 2-bit symbols to the four cell states.

A symbol is an ``(msb, lsb)`` pair.  The letters A=00, B=10, C=11, D=01
name symbols by their (MSB, LSB) column vectors, so ``"ABCD"`` is the Gray
assignment 00, 10, 11, 01 over states 0..3.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

LETTERS = {"A": (0, 0), "B": (1, 0), "C": (1, 1), "D": (0, 1)}
_LETTER_OF = {v: k for k, v in LETTERS.items()}

MSB, LSB = 0, 1


@dataclass(frozen=True)
class MappingScheme:
    symbols: tuple[tuple[int, int], ...]

    def __post_init__(self):
        syms = tuple(tuple(int(b) for b in s) for s in self.symbols)
        if len(syms) != 4 or any(len(s) != 2 or set(s) - {0, 1} for s in syms):
            raise ValueError(f"need four 2-bit symbols, got {self.symbols}")
        if len(set(syms)) != 4:
            raise ValueError(f"symbols must be distinct, got {self.symbols}")
        object.__setattr__(self, "symbols", syms)

    @classmethod
    def from_letters(cls, letters: str) -> "MappingScheme":
        return cls(tuple(LETTERS[c] for c in letters.upper()))

    @property
    def name(self) -> str:
        return "".join(_LETTER_OF[s] for s in self.symbols)

    @property
    def bit_table(self) -> np.ndarray:
        """``bit_table[state, bit]`` with bit 0 = MSB, 1 = LSB."""
        return np.array(self.symbols, dtype=np.uint8)

    @property
    def state_of_bits(self) -> np.ndarray:
        """Inverse lookup indexed by ``2*msb + lsb``."""
        inv = np.empty(4, dtype=np.int64)
        for k, (m, l) in enumerate(self.symbols):
            inv[2 * m + l] = k
        return inv

    def ones_set(self, bit: int) -> tuple[int, ...]:
        return tuple(k for k, s in enumerate(self.symbols) if s[bit] == 1)

    def zeros_set(self, bit: int) -> tuple[int, ...]:
        return tuple(k for k, s in enumerate(self.symbols) if s[bit] == 0)

    def distance_matrix(self) -> np.ndarray:
        t = self.bit_table
        return (t[:, None, :] != t[None, :, :]).sum(axis=2)

    def region_distances(self) -> tuple[int, int, int]:
        """Hamming distance across each of the three overlap regions."""
        d = self.distance_matrix()
        return tuple(int(d[i, i + 1]) for i in range(3))

    def transition_regions(self, bit: int) -> list[int]:
        """Overlap regions (0..2) across which ``bit`` changes value."""
        t = self.bit_table
        return [i for i in range(3) if t[i, bit] != t[i + 1, bit]]


def gray_scheme() -> MappingScheme:
    return MappingScheme.from_letters("ABCD")


def direct_scheme() -> MappingScheme:
    """Binary-counting assignment 00, 01, 10, 11."""
    return MappingScheme(((0, 0), (0, 1), (1, 0), (1, 1)))


def scheme_by_name(name: str) -> MappingScheme:
    if name == "gray":
        return gray_scheme()
    if name == "direct":
        return direct_scheme()
    return MappingScheme.from_letters(name)


def is_gray(scheme: MappingScheme) -> bool:
    return scheme.region_distances() == (1, 1, 1)


def count_changes(scheme: MappingScheme) -> int:
    """Adjacent-position bit changes summed over the MSB and LSB rows."""
    t = scheme.bit_table
    return int((t[1:] != t[:-1]).sum())


def enumerate_schemes() -> list[tuple[MappingScheme, int]]:
    out = []
    for perm in itertools.permutations("ABCD"):
        s = MappingScheme.from_letters("".join(perm))
        out.append((s, count_changes(s)))
    return out


@dataclass(frozen=True)
class RegionErrorProfile:
    p1: float
    p2: float
    p3: float

    def __post_init__(self):
        for p in (self.p1, self.p2, self.p3):
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"probabilities must lie in [0, 1], got {p}")

    def as_array(self) -> np.ndarray:
        return np.array([self.p1, self.p2, self.p3])


def expected_raw_bit_errors(scheme: MappingScheme, profile: RegionErrorProfile) -> float:
    return float(np.dot(scheme.region_distances(), profile.as_array()))


def states_from_bits(bits, scheme: MappingScheme) -> np.ndarray:
    """Pair consecutive bits (msb, lsb) of ``bits[..., N]`` into ``N/2`` states."""
    b = np.asarray(bits, dtype=np.int64)
    pairs = b.reshape(b.shape[:-1] + (-1, 2))
    return scheme.state_of_bits[2 * pairs[..., 0] + pairs[..., 1]]


def bits_from_states(states, scheme: MappingScheme) -> np.ndarray:
    s = np.asarray(states)
    return scheme.bit_table[s].reshape(s.shape[:-1] + (-1,))
