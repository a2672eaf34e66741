"""Decoder front-ends: sensed voltages to per-bit LLRs.

Three read modes are supported:

* pure-soft: the exact analog voltage, LLRs from the state PDFs;
* quantized-soft: the region index between reference voltages, LLRs from
  Gaussian region masses;
* binary-input: two hard comparisons per cell, giving the sign of the LLR
  only, as +1/-1.

All LLRs are ``log P(bit=0) / P(bit=1)`` and are returned with a trailing
axis of size 2 ordered (MSB, LSB).  ``channel_llrs_*`` helpers flatten a
page of cells into the ``(msb, lsb, msb, lsb, ...)`` bit order used by the
codes.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .boundary_opt import Boundaries
from .flash_channel import FlashModel, log_gaussian_mass, sense_compare
from .mapping import MappingScheme
from .polar import LLR_CLAMP


@dataclass(frozen=True)
class BitRoleSets:
    ones_set: tuple[int, ...]
    zeros_set: tuple[int, ...]

    def __post_init__(self):
        o, z = set(self.ones_set), set(self.zeros_set)
        if o & z or o | z != {0, 1, 2, 3} or not o or not z:
            raise ValueError("ones/zeros sets must partition the four states")


def bit_role_sets(mapping: MappingScheme) -> tuple[BitRoleSets, BitRoleSets]:
    """(MSB, LSB) role sets."""
    return tuple(BitRoleSets(mapping.ones_set(b), mapping.zeros_set(b)) for b in (0, 1))


def _llr_from_logs(log_terms, mapping: MappingScheme):
    """log(sum over zeros) - log(sum over ones) along the state axis, per bit."""
    out = []
    for b in (0, 1):
        z = logsumexp(log_terms[..., list(mapping.zeros_set(b))], axis=-1)
        o = logsumexp(log_terms[..., list(mapping.ones_set(b))], axis=-1)
        with np.errstate(invalid="ignore"):
            llr = z - o
        # both sides empty: no information
        llr = np.where(np.isneginf(z) & np.isneginf(o), 0.0, llr)
        out.append(np.clip(llr, -LLR_CLAMP, LLR_CLAMP))
    return np.stack(out, axis=-1)


def pure_soft_llr(voltage, model: FlashModel, mapping: MappingScheme) -> np.ndarray:
    """(MSB, LSB) LLRs of an exactly known voltage."""
    return _llr_from_logs(model.logpdf(voltage), mapping)


def channel_llrs_pure_soft(voltages, model, mapping) -> np.ndarray:
    llr = pure_soft_llr(voltages, model, mapping)
    return llr.reshape(llr.shape[:-2] + (-1,))


def sense_region(voltage, references) -> np.ndarray:
    """Region index of ``voltage`` among sorted references, one comparison per reference."""
    refs = np.asarray(references, dtype=float)
    v = np.asarray(voltage, dtype=float)
    hits = sense_compare(v[..., None], refs)
    return np.asarray(hits).sum(axis=-1)


@dataclass(frozen=True)
class QuantizedLlrTable:
    references: np.ndarray
    llrs: np.ndarray  # shape (len(references) + 1, 2): msb, lsb per region

    @property
    def n_regions(self) -> int:
        return self.llrs.shape[0]

    def lookup(self, voltages) -> np.ndarray:
        return self.llrs[sense_region(voltages, self.references)]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["region", "lower", "upper", "llr_msb", "llr_lsb"])
        edges = np.concatenate(([-np.inf], self.references, [np.inf]))
        for j, (m, l) in enumerate(self.llrs):
            w.writerow([j, repr(float(edges[j])), repr(float(edges[j + 1])), repr(float(m)), repr(float(l))])
        return buf.getvalue()


def _as_references(boundaries) -> np.ndarray:
    if isinstance(boundaries, Boundaries):
        return boundaries.references
    refs = np.asarray(boundaries, dtype=float)
    if refs.ndim != 1 or np.any(np.diff(refs) <= 0):
        raise ValueError("references must be a strictly increasing 1-D sequence")
    return refs


def quantized_llr_table(boundaries, model: FlashModel, mapping: MappingScheme) -> QuantizedLlrTable:
    """Per-region LLRs from summed Gaussian region masses."""
    refs = _as_references(boundaries)
    edges = np.concatenate(([-np.inf], refs, [np.inf]))
    lo, hi = edges[:-1], edges[1:]
    log_mass = np.stack([log_gaussian_mass(lo, hi, s.mean, s.sigma) for s in model.states], axis=-1)
    return QuantizedLlrTable(refs, _llr_from_logs(log_mass, mapping))


def channel_llrs_quantized(voltages, table: QuantizedLlrTable) -> np.ndarray:
    llr = table.lookup(voltages)
    return llr.reshape(llr.shape[:-2] + (-1,))


def detect_state_two_step(voltage, hard_refs) -> np.ndarray:
    """State index from two hard reads: the middle reference, then the outer one on that side."""
    v0, v1, v2 = (float(r) for r in hard_refs)
    v = np.asarray(voltage, dtype=float)
    upper = sense_compare(v, v1)
    second = sense_compare(v, np.where(np.asarray(upper) == 1, v2, v0))
    return 2 * np.asarray(upper, dtype=np.int64) + np.asarray(second, dtype=np.int64)


def binary_llrs(voltage, hard_refs, mapping: MappingScheme) -> np.ndarray:
    """Sign-only LLRs (+1 for bit 0, -1 for bit 1) for (MSB, LSB)."""
    state = detect_state_two_step(voltage, hard_refs)
    bits = mapping.bit_table[state].astype(np.int8)
    return 1 - 2 * bits


def channel_llrs_binary(voltages, hard_refs, mapping) -> np.ndarray:
    llr = binary_llrs(voltages, hard_refs, mapping)
    return llr.reshape(llr.shape[:-2] + (-1,))


SENSES_BINARY = 2
