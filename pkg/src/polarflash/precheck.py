"""Decoder selection from the estimated raw error probability of a page.

The channel condition is estimated from the tracked program/erase count
through the wear model, compared against two thresholds, and the cheapest
adequate decoder is run.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .binary_sc import binary_sc_decode
from .boundary_opt import Boundaries
from .flash_channel import FlashModel, WearState, degrade, hard_boundaries, raw_error_probability
from .llr_engine import (SENSES_BINARY, channel_llrs_binary, channel_llrs_pure_soft,
                         channel_llrs_quantized, quantized_llr_table)
from .mapping import MappingScheme
from .polar import PolarCode, sc_decode


class DecoderKind(enum.IntEnum):
    BINARY_INPUT = 0
    QUANTIZED_SOFT = 1
    PURE_SOFT = 2

    @property
    def short(self) -> str:
        return {0: "binary", 1: "quantized", 2: "pure"}[int(self)]

    @classmethod
    def from_short(cls, name: str) -> "DecoderKind":
        return {"binary": cls.BINARY_INPUT, "quantized": cls.QUANTIZED_SOFT, "pure": cls.PURE_SOFT}[name]


@dataclass(frozen=True)
class PrecheckThresholds:
    # FER ~1e-2 crossings of the (1024, 896) desk sweep, see scripts/calibrate_precheck.py
    t_binary_max: float = 3e-3
    t_quantized_max: float = 1.7e-2

    def __post_init__(self):
        if not 0 < self.t_binary_max < self.t_quantized_max < 1:
            raise ValueError("need 0 < t_binary_max < t_quantized_max < 1")


def estimate_pe(model: FlashModel, wear: WearState) -> float:
    return raw_error_probability(degrade(model, wear)).state_error_rate


def select_decoder(p_e: float, thresholds: PrecheckThresholds) -> DecoderKind:
    if p_e <= thresholds.t_binary_max:
        return DecoderKind.BINARY_INPUT
    if p_e <= thresholds.t_quantized_max:
        return DecoderKind.QUANTIZED_SOFT
    return DecoderKind.PURE_SOFT


def front_end(voltages, kind: DecoderKind, model: FlashModel, boundaries: Boundaries | None,
              mapping: MappingScheme, table=None):
    """Decoder inputs for a page (or batch of pages) and sense operations per cell.

    Pure-soft reads are exact analog reads and report ``nan`` senses.
    """
    if kind is DecoderKind.BINARY_INPUT:
        refs = boundaries.hard_refs if boundaries is not None else hard_boundaries(model)
        return channel_llrs_binary(voltages, refs, mapping), float(SENSES_BINARY)
    if kind is DecoderKind.QUANTIZED_SOFT:
        if table is None:
            if boundaries is None:
                raise ValueError("quantized-soft decoding needs boundaries")
            table = quantized_llr_table(boundaries, model, mapping)
        return channel_llrs_quantized(voltages, table), float(len(table.references))
    return channel_llrs_pure_soft(voltages, model, mapping), float("nan")


def run_decoder(kind: DecoderKind, llrs, code: PolarCode) -> np.ndarray:
    if kind is DecoderKind.BINARY_INPUT:
        return binary_sc_decode(llrs, code)
    return sc_decode(llrs, code)[0]


@dataclass(frozen=True)
class PageDecodeResult:
    u_hat: np.ndarray
    kind: DecoderKind
    sense_ops: float


def decode_page(voltages, model: FlashModel, wear: WearState, thresholds: PrecheckThresholds,
                code: PolarCode, boundaries: Boundaries, mapping: MappingScheme,
                force: DecoderKind | None = None) -> PageDecodeResult:
    """Pre-check, front-end and decode one page of ``N/2`` cells.

    ``model`` is the fresh-cell model; the wear-degraded model drives both
    the selection and the LLR computation.  ``sense_ops`` is the total over
    the page (``nan`` for exact reads).
    """
    v = np.asarray(voltages, dtype=float)
    if v.shape[-1] * 2 != code.n_bits:
        raise ValueError(f"page has {v.shape[-1]} cells, code needs {code.n_bits // 2}")
    worn = degrade(model, wear)
    kind = force if force is not None else select_decoder(estimate_pe(model, wear), thresholds)
    llrs, per_cell = front_end(v, kind, worn, boundaries, mapping)
    return PageDecodeResult(run_decoder(kind, llrs, code), kind, per_cell * v.shape[-1])


def selection_table(model: FlashModel, thresholds: PrecheckThresholds, pe_cycles, decay=0.13):
    rows = []
    for c in pe_cycles:
        wear = WearState(int(c), decay)
        p = estimate_pe(model, wear)
        rows.append((int(c), wear.sigma_factor, p, select_decoder(p, thresholds)))
    return rows
