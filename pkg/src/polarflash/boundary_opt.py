"""Soft-decision read references.

Two ways of placing the extra references around each hard-decision
boundary: a constant likelihood ratio between the two neighbouring states,
and per-bit (stepwise) maximisation of the mutual information between a
stored bit and the quantized read-out.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import ndtr

from .flash_channel import FlashModel, _log_ratio_root, hard_boundaries, region_masses
from .mapping import LSB, MSB, MappingScheme

GRID_STEP = 1e-2
REFINE_TOL = 1e-4
_MAX_SWEEPS = 50


class BoundaryError(ValueError):
    pass


@dataclass(frozen=True)
class Boundaries:
    """Hard references (PDF intersections) plus soft references."""

    hard_refs: tuple[float, ...]
    soft_refs: tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "hard_refs", tuple(float(v) for v in self.hard_refs))
        object.__setattr__(self, "soft_refs", tuple(float(v) for v in self.soft_refs))
        refs = self.references
        if np.any(np.diff(refs) <= 0):
            raise BoundaryError(f"merged references must be strictly increasing: {refs}")

    @property
    def references(self) -> np.ndarray:
        return np.sort(np.array(self.hard_refs + self.soft_refs))

    def __len__(self):
        return len(self.hard_refs) + len(self.soft_refs)


@dataclass(frozen=True)
class DiscreteChannel:
    """Binary-input channel; ``transition[x, y] = P(Y=y | X=x)``."""

    transition: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.transition, dtype=float)
        if t.ndim != 2 or t.shape[0] != 2:
            raise ValueError(f"transition must have shape (2, M), got {t.shape}")
        if np.any(t < 0) or not np.allclose(t.sum(axis=1), 1.0, atol=1e-9, rtol=0):
            raise ValueError("rows must be probability vectors")
        object.__setattr__(self, "transition", t)


def binary_entropy_vec(probs) -> float:
    """Entropy in bits of a probability vector, with 0 log 0 = 0."""
    p = np.asarray(probs, dtype=float)
    if np.any(p < 0):
        raise ValueError("probabilities must be non-negative")
    if p.sum(axis=-1).max(initial=0.0) > 1 + 1e-9:
        raise ValueError("probabilities sum to more than 1")
    return _entropy(p)


def _entropy(p):
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(p > 0, -p * np.log2(p), 0.0)
    return terms.sum(axis=-1)


def mutual_information(ch: DiscreteChannel) -> float:
    """I(X;Y) in bits for equiprobable binary X."""
    t = ch.transition
    return float(_mi_rows(t[0], t[1]))


def _mi_rows(row0, row1):
    return _entropy(0.5 * (row0 + row1)) - 0.5 * _entropy(row0) - 0.5 * _entropy(row1)


# ---------------------------------------------------------------- constant ratio

def constant_ratio_boundaries(model: FlashModel, k: int, ratio: float) -> tuple[float, float]:
    """References around overlap ``k`` where the neighbouring PDFs have ratio ``ratio``.

    ``B_l`` satisfies p_k / p_{k+1} = R and ``B_r`` satisfies
    p_{k+1} / p_k = R; both are taken inside (mu_k, mu_{k+1}).
    """
    if k not in (0, 1, 2):
        raise ValueError(f"region index must be 0..2, got {k}")
    if not ratio >= 1:
        # below 1 the two references swap sides
        raise BoundaryError(f"ratio must be >= 1, got {ratio}")
    a, b = model.states[k], model.states[k + 1]
    lr = math.log(ratio)
    bl = _log_ratio_root(a.mean, a.sigma, b.mean, b.sigma, lr)
    br = _log_ratio_root(a.mean, a.sigma, b.mean, b.sigma, -lr)
    if bl is None or br is None:
        raise BoundaryError(f"ratio {ratio} has no solution between the means of states {k} and {k + 1}")
    return bl, br


def constant_ratio_scheme(model: FlashModel, ratio: float) -> Boundaries:
    """Nine-reference layout with constant-ratio soft references."""
    soft = [v for k in range(3) for v in constant_ratio_boundaries(model, k, ratio)]
    return Boundaries(tuple(hard_boundaries(model)), tuple(soft))


def hard_only(model: FlashModel) -> Boundaries:
    return Boundaries(tuple(hard_boundaries(model)))


# ---------------------------------------------------------------- per-bit channels

def bit_channel_matrix(masses, model: FlashModel, mapping: MappingScheme, bit: int, references):
    """Transition rows for one stored bit given per-state region masses.

    Regions that contain a state mean are confident outputs and are merged
    by the bit value of that state; every other region (inside an overlap)
    is its own output.  ``masses`` has shape ``(..., 4, R + 1)``.
    """
    refs = np.asarray(references, dtype=float)
    labels = _output_labels(model, mapping, bit, refs)
    n_out = labels.max() + 1
    onehot = np.zeros((refs.size + 1, n_out))
    onehot[np.arange(refs.size + 1), labels] = 1.0
    out = masses @ onehot
    t = mapping.bit_table[:, bit]
    row0 = out[..., t == 0, :].mean(axis=-2)
    row1 = out[..., t == 1, :].mean(axis=-2)
    return row0, row1


def _output_labels(model, mapping, bit, refs):
    region_of_mean = np.searchsorted(refs, model.means, side="right")
    t = mapping.bit_table[:, bit]
    labels = np.full(refs.size + 1, -1)
    for r, v in zip(region_of_mean, t):
        labels[r] = v
    nxt = 2
    for j in range(labels.size):
        if labels[j] < 0:
            labels[j] = nxt
            nxt += 1
    return labels


def bit_channel(model: FlashModel, mapping: MappingScheme, bit: int, references) -> DiscreteChannel:
    refs = np.sort(np.asarray(references, dtype=float))
    row0, row1 = bit_channel_matrix(region_masses(refs, model), model, mapping, bit, refs)
    return DiscreteChannel(np.vstack([row0, row1]))


def bit_mutual_information(model, mapping, bit, references) -> float:
    return mutual_information(bit_channel(model, mapping, bit, references))


def bit_references(boundaries: Boundaries, model: FlashModel, mapping: MappingScheme, bit: int) -> np.ndarray:
    """References of ``boundaries`` lying in the overlaps where ``bit`` changes."""
    mu = model.means
    keep = []
    for k in mapping.transition_regions(bit):
        keep += [v for v in boundaries.references if mu[k] < v < mu[k + 1]]
    return np.array(sorted(keep))


# ---------------------------------------------------------------- SMMI search

@dataclass(frozen=True)
class _Problem:
    model: FlashModel
    mapping: MappingScheme
    bit: int
    practical: bool


def _template(prob: _Problem, regions, hard) -> np.ndarray:
    """A reference list with the same per-overlap layout as any candidate.

    Candidates stay inside their search boxes, so the set of regions holding
    a state mean, and hence the output labelling, is fixed.
    """
    mu = prob.model.means
    refs = []
    for k in regions:
        refs += [0.5 * (mu[k] + hard[k]), 0.5 * (hard[k] + mu[k + 1])]
        if prob.practical:
            refs.append(hard[k])
    return np.sort(np.array(refs))


def _objective_batch(prob: _Problem, pairs, hard, k, ql, qr):
    """MI for many candidate (ql, qr) of overlap ``k`` with the other pairs fixed."""
    shape = np.broadcast(np.asarray(ql), np.asarray(qr)).shape
    cols = [np.broadcast_to(ql, shape), np.broadcast_to(qr, shape)]
    fixed = [hard[k]] if prob.practical else []
    for j, (a, b) in pairs.items():
        if j != k:
            fixed += [a, b] + ([hard[j]] if prob.practical else [])
    cols += [np.full(shape, v) for v in fixed]
    refs = np.sort(np.stack(cols, axis=-1), axis=-1)
    masses = _masses_many(refs, prob.model)
    template = _template(prob, sorted(pairs), hard)
    row0, row1 = bit_channel_matrix(masses, prob.model, prob.mapping, prob.bit, template)
    return _mi_rows(row0, row1)


def _masses_many(refs, model):
    """Region masses for a stack of sorted reference lists: shape (..., 4, R+1)."""
    z = (refs[..., None, :] - model.means[:, None]) / model.sigmas[:, None]
    pad = np.ones(z.shape[:-1] + (1,)) * np.inf
    ze = np.concatenate((-pad, z, pad), axis=-1)
    za, zb = ze[..., :-1], ze[..., 1:]
    with np.errstate(invalid="ignore"):
        return np.where(za > 0, ndtr(-za) - ndtr(-zb), ndtr(zb) - ndtr(za))


def _search_box(model, k, hard):
    mu = model.means
    return (mu[k], hard[k]), (hard[k], mu[k + 1])


def _grid(lo, hi, step):
    n = max(int(math.floor((hi - lo) / step + 1e-9)), 1)
    return lo + step * np.arange(n + 1)


def _grid_argmax(prob, pairs, hard, k, step, chunk=2_000_000):
    """Exhaustive search of overlap ``k``'s box on a square grid."""
    (l0, l1), (r0, r1) = _search_box(prob.model, k, hard)
    gl, gr = _grid(l0, l1, step), _grid(r0, r1, step)
    best, arg = -np.inf, None
    rows = max(1, chunk // gr.size)
    for i in range(0, gl.size, rows):
        mi = _objective_batch(prob, pairs, hard, k, gl[i:i + rows, None], gr[None, :])
        j = np.unravel_index(np.argmax(mi), mi.shape)
        if mi[j] > best:
            best, arg = float(mi[j]), (float(gl[i + j[0]]), float(gr[j[1]]))
    return arg, best


def _refine(prob, pairs, hard, k, start, step):
    """Coordinate-wise bounded line searches around a grid optimum."""
    (l0, l1), (r0, r1) = _search_box(prob.model, k, hard)
    obj = lambda a, b: float(_objective_batch(prob, pairs, hard, k, a, b))
    ql, qr = start
    cur = obj(ql, qr)
    for _ in range(_MAX_SWEEPS):
        old = (ql, qr)
        res = minimize_scalar(lambda v: -obj(v, qr), method="bounded",
                              bounds=(max(l0, ql - step), min(l1, ql + step)), options={"xatol": 1e-7})
        if -res.fun >= cur:
            ql, cur = float(res.x), -res.fun
        res = minimize_scalar(lambda v: -obj(ql, v), method="bounded",
                              bounds=(max(r0, qr - step), min(r1, qr + step)), options={"xatol": 1e-7})
        if -res.fun >= cur:
            qr, cur = float(res.x), -res.fun
        if max(abs(ql - old[0]), abs(qr - old[1])) < REFINE_TOL:
            break
    return ql, qr


def _smmi(model, mapping, bit, practical, step=GRID_STEP):
    hard = hard_boundaries(model)
    regions = mapping.transition_regions(bit)
    if not regions:
        raise BoundaryError(f"bit {bit} never changes between adjacent states")
    for k in regions:
        if not model.means[k] < hard[k] < model.means[k + 1]:
            raise BoundaryError(f"degenerate search interval in overlap {k}")
    prob = _Problem(model, mapping, bit, practical)
    pairs = {k: (float(hard[k]), float(hard[k])) for k in regions}
    for _ in range(_MAX_SWEEPS):
        moved = 0.0
        for k in regions:
            start, _ = _grid_argmax(prob, pairs, hard, k, step)
            new = _refine(prob, pairs, hard, k, start, step)
            moved = max(moved, abs(new[0] - pairs[k][0]), abs(new[1] - pairs[k][1]))
            pairs[k] = new
        if len(regions) == 1 or moved < REFINE_TOL:
            break
    return pairs


def smmi_pairs(model: FlashModel, mapping: MappingScheme, bit: int, practical: bool = False):
    """Optimised ``{overlap: (q_left, q_right)}`` for one stored bit."""
    return _smmi(model, mapping, bit, practical)


def smmi_lsb(model: FlashModel, mapping: MappingScheme, practical: bool = False) -> tuple[float, ...]:
    """(q3, q4) for the Gray map: the two LSB references around R2."""
    pairs = _smmi(model, mapping, LSB, practical)
    return tuple(v for k in sorted(pairs) for v in pairs[k])


def smmi_msb(model: FlashModel, mapping: MappingScheme, practical: bool = False) -> tuple[float, ...]:
    """(q1, q2, q5, q6) for the Gray map: MSB references around R1 and R3."""
    pairs = _smmi(model, mapping, MSB, practical)
    return tuple(v for k in sorted(pairs) for v in pairs[k])


def practical_smmi(model: FlashModel, mapping: MappingScheme) -> Boundaries:
    """Three hard references plus SMMI soft references (nine in total for Gray)."""
    hard = hard_boundaries(model)
    soft = list(smmi_lsb(model, mapping, practical=True)) + list(smmi_msb(model, mapping, practical=True))
    return Boundaries(tuple(hard), tuple(sorted(soft)))


def boundaries_for_scheme(scheme: str, model: FlashModel, mapping: MappingScheme, ratio: float = 2.0) -> Boundaries:
    if scheme == "smmi":
        return practical_smmi(model, mapping)
    if scheme == "ratio":
        return constant_ratio_scheme(model, ratio)
    if scheme == "hard":
        return hard_only(model)
    raise ValueError(f"unknown boundary scheme {scheme!r}")


def practical_bit_mi(boundaries: Boundaries, model: FlashModel, mapping: MappingScheme) -> dict[str, float]:
    """MI of the MSB and LSB channels formed by each bit's own references."""
    return {
        name: bit_mutual_information(model, mapping, bit, bit_references(boundaries, model, mapping, bit))
        for name, bit in (("msb", MSB), ("lsb", LSB))
    }
