"""MLC NAND cell model: four Gaussian threshold-voltage states.

Programming a cell draws one voltage from the Gaussian of its target state;
sensing compares that voltage against reference voltages.  Wear widens every
state by a fixed SNR loss per thousand program/erase cycles.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import log_ndtr, ndtr

# state means (V) and sigma multipliers of the 2-bit/cell reference model
NAND_MEANS = (0.0, 3.25, 4.55, 6.5)
NAND_SIGMA_MULTIPLIERS = (2.0, 1.0, 1.0, 1.4)


class DegenerateModelError(ValueError):
    """Raised when two adjacent states cannot be separated."""


@dataclass(frozen=True)
class GaussianState:
    mean: float
    sigma: float
    state_index: int

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if self.state_index not in range(4):
            raise ValueError(f"state_index must be in 0..3, got {self.state_index}")

    def pdf(self, x):
        z = (np.asarray(x, dtype=float) - self.mean) / self.sigma
        return np.exp(-0.5 * z * z) / (math.sqrt(2 * math.pi) * self.sigma)

    def logpdf(self, x):
        z = (np.asarray(x, dtype=float) - self.mean) / self.sigma
        return -0.5 * z * z - math.log(math.sqrt(2 * math.pi) * self.sigma)


@dataclass(frozen=True)
class FlashModel:
    """Four Gaussian voltage states ordered by mean."""

    states: tuple[GaussianState, ...]
    label: str = ""

    def __post_init__(self):
        if len(self.states) != 4:
            raise ValueError(f"expected 4 states, got {len(self.states)}")
        if [s.state_index for s in self.states] != [0, 1, 2, 3]:
            raise ValueError("states must be ordered by state_index 0..3")
        means = [s.mean for s in self.states]
        if any(b <= a for a, b in zip(means, means[1:])):
            raise DegenerateModelError(f"means must be strictly increasing, got {means}")

    @classmethod
    def from_params(cls, means, sigmas, label=""):
        return cls(
            tuple(GaussianState(float(m), float(s), i) for i, (m, s) in enumerate(zip(means, sigmas))),
            label,
        )

    @classmethod
    def uniform(cls, spacing: float, sigma: float) -> "FlashModel":
        """Means V, 2V, 3V, 4V with a shared sigma."""
        return cls.from_params([spacing * (i + 1) for i in range(4)], [sigma] * 4,
                               label=f"uniform(V={spacing:g},sigma={sigma:g})")

    @classmethod
    def nand_mlc(cls, sigma: float, means=NAND_MEANS, multipliers=NAND_SIGMA_MULTIPLIERS) -> "FlashModel":
        """Reference MLC model: erase state at 0 V, program states at 3.25/4.55/6.5 V."""
        return cls.from_params(means, [m * sigma for m in multipliers], label=f"nand_mlc(sigma={sigma:g})")

    @property
    def means(self) -> np.ndarray:
        return np.array([s.mean for s in self.states])

    @property
    def sigmas(self) -> np.ndarray:
        return np.array([s.sigma for s in self.states])

    def pdf(self, x) -> np.ndarray:
        """PDF of every state at ``x``; shape ``x.shape + (4,)``."""
        x = np.asarray(x, dtype=float)[..., None]
        z = (x - self.means) / self.sigmas
        return np.exp(-0.5 * z * z) / (math.sqrt(2 * math.pi) * self.sigmas)

    def logpdf(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)[..., None]
        z = (x - self.means) / self.sigmas
        return -0.5 * z * z - np.log(math.sqrt(2 * math.pi) * self.sigmas)

    def transformed(self, shift: float = 0.0, scale: float = 1.0) -> "FlashModel":
        """Affine image ``scale * v + shift`` of the voltage axis."""
        return FlashModel.from_params(self.means * scale + shift, self.sigmas * scale, self.label)


@dataclass(frozen=True)
class WearState:
    pe_cycles: int = 0
    snr_decay_db_per_kcycle: float = 0.13

    def __post_init__(self):
        if self.pe_cycles < 0:
            raise ValueError("pe_cycles must be >= 0")
        if self.snr_decay_db_per_kcycle < 0:
            raise ValueError("decay rate must be >= 0")

    @property
    def sigma_factor(self) -> float:
        db = self.snr_decay_db_per_kcycle * self.pe_cycles / 1000.0
        return 10.0 ** (db / 20.0)


def program(symbol_state, model: FlashModel, rng: np.random.Generator):
    """Program cells to ``symbol_state`` (scalar or array) and return their voltages."""
    s = np.asarray(symbol_state)
    if np.any((s < 0) | (s > 3)):
        raise ValueError("symbol_state must be in 0..3")
    v = model.means[s] + model.sigmas[s] * rng.standard_normal(s.shape)
    return float(v) if v.ndim == 0 else v


def pdf_intersection(mu_a: float, sigma_a: float, mu_b: float, sigma_b: float) -> float:
    """Abscissa in (mu_a, mu_b) where the two Gaussian PDFs are equal."""
    if not mu_a < mu_b:
        raise DegenerateModelError(f"means must satisfy mu_a < mu_b, got {mu_a}, {mu_b}")
    return _log_ratio_root(mu_a, sigma_a, mu_b, sigma_b, 0.0)


def _log_ratio_root(mu_a, sigma_a, mu_b, sigma_b, log_ratio):
    """Root in (mu_a, mu_b) of log p_a(x) - log p_b(x) = log_ratio.

    Multiplying through by 2 sa^2 sb^2 gives the quadratic
    sa^2 (x-mu_b)^2 - sb^2 (x-mu_a)^2 = 2 sa^2 sb^2 (log(sa/sb) + log_ratio).
    Returns None when no root lies strictly inside the interval.
    """
    va, vb = sigma_a * sigma_a, sigma_b * sigma_b
    rhs = 2 * va * vb * (math.log(sigma_a / sigma_b) + log_ratio)
    a = va - vb
    b = -2 * (va * mu_b - vb * mu_a)
    c = va * mu_b * mu_b - vb * mu_a * mu_a - rhs
    width = mu_b - mu_a
    if abs(a) <= 1e-12 * max(va, vb):
        roots = [-c / b]
    else:
        disc = b * b - 4 * a * c
        if disc < 0:
            return None
        sq = math.sqrt(disc)
        # numerically stable pair
        q = -0.5 * (b + math.copysign(sq, b))
        roots = [q / a, c / q] if q != 0 else [-b / (2 * a)]
    inside = [r for r in roots if mu_a - 1e-12 * width < r < mu_b + 1e-12 * width]
    if not inside:
        return None
    return min(inside, key=lambda r: abs(r - 0.5 * (mu_a + mu_b)))


def hard_boundaries(model: FlashModel) -> np.ndarray:
    """PDF intersections [R1, R2, R3] between adjacent states."""
    mu, sg = model.means, model.sigmas
    return np.array([pdf_intersection(mu[i], sg[i], mu[i + 1], sg[i + 1]) for i in range(3)])


def gaussian_mass(lo, hi, mean, sigma):
    """P(lo <= V < hi) for V ~ N(mean, sigma^2), accurate in both tails."""
    zl = (np.asarray(lo, dtype=float) - mean) / sigma
    zh = (np.asarray(hi, dtype=float) - mean) / sigma
    upper = zl > 0
    # use the survival function on the upper side to keep tail precision
    return np.where(upper, ndtr(-zl) - ndtr(-zh), ndtr(zh) - ndtr(zl))


def log_gaussian_mass(lo, hi, mean, sigma):
    """log P(lo <= V < hi); finite wherever the mass is representable in log space."""
    zl = (np.asarray(lo, dtype=float) - mean) / sigma
    zh = (np.asarray(hi, dtype=float) - mean) / sigma
    upper = zl > 0
    # reflect the upper side so both ends sit in the lower tail
    a = np.where(upper, -zh, zl)
    b = np.where(upper, -zl, zh)
    with np.errstate(divide="ignore", invalid="ignore"):
        lb, la = log_ndtr(b), log_ndtr(a)
        out = lb + np.log1p(-np.exp(la - lb))
    return np.where(b <= a, -np.inf, out)


def region_masses(references, model: FlashModel) -> np.ndarray:
    """Probability mass of each state in each region cut by ``references``.

    Returns an array of shape ``(4, len(references) + 1)``; region ``j`` is
    ``[ref[j-1], ref[j])`` with infinite outer limits.
    """
    refs = np.asarray(references, dtype=float)
    edges = np.concatenate(([-np.inf], refs, [np.inf]))
    lo, hi = edges[:-1], edges[1:]
    return np.stack([gaussian_mass(lo, hi, s.mean, s.sigma) for s in model.states])


@dataclass(frozen=True)
class RawErrorReport:
    per_state: np.ndarray
    state_error_rate: float
    bit_error_rate: float | None = None
    transition: np.ndarray = field(default=None, repr=False)


def raw_error_probability(model: FlashModel, mapping=None) -> RawErrorReport:
    """Hard-decision raw error probabilities.

    ``per_state[k]`` is the probability that a cell programmed to state ``k``
    is sensed outside its own hard-decision region (one tail for the outer
    states, two for the middle ones).  ``state_error_rate`` averages over
    equiprobable states.  With a ``mapping``, ``bit_error_rate`` is the
    expected fraction of wrong bits per cell.
    """
    trans = region_masses(hard_boundaries(model), model)
    # 1 - diag loses precision for tiny errors; sum the off-diagonal tails
    off = ~np.eye(4, dtype=bool)
    per_state = np.clip(np.where(off, trans, 0.0).sum(axis=1), 0.0, 1.0)
    ber = None
    if mapping is not None:
        dist = mapping.distance_matrix()
        ber = float(np.sum(trans * dist) / 4.0 / 2.0)
    return RawErrorReport(per_state, float(per_state.mean()), ber, trans)


def degrade(model: FlashModel, wear: WearState) -> FlashModel:
    """Widen every state for ``wear``; means stay fixed."""
    f = wear.sigma_factor
    if f == 1.0:
        return model
    return FlashModel.from_params(model.means, model.sigmas * f, model.label)


def sense_compare(voltage, reference):
    """Hard result of one sensing operation: 1 iff voltage >= reference."""
    out = np.asarray(voltage) >= np.asarray(reference)
    return int(out) if out.ndim == 0 else out.astype(np.uint8)


def hard_decide_states(voltages, model: FlashModel) -> np.ndarray:
    """State index chosen by the three hard-decision references."""
    refs = hard_boundaries(model)
    return np.searchsorted(refs, np.asarray(voltages), side="right")
