"""Seeded Monte Carlo FER/BER sweeps over the flash channel.

Every frame draws its information bits and cell noise from its own stream
seeded by ``(seed, sweep point, frame index)``, so all decoders at a sweep
point see the same data and noise, and results do not depend on batching
or on how work is spread over processes.
"""
from __future__ import annotations

import csv
import dataclasses
import io
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .boundary_opt import boundaries_for_scheme, hard_only
from .flash_channel import NAND_MEANS, NAND_SIGMA_MULTIPLIERS, FlashModel, program, raw_error_probability
from .ldpc_baseline import QcLdpcCode, bitflip_decode, construct_qc, encode_ldpc
from .llr_engine import channel_llrs_binary, quantized_llr_table
from .mapping import scheme_by_name, states_from_bits
from .polar import PolarCode, construct, encode, is_power_of_two, load_frozen_set
from .precheck import DecoderKind, PrecheckThresholds, front_end, run_decoder, select_decoder

log = logging.getLogger(__name__)

DECODERS = ("binary", "quantized", "pure", "precheck", "ldpc")
CSV_COLUMNS = ("sigma", "raw_error_prob", "decoder", "frames", "frame_errors", "fer", "ber",
               "mean_sense_ops", "seed")


@dataclass(frozen=True)
class SimConfig:
    n: int = 1024
    k: int = 896
    sigmas: tuple[float, ...] = (0.22, 0.24, 0.26, 0.28, 0.30)
    means: tuple[float, ...] = NAND_MEANS
    sigma_multipliers: tuple[float, ...] = NAND_SIGMA_MULTIPLIERS
    design_sigma: float = 0.26
    construction_trials: int = 20000
    frozen_file: str = ""
    mapping: str = "gray"
    decoders: tuple[str, ...] = ("binary", "quantized", "pure")
    t_binary_max: float = 3e-3
    t_quantized_max: float = 1.7e-2
    boundary_scheme: str = "smmi"
    ratio: float = 2.0
    trials: int = 10000
    max_frame_errors: int = 100
    batch: int = 500
    seed: int = 1
    ldpc_circulant: int = 32
    ldpc_column_weight: int = 3
    ldpc_max_iter: int = 15

    def __post_init__(self):
        if not is_power_of_two(self.n):
            raise ValueError(f"n must be a power of 2, got {self.n}")
        if not 0 < self.k <= self.n:
            raise ValueError("k must lie in (0, n]")
        if not self.sigmas or min(self.sigmas) <= 0 or self.design_sigma <= 0:
            raise ValueError("sigma values must be positive")
        if self.trials < 1 or self.batch < 1 or self.max_frame_errors < 1:
            raise ValueError("trials, batch and max_frame_errors must be >= 1")
        bad = set(self.decoders) - set(DECODERS)
        if bad:
            raise ValueError(f"unknown decoders {sorted(bad)}")
        PrecheckThresholds(self.t_binary_max, self.t_quantized_max)

    def model(self, sigma: float) -> FlashModel:
        return FlashModel.nand_mlc(sigma, self.means, self.sigma_multipliers)

    @property
    def thresholds(self) -> PrecheckThresholds:
        return PrecheckThresholds(self.t_binary_max, self.t_quantized_max)

    def header_lines(self) -> list[str]:
        out = []
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            if isinstance(v, tuple):
                v = ",".join(str(x) for x in v)
            out.append(f"# {f.name} = {v}")
        return out


def _coerce(template, text: str):
    text = text.strip()
    if isinstance(template, bool):
        return text.lower() in ("1", "true", "yes")
    if isinstance(template, int):
        return int(text)
    if isinstance(template, float):
        return float(text)
    if isinstance(template, tuple):
        items = [t.strip() for t in text.split(",") if t.strip()]
        elem = template[0] if template else ""
        return tuple(_coerce(elem, t) for t in items)
    return text


def parse_assignments(lines) -> dict[str, str]:
    out = {}
    for raw in lines:
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        if not sep:
            raise ValueError(f"expected key = value, got {raw!r}")
        out[key.strip()] = val.strip()
    return out


def make_config(values: dict[str, str] | None = None, base: SimConfig | None = None) -> SimConfig:
    """Build a config from ``key -> text`` assignments over ``base`` defaults."""
    base = base or SimConfig()
    names = {f.name for f in dataclasses.fields(base)}
    kw = {}
    for key, text in (values or {}).items():
        if key not in names:
            raise ValueError(f"unknown config key {key!r}")
        kw[key] = _coerce(getattr(base, key), text)
    return dataclasses.replace(base, **kw)


def load_config(path, overrides=()) -> SimConfig:
    values = parse_assignments(Path(path).read_text().splitlines()) if path else {}
    values.update(parse_assignments(overrides))
    return make_config(values)


@dataclass(frozen=True)
class SimPoint:
    sigma: float
    raw_error_prob: float
    decoder: str
    frames: int
    frame_errors: int
    bit_errors: int
    info_bits: int
    mean_sense_ops: float
    seed: int
    wall_time: float = field(default=0.0, compare=False)
    error: str = ""

    @property
    def fer(self) -> float:
        return self.frame_errors / self.frames if self.frames else float("nan")

    @property
    def ber(self) -> float:
        return self.bit_errors / (self.frames * self.info_bits) if self.frames else float("nan")


@dataclass
class SimResult:
    config: SimConfig
    points: list[SimPoint]

    def point(self, sigma: float, decoder: str) -> SimPoint:
        for p in self.points:
            if p.decoder == decoder and p.sigma == sigma:
                return p
        raise KeyError((sigma, decoder))

    def to_csv(self, timing: bool = False) -> str:
        buf = io.StringIO()
        for line in self.config.header_lines():
            buf.write(line + "\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS + (("wall_time",) if timing else ()))
        for p in self.points:
            row = [repr(p.sigma), repr(p.raw_error_prob), p.decoder, p.frames, p.frame_errors,
                   repr(p.fer), repr(p.ber), repr(p.mean_sense_ops), p.seed]
            if timing:
                row.append(f"{p.wall_time:.3f}")
            w.writerow(row)
        return buf.getvalue()


def frame_rng(seed: int, point: int, frame: int) -> np.random.Generator:
    return np.random.default_rng([seed, point, frame])


def draw_frames(seed, point, start, count, k, cells):
    """Information bits (count, k) and unit normals (count, cells) for a frame range."""
    info = np.empty((count, k), dtype=np.uint8)
    noise = np.empty((count, cells))
    for i in range(count):
        rng = frame_rng(seed, point, start + i)
        info[i] = rng.integers(0, 2, size=k, dtype=np.uint8)
        noise[i] = rng.standard_normal(cells)
    return info, noise


def _voltages(states, model, noise):
    return model.means[states] + model.sigmas[states] * noise


def build_code(config: SimConfig, mapping=None) -> PolarCode:
    if config.frozen_file:
        code = load_frozen_set(config.frozen_file, config.n)
        if code.k_bits != config.k:
            raise ValueError(f"frozen file gives K={code.k_bits}, config has k={config.k}")
        return code
    mapping = mapping or scheme_by_name(config.mapping)
    return construct(config.n, config.k, config.model(config.design_sigma), mapping,
                     trials=config.construction_trials, seed=config.seed)


def build_ldpc(config: SimConfig) -> QcLdpcCode:
    return construct_qc(config.n, config.k, config.ldpc_circulant, seed=config.seed,
                        column_weight=config.ldpc_column_weight)


class _PointRunner:
    """Decodes frames of one sweep point with one decoder."""

    def __init__(self, config, point_idx, decoder, code, ldpc):
        self.config = config
        self.point_idx = point_idx
        self.decoder = decoder
        self.code = code
        self.ldpc = ldpc
        self.sigma = config.sigmas[point_idx]
        self.model = config.model(self.sigma)
        self.mapping = scheme_by_name(config.mapping)
        self.p_e = raw_error_probability(self.model).state_error_rate
        kind = None
        if decoder in ("binary", "quantized", "pure"):
            kind = DecoderKind.from_short(decoder)
        elif decoder == "precheck":
            kind = select_decoder(self.p_e, config.thresholds)
        self.kind = kind
        self.boundaries = hard_only(self.model)
        self.table = None
        if kind is DecoderKind.QUANTIZED_SOFT:
            self.boundaries = boundaries_for_scheme(config.boundary_scheme, self.model, self.mapping, config.ratio)
            self.table = quantized_llr_table(self.boundaries, self.model, self.mapping)

    def errors(self, info, noise):
        """Per-frame (frame_error, bit_errors) and sense ops per cell."""
        if self.decoder == "ldpc":
            x = encode_ldpc(info, self.ldpc)
            v = _voltages(states_from_bits(x, self.mapping), self.model, noise)
            hard = channel_llrs_binary(v, self.boundaries.hard_refs, self.mapping)
            est, _, _ = bitflip_decode((hard < 0).astype(np.uint8), self.ldpc, self.config.ldpc_max_iter)
            got = est[:, self.ldpc.info_positions]
            senses = 2.0
        else:
            u = self.code.source_word(info)
            v = _voltages(states_from_bits(encode(u, self.code), self.mapping), self.model, noise)
            llrs, senses = front_end(v, self.kind, self.model, self.boundaries, self.mapping, self.table)
            got = run_decoder(self.kind, llrs, self.code)[:, self.code.info_positions]
        bit_err = (got != info).sum(axis=1)
        return bit_err > 0, bit_err, senses

    def run(self) -> SimPoint:
        cfg = self.config
        cells = cfg.n // 2
        t0 = time.perf_counter()
        frames = frame_err = bit_err = 0
        senses = float("nan")
        while frames < cfg.trials:
            count = min(cfg.batch, cfg.trials - frames)
            info, noise = draw_frames(cfg.seed, self.point_idx, frames, count, cfg.k, cells)
            fe, be, senses = self.errors(info, noise)
            cum = frame_err + np.cumsum(fe)
            if cum[-1] >= cfg.max_frame_errors:
                stop = int(np.argmax(cum >= cfg.max_frame_errors)) + 1
                frames += stop
                frame_err += int(fe[:stop].sum())
                bit_err += int(be[:stop].sum())
                break
            frames += count
            frame_err += int(fe.sum())
            bit_err += int(be.sum())
        return SimPoint(self.sigma, self.p_e, self.decoder, frames, frame_err, bit_err, cfg.k,
                        senses, cfg.seed, time.perf_counter() - t0)


def _run_task(args) -> SimPoint:
    config, point_idx, decoder, code, ldpc = args
    try:
        return _PointRunner(config, point_idx, decoder, code, ldpc).run()
    except Exception as exc:  # recorded per point, the sweep goes on
        log.warning("point sigma=%s decoder=%s failed: %s", config.sigmas[point_idx], decoder, exc)
        model = config.model(config.sigmas[point_idx])
        return SimPoint(config.sigmas[point_idx], raw_error_probability(model).state_error_rate,
                        decoder, 0, 0, 0, config.k, float("nan"), config.seed, 0.0, str(exc))


def raw_error_axis(model: FlashModel) -> float:
    return raw_error_probability(model).state_error_rate


def run_sweep(config: SimConfig, workers: int = 1, code: PolarCode | None = None) -> SimResult:
    """Run every (sigma, decoder) point; identical output for any ``workers``."""
    polar_needed = any(d != "ldpc" for d in config.decoders)
    if code is None and polar_needed:
        code = build_code(config)
    ldpc = build_ldpc(config) if "ldpc" in config.decoders else None
    tasks = [(config, i, d, code, ldpc) for i in range(len(config.sigmas)) for d in config.decoders]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            points = list(pool.map(_run_task, tasks))
    else:
        points = [_run_task(t) for t in tasks]
    return SimResult(config, points)


def wilson_interval(errors: int, n: int, z: float = 1.959964) -> tuple[float, float]:
    if n == 0:
        return 0.0, 1.0
    p = errors / n
    denom = 1 + z * z / n
    centre = (p + z * z / (2 * n)) / denom
    half = z * np.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)
