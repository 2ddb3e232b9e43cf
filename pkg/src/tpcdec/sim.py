"""Monte Carlo BER/FER harness.

Each trial draws a random nonzero information block, encodes, modulates and
adds AWGN, then decodes the same LLR matrix with every selected rule. All
randomness for a trial comes from ``(seed, point_index, trial_id)``, and
stopping decisions are taken only at fixed batch boundaries, so results do
not depend on the worker count. Bit errors are counted on information bits.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np
from scipy.stats import norm

from .bch import code_from_name
from .channel import DATA_STREAM, ChannelConfig, modulate, to_llr, transmit, trial_rng
from .schedule import file_hash, load_schedule
from .tpc import RULES, TpcSpec, extract_info, tpc_decode, tpc_encode

__all__ = [
    "CSV_COLUMNS",
    "SCHEMA_VERSION",
    "BerPoint",
    "ConfigError",
    "SweepConfig",
    "build_tpc",
    "run_point",
    "run_sweep",
    "wilson_interval",
]

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
CSV_COLUMNS = ("rule", "snr_db", "frames", "bit_errors", "frame_errors", "ber", "fer", "ci95_low", "ci95_high")
UNCODED = "uncoded"
Z95 = float(norm.isf(0.025))


class ConfigError(ValueError):
    pass


@dataclass
class SweepConfig:
    snr_points_db: list[float]
    snr_kind: str = "ebn0"
    rules: list[str] = field(default_factory=lambda: ["proposed"])
    code: str = "ebch-256-239"
    p: int = 5
    iterations: int = 4
    schedule_path: str | None = None
    max_frames: int = 10_000_000
    min_bit_errors: int = 500
    min_frame_errors: int = 50
    batch_frames: int = 32
    uncoded_block: int = 4096
    seed: int = 0
    threads: int = 1

    def validate(self) -> None:
        def fail(path: str, msg: str):
            raise ConfigError(f"sweep.{path}: {msg}")

        if not self.snr_points_db:
            fail("snr_points_db", "at least one SNR point is required")
        if not all(math.isfinite(float(s)) for s in self.snr_points_db):
            fail("snr_points_db", "SNR values must be finite")
        if self.snr_kind not in ("ebn0", "esn0"):
            fail("snr_kind", f"expected 'ebn0' or 'esn0', got {self.snr_kind!r}")
        for name in ("max_frames", "min_bit_errors", "min_frame_errors", "batch_frames", "threads", "iterations", "uncoded_block"):
            if int(getattr(self, name)) < 1:
                fail(name, "must be a positive integer")
        if self.p < 0:
            fail("p", "must be non-negative")
        if not self.rules:
            fail("rules", "at least one decoder rule is required")
        if self.code == UNCODED:
            if list(self.rules) != [UNCODED]:
                fail("rules", "the uncoded channel only supports rule 'uncoded'")
        else:
            for i, rule in enumerate(self.rules):
                if rule not in RULES:
                    fail(f"rules[{i}]", f"unknown rule {rule!r}; expected one of {RULES}")
            if len(set(self.rules)) != len(self.rules):
                fail("rules", "duplicate rule")
            try:
                code_from_name(self.code)
            except ValueError as exc:
                fail("code", str(exc))
            if self.schedule_path is not None and not Path(self.schedule_path).is_file():
                fail("schedule_path", f"file not found: {self.schedule_path}")
            n_half = len(load_schedule(self.schedule_path))
            if 2 * self.iterations > n_half:
                fail("iterations", f"schedule has {n_half} half-iterations, cannot run {self.iterations} iterations")

    def resolved(self) -> dict:
        """Config as written to the sidecar; worker count is excluded on purpose."""
        out = dataclasses.asdict(self)
        out.pop("threads")
        out["snr_points_db"] = [float(s) for s in self.snr_points_db]
        return out

    @classmethod
    def from_dict(cls, data: dict) -> SweepConfig:
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - names)
        if unknown:
            raise ConfigError(f"sweep: unknown keys {unknown}")
        if "snr_points_db" not in data:
            raise ConfigError("sweep.snr_points_db: required")
        return cls(**data)


@dataclass(frozen=True)
class BerPoint:
    rule: str
    snr_db: float
    frames: int
    bit_errors: int
    frame_errors: int
    bits_per_frame: int

    @property
    def ber(self) -> float:
        return self.bit_errors / (self.frames * self.bits_per_frame) if self.frames else 0.0

    @property
    def fer(self) -> float:
        return self.frame_errors / self.frames if self.frames else 0.0

    @property
    def ci95(self) -> tuple[float, float]:
        return wilson_interval(self.bit_errors, self.frames * self.bits_per_frame)

    def csv_row(self) -> list[str]:
        lo, hi = self.ci95
        return [self.rule, repr(float(self.snr_db)), str(self.frames), str(self.bit_errors), str(self.frame_errors),
                repr(self.ber), repr(self.fer), repr(lo), repr(hi)]


def wilson_interval(successes: int, trials: int, z: float = Z95) -> tuple[float, float]:
    if trials == 0:
        return 0.0, 1.0
    phat = successes / trials
    denom = 1.0 + z * z / trials
    centre = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)


@lru_cache(maxsize=8)
def _tpc_cached(code: str, p: int, iterations: int, schedule_path: str | None) -> TpcSpec:
    component = code_from_name(code)
    schedule = load_schedule(schedule_path)[: 2 * iterations]
    return TpcSpec(component, component, p, schedule)


def build_tpc(cfg: SweepConfig) -> TpcSpec:
    return _tpc_cached(cfg.code, cfg.p, cfg.iterations, cfg.schedule_path)


def _bits_per_frame(cfg: SweepConfig) -> int:
    return cfg.uncoded_block if cfg.code == UNCODED else build_tpc(cfg).k


def _channel(cfg: SweepConfig, snr_db: float, point_index: int) -> ChannelConfig:
    rate = 1.0 if cfg.code == UNCODED else build_tpc(cfg).rate
    if cfg.snr_kind == "esn0":
        return ChannelConfig.from_es_n0_db(snr_db, cfg.seed, point_index)
    return ChannelConfig.from_eb_n0_db(snr_db, rate, cfg.seed, point_index)


def _draw_info(cfg: SweepConfig, point_index: int, trial: int, size: int) -> np.ndarray:
    rng = trial_rng(cfg.seed, point_index, trial, DATA_STREAM)
    while True:
        info = rng.integers(0, 2, size, dtype=np.uint8)
        if info.any():
            return info


def trial_llrs(cfg: SweepConfig, snr_db: float, point_index: int, trial: int):
    """Information block and channel LLRs for one trial."""
    chan = _channel(cfg, snr_db, point_index)
    if cfg.code == UNCODED:
        info = _draw_info(cfg, point_index, trial, cfg.uncoded_block)
        coded = info
    else:
        spec = build_tpc(cfg)
        info = _draw_info(cfg, point_index, trial, spec.k)
        coded = tpc_encode(spec, info)
    return info, to_llr(transmit(modulate(coded), chan, trial), chan)


def _run_trials(cfg: SweepConfig, snr_db: float, point_index: int, trials: range) -> np.ndarray:
    """Error counts, shape ``(len(rules), 2)``: bit errors and frame errors."""
    counts = np.zeros((len(cfg.rules), 2), dtype=np.int64)
    for trial in trials:
        info, llr = trial_llrs(cfg, snr_db, point_index, trial)
        for r, rule in enumerate(cfg.rules):
            if rule == UNCODED:
                decided = (llr < 0).astype(np.uint8)
            else:
                spec = build_tpc(cfg)
                decision, _ = tpc_decode(spec, llr, rule)
                decided = extract_info(spec, decision)
            errors = int(np.count_nonzero(decided != info))
            counts[r, 0] += errors
            counts[r, 1] += errors > 0
    return counts


def _worker(args) -> np.ndarray:
    cfg_dict, snr_db, point_index, start, stop = args
    return _run_trials(SweepConfig(**cfg_dict), snr_db, point_index, range(start, stop))


def _done(counts: np.ndarray, frames: int, cfg: SweepConfig) -> bool:
    if frames >= cfg.max_frames:
        return True
    return bool(np.all((counts[:, 0] >= cfg.min_bit_errors) & (counts[:, 1] >= cfg.min_frame_errors)))


def run_point(cfg: SweepConfig, snr_db: float, point_index: int = 0, pool: ProcessPoolExecutor | None = None) -> dict[str, BerPoint]:
    """Simulate one SNR point for every configured rule on shared noise.

    A point stops once every rule has reached both error thresholds, or at
    ``max_frames``.
    """
    cfg.validate()
    counts = np.zeros((len(cfg.rules), 2), dtype=np.int64)
    frames = 0
    cfg_dict = dataclasses.asdict(cfg)
    while not _done(counts, frames, cfg):
        batch = min(cfg.batch_frames, cfg.max_frames - frames)
        if pool is None or cfg.threads == 1:
            counts += _run_trials(cfg, snr_db, point_index, range(frames, frames + batch))
        else:
            edges = np.linspace(frames, frames + batch, cfg.threads + 1).astype(int)
            jobs = [(cfg_dict, snr_db, point_index, int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]
            for part in pool.map(_worker, jobs):
                counts += part
        frames += batch
        log.debug("snr=%s frames=%d counts=%s", snr_db, frames, counts.tolist())
    bits = _bits_per_frame(cfg)
    return {rule: BerPoint(rule, float(snr_db), frames, int(counts[r, 0]), int(counts[r, 1]), bits)
            for r, rule in enumerate(cfg.rules)}


def _sidecar(cfg: SweepConfig) -> dict:
    meta = {
        "schema_version": SCHEMA_VERSION,
        "config": cfg.resolved(),
        "ber_convention": "bit errors counted on information bits only",
        "snr_convention": "Es/N0 = 1/(2 sigma^2); Eb/N0 = Es/N0 / rate",
    }
    if cfg.code != UNCODED:
        spec = build_tpc(cfg)
        meta["params_file"] = cfg.schedule_path or "<default>"
        meta["params_hash"] = file_hash(cfg.schedule_path)
        meta["rate"] = spec.rate
        meta["component"] = {"n": spec.row_code.n, "k": spec.row_code.k, "t": spec.row_code.t}
    meta["points"] = []
    for idx, snr in enumerate(cfg.snr_points_db):
        chan = _channel(cfg, snr, idx)
        rate = meta.get("rate", 1.0)
        meta["points"].append({"snr_db": float(snr), "sigma": chan.sigma, "es_n0_db": chan.es_n0_db,
                               "eb_n0_db": chan.eb_n0_db(rate)})
    return meta


def _completed(csv_path: Path, cfg: SweepConfig) -> set[float]:
    if not csv_path.exists():
        return set()
    with open(csv_path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    done = {}
    for row in rows:
        done.setdefault(float(row["snr_db"]), set()).add(row["rule"])
    return {snr for snr, rules in done.items() if rules >= set(cfg.rules)}


def run_sweep(cfg: SweepConfig, out_dir: str | Path, stem: str = "results") -> list[BerPoint]:
    """Run every SNR point, appending rows to ``<stem>.csv`` as each finishes.

    Rerunning into the same directory with the same config skips points
    already present in the CSV.
    """
    cfg.validate()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / f"{stem}.csv"
    json_path = out_dir / f"{stem}.json"

    meta = _sidecar(cfg)
    if json_path.exists():
        previous = json.loads(json_path.read_text())
        if previous.get("config") != meta["config"]:
            raise ConfigError(f"{json_path} was written by a different configuration; use a fresh output directory")
    else:
        json_path.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")

    skip = _completed(csv_path, cfg)
    if not csv_path.exists():
        with open(csv_path, "w", newline="") as fh:
            csv.writer(fh).writerow(CSV_COLUMNS)

    results = []
    pool = ProcessPoolExecutor(max_workers=cfg.threads) if cfg.threads > 1 else None
    try:
        for idx, snr in enumerate(cfg.snr_points_db):
            if float(snr) in skip:
                log.info("skipping completed point %s dB", snr)
                continue
            points = run_point(cfg, snr, idx, pool)
            with open(csv_path, "a", newline="") as fh:
                writer = csv.writer(fh)
                for rule in cfg.rules:
                    writer.writerow(points[rule].csv_row())
                fh.flush()
                os.fsync(fh.fileno())
            for rule in cfg.rules:
                p = points[rule]
                log.info("%s %.3f dB: frames=%d ber=%.3e fer=%.3e", rule, snr, p.frames, p.ber, p.fer)
            results.extend(points[rule] for rule in cfg.rules)
    finally:
        if pool is not None:
            pool.shutdown()
    return results
