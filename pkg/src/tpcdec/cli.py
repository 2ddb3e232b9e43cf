"""Command-line entry point: ``tpcdec codec|simulate|optimize|correlate``.

Exit codes: 0 success, 1 runtime failure, 2 invalid input or configuration,
3 code too large for exhaustive enumeration, 4 optimisation did not converge
(only with ``--strict``).
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import logging
import math
import secrets
import sys
from pathlib import Path

import numpy as np

from . import bch
from .bch import UnsupportedParameters, code_from_name
from .chase import build_list, hard_decision
from .oracle import CodeTooLarge, correlate_delta_vs_exact, fit_slope, write_correlation_csv
from .schedule import dump_schedule, load_schedule
from .sim import SCHEMA_VERSION, ConfigError, SweepConfig, run_sweep
from .tpc import RULES, TpcSpec, extract_info, tpc_decode, tpc_encode

log = logging.getLogger("tpcdec")

EXIT_OK, EXIT_FAIL, EXIT_INVALID, EXIT_TOO_LARGE, EXIT_NOT_CONVERGED = 0, 1, 2, 3, 4
CHANNEL_LLR_FOR_BITS = 10.0


class UsageError(Exception):
    pass


def _fail(msg: str, code: int = EXIT_INVALID) -> int:
    print(f"tpcdec: error: {msg}", file=sys.stderr)
    return code


def _load_config(path: str | None, section: str) -> dict:
    if path is None:
        return {}
    data = json.loads(Path(path).read_text())
    version = data.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError(f"schema_version: unsupported version {version}, expected {SCHEMA_VERSION}")
    unknown = sorted(set(data) - {"schema_version", section})
    if unknown:
        raise ConfigError(f"unknown top-level keys {unknown}")
    return dict(data.get(section, {}))


def _parse_grid(text: str) -> np.ndarray:
    try:
        start, stop, step = (float(v) for v in text.split(":"))
    except ValueError:
        raise UsageError(f"--grid expects start:stop:step, got {text!r}") from None
    if step <= 0 or stop < start:
        raise UsageError(f"--grid {text!r}: need step > 0 and stop >= start")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return np.round(start + step * np.arange(count), 10)


def _parse_bounds(text: str) -> tuple[tuple[float, float], ...]:
    try:
        boxes = tuple(tuple(float(v) for v in part.split(":")) for part in text.split(","))
    except ValueError:
        raise UsageError(f"--bounds expects lo:hi,lo:hi,lo:hi, got {text!r}") from None
    if len(boxes) != 3 or any(len(b) != 2 for b in boxes):
        raise UsageError("--bounds needs three lo:hi boxes (lambda1, lambda2, mu)")
    return boxes


# ---------------------------------------------------------------- codec

def _product_spec(component, p: int, schedule_path: str | None) -> TpcSpec:
    return TpcSpec(component, component, p, load_schedule(schedule_path))


def _read_bits(path: Path, block: int, what: str) -> np.ndarray:
    raw = np.fromfile(path, dtype=np.uint8)
    bits = np.unpackbits(raw, bitorder="little")
    blocks = bits.size // block
    if blocks == 0 or math.ceil(blocks * block / 8) != raw.size or bits[blocks * block:].any():
        raise UsageError(f"{path}: {raw.size} bytes is not a whole number of {block}-bit {what} blocks")
    return bits[: blocks * block].reshape(blocks, block)


def _write_bits(path: Path, bits: np.ndarray) -> None:
    np.packbits(bits.reshape(-1), bitorder="little").tofile(path)


def cmd_codec(args) -> int:
    component = code_from_name(args.code)
    print(f"code {component.name}: n={component.n} k={component.k} t={component.t} rate={component.rate:.6f}")
    if args.product:
        spec = _product_spec(component, args.p, args.schedule)
        print(f"product code: n={spec.shape[0] * spec.shape[1]} k={spec.k} rate={spec.rate:.6f}")
        k_block, n_block = spec.k, spec.shape[0] * spec.shape[1]
    else:
        k_block, n_block = component.k, component.n

    src, dst = Path(args.input), Path(args.output)
    if args.action == "encode":
        info = _read_bits(src, k_block, "information")
        if args.product:
            coded = np.stack([tpc_encode(spec, u).reshape(-1) for u in info])
        else:
            coded = bch.encode(component, info)
        _write_bits(dst, coded)
        print(f"encoded {info.shape[0]} block(s)")
        return EXIT_OK

    if args.input_format == "bits":
        llrs = CHANNEL_LLR_FOR_BITS * (1.0 - 2.0 * _read_bits(src, n_block, "codeword"))
    else:
        raw = np.fromfile(src, dtype="<f4")
        if raw.size == 0 or raw.size % n_block:
            raise UsageError(f"{src}: {raw.size} float32 values is not a multiple of the block length {n_block}")
        llrs = raw.reshape(-1, n_block).astype(np.float64)
    out = []
    for llr in llrs:
        if args.product:
            decision, _ = tpc_decode(spec, llr.reshape(spec.shape), args.rule)
            out.append(extract_info(spec, decision))
        else:
            cands = build_list(component, llr, args.p)
            word = cands.best if len(cands) else hard_decision(llr)
            out.append(word[: component.k])
    _write_bits(dst, np.stack(out))
    print(f"decoded {len(out)} block(s)")
    return EXIT_OK


# ------------------------------------------------------------- simulate

SIM_FLAGS = {
    "snr": "snr_points_db", "snr_kind": "snr_kind", "code": "code", "p": "p", "iters": "iterations",
    "schedule": "schedule_path", "max_frames": "max_frames", "min_bit_errors": "min_bit_errors",
    "min_frame_errors": "min_frame_errors", "batch_frames": "batch_frames", "threads": "threads",
}


def cmd_simulate(args) -> int:
    data = _load_config(args.config, "sweep")
    for flag, key in SIM_FLAGS.items():
        value = getattr(args, flag)
        if value is not None:
            data[key] = value
    if args.paired:
        data["rules"] = ["proposed", "pyndiah"]
    elif args.rule:
        data["rules"] = args.rule
    if args.seed is not None:
        data["seed"] = args.seed
    elif "seed" not in data:
        data["seed"] = secrets.randbits(63)
    if args.iters is None and "iterations" not in data:
        data["iterations"] = 4
    cfg = SweepConfig.from_dict(data)
    cfg.validate()

    if args.dry_run:
        print(json.dumps({"schema_version": SCHEMA_VERSION, "sweep": dataclasses.asdict(cfg)}, indent=2))
        return EXIT_OK

    points = run_sweep(cfg, args.out)
    if args.plot:
        from .plotting import plot_ber

        label = "$E_b/N_0$ (dB)" if cfg.snr_kind == "ebn0" else "$E_s/N_0$ (dB)"
        plot_ber(points, Path(args.out) / "results.png", label)
    for p in points:
        lo, hi = p.ci95
        print(f"{p.rule:9s} {p.snr_db:6.3f} dB  frames={p.frames:7d}  BER={p.ber:.3e} [{lo:.2e}, {hi:.2e}]  FER={p.fer:.3e}")
    return EXIT_OK


# ------------------------------------------------------------- optimize

def cmd_optimize(args) -> int:
    from .optimize import DEFAULT_BOUNDS, DeConfig, DecoderContext, optimize_alpha_schedule, optimize_lambdas

    data = _load_config(args.config, "optimize")
    known = {"code", "p", "iterations", "snr_db", "frames", "seed", "schedule_path", "grid", "rule",
             "population_size", "F", "CR", "generations", "bounds"}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"optimize: unknown keys {unknown}")
    for key in ("code", "p", "iterations", "snr_db", "frames", "seed", "rule", "population_size", "F", "CR", "generations"):
        value = getattr(args, key)
        if value is not None:
            data[key] = value
    if args.schedule is not None:
        data["schedule_path"] = args.schedule
    if args.grid is not None:
        data["grid"] = args.grid
    if args.bounds is not None:
        data["bounds"] = _parse_bounds(args.bounds)
    seed = int(data.get("seed", secrets.randbits(63) if args.seed is None else args.seed))

    component = code_from_name(data.get("code", "ebch-256-239"))
    schedule = load_schedule(data.get("schedule_path"))[: 2 * int(data.get("iterations", 4))]
    spec = TpcSpec(component, component, int(data.get("p", 5)), schedule)
    rule = data.get("rule", "proposed")
    if rule not in ("proposed", "pyndiah"):
        raise ConfigError(f"optimize.rule: expected 'proposed' or 'pyndiah', got {rule!r}")
    de_cfg = DeConfig(
        population_size=int(data.get("population_size", 24)), F=float(data.get("F", 0.7)),
        CR=float(data.get("CR", 0.9)), generations=int(data.get("generations", 40)),
        bounds=tuple(tuple(b) for b in data.get("bounds", DEFAULT_BOUNDS)),
        objective_snr_db=float(data.get("snr_db", 3.9)), frames_per_eval=int(data.get("frames", 20)), seed=seed,
    )
    try:
        de_cfg.validate()
    except ValueError as exc:
        raise ConfigError(f"optimize: {exc}") from None
    grid = _parse_grid(data.get("grid", "0.5:1.0:0.02"))

    if args.dry_run:
        print(json.dumps({"schema_version": SCHEMA_VERSION, "optimize": {**dataclasses.asdict(de_cfg), "what": args.what,
                          "rule": rule, "code": component.name, "p": spec.p, "grid": grid.tolist()}}, indent=2))
        return EXIT_OK

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    context = DecoderContext(spec, de_cfg.objective_snr_db, de_cfg.frames_per_eval, seed, rule)
    log_rows: list[tuple] = []
    converged = True

    if args.what in ("lambdas", "all"):
        if rule != "proposed":
            raise ConfigError("optimize.rule: lambdas are only used by the proposed rule")
        _, _, histories = optimize_lambdas(context, de_cfg, on_generation=lambda h, g, v: log_rows.append(("lambdas", h, g, v)))
        converged &= all(hist[-1] <= hist[0] for hist in histories)
    if args.what in ("alpha", "all"):
        alphas = optimize_alpha_schedule(context, grid, on_score=lambda h, a, g: log_rows.append(("alpha", h, a, g)))
        edge = [h for h, a in enumerate(alphas, start=1) if a in (grid[0], grid[-1]) and grid.size > 1]
        if edge:
            log.warning("alpha hit the grid edge at half-iteration(s) %s", edge)
            converged = False

    (out / "schedule.json").write_text(dump_schedule(context.schedule))
    with open(out / "optimize_log.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(("stage", "half_iter", "step", "value"))
        for stage, h, step, value in log_rows:
            writer.writerow((stage, h, repr(float(step)) if stage == "alpha" else step, repr(float(value))))
    (out / "optimize.json").write_text(json.dumps({"schema_version": SCHEMA_VERSION, "seed": seed, "what": args.what,
                                                   "rule": rule, "de": dataclasses.asdict(de_cfg),
                                                   "grid": grid.tolist(), "code": component.name}, indent=2) + "\n")
    print(f"wrote {out / 'schedule.json'} ({len(context.schedule)} half-iterations)")
    if args.strict and not converged:
        return _fail("optimisation did not converge", EXIT_NOT_CONVERGED)
    return EXIT_OK


# ------------------------------------------------------------ correlate

def cmd_correlate(args) -> int:
    spec = code_from_name(args.code)
    if args.sigma is not None:
        sigma = args.sigma
    else:
        sigma = math.sqrt(1.0 / (2.0 * 10 ** (args.esn0 / 10)))
    seed = args.seed if args.seed is not None else secrets.randbits(63)
    table = correlate_delta_vs_exact(spec, args.trials, sigma, args.p, seed, all_zero=args.all_zero)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_correlation_csv(table, out / "correlation.csv")
    meta = {"schema_version": SCHEMA_VERSION, "code": spec.name, "trials": args.trials, "sigma": sigma,
            "p": args.p, "seed": seed, "all_zero": args.all_zero}
    try:
        slope, intercept = fit_slope(table, in_list=True)
        meta["fit_in_list"] = {"slope": slope, "intercept": intercept}
    except ValueError:
        slope = None
    (out / "correlation.json").write_text(json.dumps(meta, indent=2) + "\n")
    if args.plot:
        from .plotting import plot_correlation

        plot_correlation(table, out / "correlation.png", None if slope is None else (slope, intercept))
    print(f"wrote {table.size} rows to {out / 'correlation.csv'}")
    return EXIT_OK


# ---------------------------------------------------------------- main

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tpcdec", description="Turbo product code decoding and BER simulation.")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    codec = sub.add_parser("codec", help="encode or decode files")
    codec.add_argument("action", choices=("encode", "decode"))
    codec.add_argument("input")
    codec.add_argument("output")
    codec.add_argument("--code", default="ebch-256-239")
    codec.add_argument("--product", action="store_true", help="use the product of the code with itself")
    codec.add_argument("--p", type=int, default=5)
    codec.add_argument("--rule", choices=RULES, default="proposed")
    codec.add_argument("--schedule", default=None)
    codec.add_argument("--input-format", choices=("llr", "bits"), default="llr")
    codec.set_defaults(func=cmd_codec)

    sim = sub.add_parser("simulate", help="Monte Carlo BER sweep")
    sim.add_argument("--config")
    sim.add_argument("--out", default="results")
    sim.add_argument("--snr", type=float, nargs="+")
    sim.add_argument("--snr-kind", choices=("ebn0", "esn0"))
    sim.add_argument("--code")
    sim.add_argument("--rule", choices=RULES + ("uncoded",), nargs="+")
    sim.add_argument("--paired", action="store_true", help="run proposed and pyndiah on identical noise")
    sim.add_argument("--p", type=int)
    sim.add_argument("--iters", type=int)
    sim.add_argument("--schedule")
    sim.add_argument("--max-frames", type=int)
    sim.add_argument("--min-bit-errors", type=int)
    sim.add_argument("--min-frame-errors", type=int)
    sim.add_argument("--batch-frames", type=int)
    sim.add_argument("--seed", type=int)
    sim.add_argument("--threads", type=int)
    sim.add_argument("--dry-run", action="store_true")
    sim.add_argument("--plot", action="store_true", help="also write results.png")
    sim.set_defaults(func=cmd_simulate)

    opt = sub.add_parser("optimize", help="fit schedule parameters")
    opt.add_argument("what", choices=("alpha", "lambdas", "all"))
    opt.add_argument("--config")
    opt.add_argument("--out", default="optimized")
    opt.add_argument("--code")
    opt.add_argument("--p", type=int)
    opt.add_argument("--iterations", type=int)
    opt.add_argument("--schedule")
    opt.add_argument("--snr-db", type=float)
    opt.add_argument("--frames", type=int)
    opt.add_argument("--seed", type=int)
    opt.add_argument("--rule", choices=("proposed", "pyndiah"))
    opt.add_argument("--grid")
    opt.add_argument("--population-size", type=int)
    opt.add_argument("--F", type=float)
    opt.add_argument("--CR", type=float)
    opt.add_argument("--generations", type=int)
    opt.add_argument("--bounds")
    opt.add_argument("--strict", action="store_true")
    opt.add_argument("--dry-run", action="store_true")
    opt.set_defaults(func=cmd_optimize)

    cor = sub.add_parser("correlate", help="reliability gap vs exact extrinsic table")
    cor.add_argument("--code", default="ebch-16-11")
    cor.add_argument("--trials", type=int, default=1000)
    snr = cor.add_mutually_exclusive_group()
    snr.add_argument("--sigma", type=float)
    snr.add_argument("--esn0", type=float, default=4.0)
    cor.add_argument("--p", type=int, default=4)
    cor.add_argument("--seed", type=int)
    cor.add_argument("--all-zero", action=argparse.BooleanOptionalAction, default=True)
    cor.add_argument("--out", default="correlation")
    cor.add_argument("--plot", action="store_true")
    cor.set_defaults(func=cmd_correlate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except CodeTooLarge as exc:
        return _fail(str(exc), EXIT_TOO_LARGE)
    except (UsageError, ConfigError, UnsupportedParameters, bch.LengthMismatch) as exc:
        return _fail(str(exc))
    except (ValueError, KeyError, TypeError) as exc:
        return _fail(f"invalid input: {exc}")
    except OSError as exc:
        return _fail(str(exc), EXIT_FAIL)


if __name__ == "__main__":
    sys.exit(main())
