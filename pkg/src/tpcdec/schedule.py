"""Reading and writing per-half-iteration parameter schedules (JSON)."""

from __future__ import annotations

import hashlib
import json
from importlib import resources
from pathlib import Path

from .siso import HalfIterParams

__all__ = ["DEFAULT_SCHEDULE", "default_schedule", "dump_schedule", "file_hash", "load_schedule", "save_schedule"]

DEFAULT_SCHEDULE = "default_schedule.json"
FIELDS = ("alpha", "lambda1", "lambda2", "mu", "beta_pyndiah")
OPTIONAL_FIELDS = ("alpha_pyndiah",)


def _from_rows(rows: list[dict]) -> list[HalfIterParams]:
    if not isinstance(rows, list) or not rows:
        raise ValueError("schedule file must hold a non-empty JSON array")
    out = []
    for expected, row in enumerate(sorted(rows, key=lambda r: r["half_iter"]), start=1):
        if row["half_iter"] != expected:
            raise ValueError(f"half_iter values must run 1..{len(rows)}; missing {expected}")
        missing = [f for f in FIELDS if f not in row]
        if missing:
            raise ValueError(f"schedule row {expected}: missing {missing}")
        extra = {f: float(row[f]) for f in OPTIONAL_FIELDS if row.get(f) is not None}
        out.append(HalfIterParams(**{f: float(row[f]) for f in FIELDS}, **extra))
    return out


def load_schedule(path: str | Path | None = None) -> list[HalfIterParams]:
    """Load a schedule; ``None`` gives the shipped default."""
    if path is None:
        return default_schedule()
    return _from_rows(json.loads(Path(path).read_text()))


def default_schedule() -> list[HalfIterParams]:
    text = resources.files("tpcdec.data").joinpath(DEFAULT_SCHEDULE).read_text()
    return _from_rows(json.loads(text))


def dump_schedule(schedule: list[HalfIterParams]) -> str:
    rows = []
    for i, p in enumerate(schedule, start=1):
        row = {"half_iter": i, **{f: getattr(p, f) for f in FIELDS}}
        row.update({f: getattr(p, f) for f in OPTIONAL_FIELDS if getattr(p, f) is not None})
        rows.append(row)
    return json.dumps(rows, indent=2) + "\n"


def save_schedule(schedule: list[HalfIterParams], path: str | Path) -> None:
    Path(path).write_text(dump_schedule(schedule))


def file_hash(path: str | Path | None = None) -> str:
    """Git blob hash of the schedule file contents."""
    if path is None:
        data = resources.files("tpcdec.data").joinpath(DEFAULT_SCHEDULE).read_bytes()
    else:
        data = Path(path).read_bytes()
    return hashlib.sha1(b"blob %d\0" % len(data) + data).hexdigest()
