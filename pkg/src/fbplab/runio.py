"""Config parsing and deterministic CSV/JSON emission for reproducible runs.

Configs are plain ``key=value`` text, one pair per line, ``#`` comments.
Every subcommand publishes a schema; unknown keys are rejected and all
errors are reported together, not just the first.  CSV floats carry 17
significant digits and JSON keys are sorted, so outputs for fixed inputs
are byte-for-byte reproducible regression fixtures.
"""

from __future__ import annotations

import csv
import io
import json
import os
from dataclasses import dataclass, field


class ConfigError(ValueError):
    """Invalid run configuration; .errors lists every problem found."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


@dataclass(frozen=True)
class Key:
    """One schema entry: type, default (None = required), and bounds."""

    typ: type
    default: object = None
    required: bool = False
    lo: float = None
    hi: float = None
    choices: tuple = None


EVOLVE_SCHEMA = {
    "gamma": Key(float, required=True, lo=0.0, hi=1.0),
    "eps": Key(float, required=True, lo=1e-12),
    "t_end": Key(float, required=True, lo=1e-12),
    "geometry": Key(str, default="line_symmetric",
                    choices=("line_symmetric", "radial")),
    "n": Key(int, default=1, lo=1),
    "x_max": Key(float, default=8.0, lo=1e-12),
    "m": Key(int, default=256, lo=64),
    "reaction": Key(str, default="feps", choices=("feps", "phillips")),
    "bump_center": Key(float, default=0.0),
    "bump_radius": Key(float, default=2.0, lo=1e-12),
    "bump_height": Key(float, default=2.0, lo=1e-12),
    "flat": Key(float, default=None),
    "dt": Key(float, default=None, lo=0.0),
    "snapshot_spacing": Key(float, default=None, lo=0.0),
    "seed": Key(int, default=0),
}


def parse_config(text: str, schema: dict = EVOLVE_SCHEMA) -> dict:
    """Parse key=value text against a schema; raise ConfigError with ALL errors."""
    errors = []
    raw = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            errors.append(f"line {lineno}: expected key=value, got {stripped!r}")
            continue
        key, val = (part.strip() for part in stripped.split("=", 1))
        if key in raw:
            errors.append(f"line {lineno}: duplicate key {key!r}")
            continue
        raw[key] = (lineno, val)

    out = {}
    for key, (lineno, val) in raw.items():
        if key not in schema:
            known = ", ".join(sorted(schema))
            errors.append(f"line {lineno}: unknown key {key!r} (known: {known})")
            continue
        spec = schema[key]
        try:
            parsed = spec.typ(val)
        except ValueError:
            errors.append(
                f"line {lineno}: key {key!r} expects {spec.typ.__name__}, got {val!r}"
            )
            continue
        if spec.lo is not None and parsed < spec.lo:
            errors.append(f"line {lineno}: {key} = {parsed} below minimum {spec.lo}")
            continue
        if spec.hi is not None and parsed > spec.hi:
            errors.append(f"line {lineno}: {key} = {parsed} above maximum {spec.hi}")
            continue
        if spec.choices is not None and parsed not in spec.choices:
            errors.append(
                f"line {lineno}: {key} = {parsed!r} not one of {spec.choices}"
            )
            continue
        out[key] = parsed

    for key, spec in schema.items():
        if spec.required and key not in out:
            if not any(f" {key} " in e or f"{key!r}" in e for e in errors):
                errors.append(f"missing required key {key!r}")
        elif key not in out:
            out[key] = spec.default
    if errors:
        raise ConfigError(errors)
    return out


def format_config(cfg: dict) -> str:
    """Render a config dict back to canonical key=value text."""
    lines = []
    for key in sorted(cfg):
        val = cfg[key]
        if val is None:
            continue
        if isinstance(val, float):
            lines.append(f"{key}={val!r}")
        else:
            lines.append(f"{key}={val}")
    return "\n".join(lines) + "\n"


def _fmt(x) -> str:
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def emit_csv(table: dict, path) -> None:
    """Write a column table {name: sequence} as CSV with a header row."""
    names = list(table)
    columns = [list(table[name]) for name in names]
    lengths = {len(c) for c in columns}
    if len(lengths) > 1:
        raise ValueError("columns have unequal lengths")
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(names)
            for row in zip(*columns):
                writer.writerow([_fmt(v) for v in row])
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path}: {exc}") from exc


def read_csv(path) -> dict:
    """Read a CSV written by emit_csv back into {name: list of floats}."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        names = next(reader)
        cols = {name: [] for name in names}
        for row in reader:
            for name, val in zip(names, row):
                cols[name].append(float(val))
    return cols


def _jsonable(obj):
    import numpy as np

    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    return obj


def emit_json(summary: dict, path) -> None:
    """Write a summary dict as JSON with stable key order."""
    try:
        with open(path, "w") as fh:
            json.dump(_jsonable(summary), fh, indent=2, sort_keys=True)
            fh.write("\n")
    except OSError as exc:
        raise OSError(f"cannot write JSON to {path}: {exc}") from exc


def dumps_json(summary: dict) -> str:
    buf = io.StringIO()
    json.dump(_jsonable(summary), buf, indent=2, sort_keys=True)
    return buf.getvalue() + "\n"


def output_root(default: str = "runs") -> str:
    """Default output directory, overridable by FBPLAB_OUTPUT_ROOT."""
    return os.environ.get("FBPLAB_OUTPUT_ROOT", default)
