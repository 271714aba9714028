"""TOML configuration and CSV helpers for the command line."""

from __future__ import annotations

import csv
import io
import math
import sys
from pathlib import Path
from typing import Any, Iterable

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from ..estimator import EstimatorConfig
from ..noise import parse_model
from ..shrinkage import ShrinkageConfig
from .experiment import ExperimentSpec
from .signals import SignalSpec, parse_signal

__all__ = [
    "InputError",
    "load_toml",
    "estimator_from_dict",
    "experiment_from_dict",
    "read_xy_csv",
    "read_table_csv",
    "write_csv",
    "format_float",
]


class InputError(ValueError):
    """Malformed user input (CSV or TOML), with a location in the message."""


def load_toml(path: str | Path) -> dict[str, Any]:
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        # the decoder message carries "(at line L, column C)"
        raise InputError(f"{path}: invalid TOML: {exc}") from exc
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from exc


def _reject_unknown(section: str, table: dict, allowed: Iterable[str]) -> None:
    extra = sorted(set(table) - set(allowed))
    if extra:
        raise InputError(f"unknown key(s) in [{section}]: {', '.join(extra)}")


_SHRINK_KEYS = ("rule", "lambda_star", "block_length_rule")
_ESTIMATOR_KEYS = ("gamma", "filter", "j0", "bias_correction", "shrinkage")
_EXPERIMENT_KEYS = ("signal", "noise", "n_list", "replications", "estimator", "t0", "seed", "baseline")


def estimator_from_dict(table: dict | None) -> EstimatorConfig:
    table = dict(table or {})
    _reject_unknown("estimator", table, _ESTIMATOR_KEYS)
    shrink = dict(table.pop("shrinkage", {}) or {})
    _reject_unknown("estimator.shrinkage", shrink, _SHRINK_KEYS)
    try:
        return EstimatorConfig(shrinkage=ShrinkageConfig(**shrink), **table)
    except (TypeError, ValueError) as exc:
        raise InputError(f"invalid estimator configuration: {exc}") from exc


def _signal_from(value: Any) -> SignalSpec:
    if isinstance(value, str):
        return parse_signal(value)
    if isinstance(value, dict):
        _reject_unknown("signal", value, ("name", "amplitude", "value", "path"))
        return SignalSpec(**value)
    raise InputError("signal must be a string or a table")


def experiment_from_dict(table: dict, seed: int | None = None) -> ExperimentSpec:
    table = dict(table)
    # accept the experiment either at top level or under [experiment]
    if "experiment" in table and isinstance(table["experiment"], dict):
        inner = dict(table.pop("experiment"))
        inner.update(table)
        table = inner
    _reject_unknown("experiment", table, _EXPERIMENT_KEYS)
    for key in ("signal", "noise", "n_list"):
        if key not in table:
            raise InputError(f"experiment config is missing {key!r}")
    try:
        spec = ExperimentSpec(
            signal=_signal_from(table["signal"]),
            noise=parse_model(str(table["noise"])),
            n_list=tuple(table["n_list"]),
            replications=int(table.get("replications", 50)),
            estimator=estimator_from_dict(table.get("estimator")),
            t0=table.get("t0"),
            seed=int(table.get("seed", 0) if seed is None else seed),
            baseline=table.get("baseline"),
        )
    except InputError:
        raise
    except (TypeError, ValueError) as exc:
        raise InputError(f"invalid experiment configuration: {exc}") from exc
    return spec


def _data_lines(fh) -> Iterable[tuple[int, str]]:
    for lineno, line in enumerate(fh, start=1):
        if line.strip() and not line.lstrip().startswith("#"):
            yield lineno, line


def read_table_csv(path: str | Path) -> tuple[list[str], list[tuple[int, list[float]]]]:
    """Header and numeric rows (with source line numbers); ``#`` lines are skipped."""
    try:
        with open(path, newline="") as fh:
            lines = list(_data_lines(fh))
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from exc
    if not lines:
        raise InputError(f"{path}: no header row")
    header = [h.strip() for h in next(csv.reader([lines[0][1]]))]
    rows = []
    for lineno, line in lines[1:]:
        fields = next(csv.reader([line]))
        if len(fields) != len(header):
            raise InputError(f"{path}:{lineno}: expected {len(header)} fields, got {len(fields)}")
        try:
            values = [float(v) for v in fields]
        except ValueError as exc:
            raise InputError(f"{path}:{lineno}: non-numeric value ({exc})") from exc
        rows.append((lineno, values))
    return header, rows


def read_xy_csv(path: str | Path) -> tuple[np.ndarray, np.ndarray]:
    header, rows = read_table_csv(path)
    if "x" not in header or "y" not in header:
        raise InputError(f"{path}: header must contain columns x and y, got {header}")
    ix, iy = header.index("x"), header.index("y")
    for lineno, values in rows:
        if not (math.isfinite(values[ix]) and math.isfinite(values[iy])):
            raise InputError(f"{path}:{lineno}: non-finite value")
    x = np.array([v[ix] for _, v in rows])
    y = np.array([v[iy] for _, v in rows])
    order = np.argsort(x, kind="stable")
    return x[order], y[order]


def format_float(value: float) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if math.isnan(value):
        return "nan"
    return repr(float(value))


def write_csv(path: str | Path | None, header: list[str], rows: Iterable, comments: Iterable[str] = (),
              footer: Iterable[str] = ()) -> str:
    """Write comma-separated rows; ``comments`` go before the header, ``footer`` after the body."""
    buf = io.StringIO()
    for line in comments:
        buf.write(f"# {line}\n")
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(format_float(v) for v in row) + "\n")
    for line in footer:
        buf.write(f"# {line}\n")
    text = buf.getvalue()
    if path is None or str(path) == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)
    return text
