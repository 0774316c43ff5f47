"""Shared scalar/text/log helpers used across acgraph modules."""

from __future__ import annotations

from fractions import Fraction
import hashlib
import json
import os
from pathlib import Path
import re
import time
from typing import Any

LOG_ENV = "AC_GRAPH_LOG"

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*$")


def env_int(name: str, default: int, minimum: int) -> int:
    """Integer from the environment; unset, malformed or too-small values give the default."""
    raw = str(os.environ.get(name) or "").strip()
    try:
        value = int(raw)
    except ValueError:
        return default
    return value if value >= minimum else default


def to_rational(value: Any) -> Fraction:
    """Parse "p/q", "p" or an int into a Fraction.

    Floats are refused: they would smuggle binary rounding into exact data.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ValueError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    match = _RATIONAL_RE.match(str(value if value is not None else ""))
    if not match:
        raise ValueError(f"not a rational: {value!r}")
    numerator = int(match.group(1))
    denominator = int(match.group(2)) if match.group(2) is not None else 1
    if denominator == 0:
        raise ValueError(f"zero denominator: {value!r}")
    return Fraction(numerator, denominator)


def rational_str(value: Fraction | int) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def stable_json(payload: Any) -> str:
    return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def sha256_file(path: Path | str) -> str:
    digest = hashlib.sha256()
    with Path(path).open("rb") as handle:
        for chunk in iter(lambda: handle.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _log_value(value: Any) -> str:
    if value is None:
        return "-"
    if isinstance(value, Fraction):
        return rational_str(value)
    if isinstance(value, (dict, list, tuple)):
        return json.dumps(value, sort_keys=True, separators=(",", ":"))
    return str(value)


def format_run_line(stage: str, detail: str = "", **fields: Any) -> str:
    """`stage key=value ...: detail`, fields in call order."""
    parts = [stage] + [f"{key}={_log_value(value)}" for key, value in fields.items()]
    line = " ".join(parts)
    return f"{line}: {detail}" if detail else line


def append_run_log(stage: str, detail: str = "", **fields: Any) -> None:
    log_target = str(os.environ.get(LOG_ENV) or "").strip()
    if not log_target:
        return
    try:
        path = Path(log_target).expanduser()
        path.parent.mkdir(parents=True, exist_ok=True)
        timestamp = time.strftime("%Y-%m-%d %H:%M:%S")
        with path.open("a", encoding="utf-8") as handle:
            handle.write(f"[{timestamp}] {format_run_line(stage, detail, **fields)}\n")
    except OSError:
        return
