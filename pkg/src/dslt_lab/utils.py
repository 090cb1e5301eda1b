from __future__ import annotations
import json
import logging
import os
import tempfile
from pathlib import Path
from typing import Any

log = logging.getLogger(__name__)


def fmt_float(x: float) -> str:
    # shortest round-trip form
    return repr(float(x))


def parse_float_list(s: str) -> list[float]:
    parts = [p.strip() for p in s.split(",") if p.strip()]
    if not parts:
        raise ValueError("expected a comma-separated list of numbers")
    try:
        return [float(p) for p in parts]
    except ValueError as e:
        raise ValueError(f"not a number list: {s!r}") from e


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def atomic_write_text(path: Path | str, text: str) -> Path:
    """Write ``text`` to a sibling temp file, then rename it over ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise
    return path


def worker_count(default: int = 1) -> int:
    raw = os.getenv("DSLT_THREADS")
    if not raw:
        return default
    try:
        n = int(raw)
    except ValueError:
        log.warning("ignoring DSLT_THREADS=%r (not an integer)", raw)
        return default
    return max(1, n)

