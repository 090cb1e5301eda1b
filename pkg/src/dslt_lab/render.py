from __future__ import annotations
import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from . import __version__
from .utils import atomic_write_text, canonical_json, fmt_float


console = Console()

HEADER_PREFIX = "# dslt-lab "


@dataclass
class Artifact:
    columns: list[str]
    rows: list[dict[str, Any]] = field(default_factory=list)
    title: str = ""
    notes: list[str] = field(default_factory=list)


def header_line(spec: dict) -> str:
    return f"{HEADER_PREFIX}{__version__} {canonical_json(spec)}"


def _cell(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return fmt_float(v)
    return str(v)


def artifact_to_csv(spec: dict, art: Artifact) -> str:
    buf = io.StringIO()
    buf.write(header_line(spec) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(art.columns)
    for row in art.rows:
        w.writerow([_cell(row.get(c)) for c in art.columns])
    return buf.getvalue()


def artifact_to_json(spec: dict, art: Artifact) -> str:
    payload = {
        "columns": art.columns,
        "rows": [{c: row.get(c) for c in art.columns} for row in art.rows],
    }
    return header_line(spec) + "\n" + json.dumps(payload, indent=2) + "\n"


def write_artifact(path: Path | str, spec: dict, art: Artifact, fmt: str = "csv") -> Path:
    text = artifact_to_json(spec, art) if fmt == "json" else artifact_to_csv(spec, art)
    return atomic_write_text(path, text)


def _parse_cell(s: str) -> Any:
    if s == "":
        return None
    if s in ("true", "false"):
        return s == "true"
    for conv in (int, float):
        try:
            return conv(s)
        except ValueError:
            pass
    return s


def read_artifact(path: Path | str) -> tuple[dict, list[dict[str, Any]]]:
    """Parse a CSV or JSON artifact back into ``(spec, rows)``."""
    text = Path(path).read_text(encoding="utf-8")
    first, _, body = text.partition("\n")
    if not first.startswith(HEADER_PREFIX):
        raise ValueError(f"{path}: missing dslt-lab header line")
    _, _, spec_json = first[len(HEADER_PREFIX):].partition(" ")
    spec = json.loads(spec_json)
    if body.lstrip().startswith("{"):
        rows = json.loads(body)["rows"]
    else:
        rows = [{k: _parse_cell(v) for k, v in r.items()} for r in csv.DictReader(io.StringIO(body))]
    return spec, rows


def render_artifact(art: Artifact, max_rows: int = 40):
    tbl = Table(title=art.title or None)
    for c in art.columns:
        tbl.add_column(c, overflow="fold")
    for row in art.rows[:max_rows]:
        tbl.add_row(*[_cell(row.get(c)) for c in art.columns])
    console.print(tbl)
    if len(art.rows) > max_rows:
        console.print(f"[dim]… {len(art.rows) - max_rows} more rows (use --out to write them all)[/dim]")
    if art.notes:
        console.print(Panel.fit("\n".join(art.notes)))
