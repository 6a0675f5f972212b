"""Report serialization: one row per run, then per-level and total rows.

Both formats carry the same fields in the same order and embed a schema
tag, so old reports stay parseable.  Numbers go through the nine-digit
policy and round-trip exactly.
"""

from __future__ import annotations

import csv
import io
import json

from ..numfmt import format9
from .runner import BatchReport, RunResult

SCHEMA = "gf-report v1"
COLUMNS = ("schema", "row", "track", "agent", "level", "run_index", "seed",
           "completed", "t", "n_collect", "score", "timeouts", "notes")


def _run_row(report: BatchReport, r: RunResult) -> dict[str, str]:
    return {
        "schema": SCHEMA, "row": "run",
        "track": report.track.value, "agent": report.agent_id,
        "level": r.level_name, "run_index": str(r.run_index), "seed": str(r.seed),
        "completed": "true" if r.completed else "false",
        "t": format9(r.t), "n_collect": str(r.n_collect),
        "score": format9(r.score), "timeouts": str(r.timeouts),
        "notes": r.notes,
    }


def _level_row(report: BatchReport, name: str, mean: float) -> dict[str, str]:
    return {
        "schema": SCHEMA, "row": "level",
        "track": report.track.value, "agent": report.agent_id,
        "level": name, "run_index": "", "seed": "", "completed": "",
        "t": "", "n_collect": "", "score": format9(mean), "timeouts": "",
        "notes": "",
    }


def _total_row(report: BatchReport) -> dict[str, str]:
    return {
        "schema": SCHEMA, "row": "total",
        "track": report.track.value, "agent": report.agent_id,
        "level": "", "run_index": "", "seed": "", "completed": "",
        "t": "", "n_collect": "", "score": format9(report.total_score),
        "timeouts": "", "notes": "",
    }


def _rows(report: BatchReport) -> list[dict[str, str]]:
    rows = []
    for group in report.per_level:
        rows.extend(_run_row(report, r) for r in group)
    for name, mean in zip(report.level_names, report.level_scores):
        rows.append(_level_row(report, name, mean))
    rows.append(_total_row(report))
    return rows


def to_csv(report: BatchReport) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(_rows(report))
    return buf.getvalue()


def to_jsonl(report: BatchReport) -> str:
    lines = [json.dumps(row, separators=(",", ":")) for row in _rows(report)]
    return "\n".join(lines) + "\n"


def write_report(report: BatchReport, path: str) -> None:
    """Format picked by extension: .jsonl for json-lines, csv otherwise."""
    text = to_jsonl(report) if path.endswith(".jsonl") else to_csv(report)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
