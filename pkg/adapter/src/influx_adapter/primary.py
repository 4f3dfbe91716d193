"""Subprocess access to the analysis CLI.

The adapter's only view of the analysis package: its `influx` binary and
its file formats. Set INFLUX_BIN to point at a non-default binary.
"""

from __future__ import annotations

import csv
import os
import shlex
import subprocess
import tempfile
from pathlib import Path
from typing import Sequence

from influx_adapter import AdapterError


def influx_command() -> list[str]:
    override = os.environ.get("INFLUX_BIN")
    return shlex.split(override) if override else ["influx"]


def run_influx(args: Sequence[str]) -> str:
    """Run the analysis CLI; returns stdout, raises AdapterError on failure."""
    argv = influx_command() + list(args)
    try:
        proc = subprocess.run(argv, capture_output=True, text=True)
    except FileNotFoundError as exc:
        raise AdapterError(
            f"analysis binary not found ({argv[0]!r}); install influx or set INFLUX_BIN"
        ) from exc
    if proc.returncode != 0:
        raise AdapterError(
            f"influx {' '.join(args[:1])} failed (exit {proc.returncode}): "
            f"{proc.stderr.strip()}"
        )
    return proc.stdout


def _one_line(text: str) -> str:
    # readability/filter line formats are one record per line
    return " ".join(text.split())


def measure_readability(texts: Sequence[str]) -> list[float]:
    """Reading-ease score per text, via the primary `readability` command."""
    flattened = [_one_line(t) for t in texts]
    if any(not t for t in flattened):
        raise AdapterError("cannot measure readability of an empty text")
    if not flattened:
        return []
    with tempfile.NamedTemporaryFile(
        "w", suffix=".txt", delete=False, encoding="utf-8"
    ) as fh:
        fh.write("\n".join(flattened) + "\n")
        path = fh.name
    try:
        out = run_influx(["readability", "--in", path])
    finally:
        os.unlink(path)
    rows = list(csv.DictReader(out.splitlines()))
    if len(rows) != len(flattened):
        raise AdapterError(
            f"readability returned {len(rows)} rows for {len(flattened)} texts"
        )
    return [float(row["score"]) for row in rows]


def filter_question_texts(texts: Sequence[str]) -> list[bool]:
    """Per-text keep/remove decision from the primary `filter-questions` command.

    Returns True where the question is a wording probe (to be removed).
    """
    flattened = [_one_line(t) for t in texts]
    if not flattened:
        return []
    if any(not t for t in flattened):
        raise AdapterError("cannot filter an empty question text")
    with tempfile.NamedTemporaryFile(
        "w", suffix=".txt", delete=False, encoding="utf-8"
    ) as fh:
        fh.write("\n".join(flattened) + "\n")
        path = fh.name
    try:
        out = run_influx(["filter-questions", "--in", path])
    finally:
        os.unlink(path)
    import json

    removed_lines = {entry["id"] for entry in json.loads(out)["removed"]}
    return [str(lineno) in removed_lines for lineno in range(1, len(flattened) + 1)]


def validate_dataset_file(path: str | Path) -> None:
    """Reject files the primary loader would reject (exit code 1)."""
    run_influx(["influence", "--in", str(path)])


def influence_report(path: str | Path) -> dict:
    """Parsed influence report of a dataset file."""
    import json

    return json.loads(run_influx(["influence", "--in", str(path)]))
