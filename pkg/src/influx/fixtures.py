"""Golden-fixture harness.

Replays pinned CLI invocations and value-level checks from a JSON
manifest and compares results against frozen expected outputs. CLI
fixtures compare stdout byte-for-byte (tolerance 0); value fixtures
compare a single number within a declared tolerance. Runs offline from a
clean checkout.

Manifest entry shapes::

    {"name": ..., "kind": "cli", "argv": [...], "expected": "expected/x.json"}
    {"name": ..., "kind": "value", "op": "relative_influence",
     "args": [0.116, 0.212], "expected_value": 0.547, "tolerance": 0.001}

The placeholder ``{dir}`` in argv elements resolves to the manifest's
directory, so fixtures are location-independent.
"""

from __future__ import annotations

import io
import json
from contextlib import redirect_stdout
from dataclasses import dataclass, field
from pathlib import Path

from influx.dataset import ValidationError
from influx.influence import relative_influence

_VALUE_OPS = {
    "relative_influence": relative_influence,
}


@dataclass
class FixtureOutcome:
    name: str
    ok: bool
    details: list[str] = field(default_factory=list)


def _first_difference(expected: str, actual: str) -> list[str]:
    exp_lines = expected.splitlines()
    act_lines = actual.splitlines()
    for i, (e, a) in enumerate(zip(exp_lines, act_lines), 1):
        if e != a:
            return [f"line {i}: expected {e!r}, actual {a!r}"]
    if len(exp_lines) != len(act_lines):
        return [f"expected {len(exp_lines)} lines, actual {len(act_lines)}"]
    return ["outputs differ in line endings or trailing whitespace"]


def _run_cli_fixture(entry: dict, base: Path) -> FixtureOutcome:
    from influx.cli import main  # imported late to keep module import light

    name = entry["name"]
    argv = [a.replace("{dir}", str(base)) for a in entry["argv"]]
    expected_path = base / entry["expected"]
    buffer = io.StringIO()
    with redirect_stdout(buffer):
        code = main(argv)
    if code != 0:
        return FixtureOutcome(name, False, [f"exit code {code} for argv {argv}"])
    expected = expected_path.read_text(encoding="utf-8")
    actual = buffer.getvalue()
    if actual == expected:
        return FixtureOutcome(name, True)
    return FixtureOutcome(name, False, _first_difference(expected, actual))


def _run_value_fixture(entry: dict) -> FixtureOutcome:
    name = entry["name"]
    op = _VALUE_OPS.get(entry["op"])
    if op is None:
        return FixtureOutcome(name, False, [f"unknown op '{entry['op']}'"])
    actual = op(*entry["args"])
    expected = float(entry["expected_value"])
    tolerance = float(entry.get("tolerance", 0.0))
    if abs(actual - expected) <= tolerance:
        return FixtureOutcome(name, True)
    return FixtureOutcome(
        name,
        False,
        [f"field value: expected {expected!r} +/- {tolerance!r}, actual {actual!r}"],
    )


def verify_fixtures(manifest_path: str | Path) -> list[FixtureOutcome]:
    """Run every fixture in the manifest; outcomes in manifest order."""
    manifest_path = Path(manifest_path)
    base = manifest_path.parent
    entries = json.loads(manifest_path.read_text(encoding="utf-8"))
    if not isinstance(entries, list):
        raise ValidationError(f"{manifest_path}: manifest must be a JSON list")
    outcomes = []
    for entry in entries:
        kind = entry.get("kind")
        if kind == "cli":
            outcomes.append(_run_cli_fixture(entry, base))
        elif kind == "value":
            outcomes.append(_run_value_fixture(entry))
        else:
            outcomes.append(
                FixtureOutcome(entry.get("name", "?"), False, [f"unknown kind '{kind}'"])
            )
    return outcomes


def format_summary(outcomes: list[FixtureOutcome]) -> str:
    lines = []
    for o in outcomes:
        status = "PASS" if o.ok else "FAIL"
        lines.append(f"{status} {o.name}")
        lines.extend(f"  {d}" for d in o.details)
    n_ok = sum(o.ok for o in outcomes)
    lines.append(f"{n_ok}/{len(outcomes)} fixtures passed")
    return "\n".join(lines)
