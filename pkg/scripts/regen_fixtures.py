#!/usr/bin/env python3
"""Regenerate the golden fixture tree under fixtures/.

Inputs are written from hand-built records; expected report outputs come
from the exhaustive `oracle` command (never from the estimator whose
regressions they pin). Run from the repository root after an intentional
behavior change, then review the diff.
"""

from __future__ import annotations

import io
import json
import sys
from contextlib import redirect_stdout
from pathlib import Path

from influx.cli import main

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"
DATA = FIXTURES / "data"
EXPECTED = FIXTURES / "expected"

SEED7_SPEC = (
    '{"n_semantic": 4, "n_realizations_per": 3, "n_questions_per": 3, '
    '"n_classes": 4, "seed": 7, "sharpness": 1.0}'
)


def capture(argv: list[str]) -> str:
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = main(argv)
    if code != 0:
        raise SystemExit(f"fixture command failed ({code}): {argv}")
    return buf.getvalue()


def jsonl(records: list[dict]) -> str:
    return "\n".join(json.dumps(r) for r in records) + "\n"


def write_inputs() -> None:
    DATA.mkdir(parents=True, exist_ok=True)

    # 2x2 grid where only the question decides the outcome
    (DATA / "question_decides.jsonl").write_text(
        jsonl(
            [
                {
                    "instance_id": "a",
                    "realizations": [{"id": "r1"}, {"id": "r2"}],
                    "questions": [{"id": "q1"}, {"id": "q2"}],
                    "cells": [
                        {"r": "r1", "q": "q1", "probs": [1.0, 0.0]},
                        {"r": "r1", "q": "q2", "probs": [0.0, 1.0]},
                        {"r": "r2", "q": "q1", "probs": [1.0, 0.0]},
                        {"r": "r2", "q": "q2", "probs": [0.0, 1.0]},
                    ],
                }
            ]
        ),
        encoding="utf-8",
    )

    # 2x2 grid where only the realization decides the outcome
    (DATA / "realization_decides.jsonl").write_text(
        jsonl(
            [
                {
                    "instance_id": "a",
                    "realizations": [{"id": "r1"}, {"id": "r2"}],
                    "questions": [{"id": "q1"}, {"id": "q2"}],
                    "cells": [
                        {"r": "r1", "q": "q1", "probs": [1.0, 0.0]},
                        {"r": "r1", "q": "q2", "probs": [1.0, 0.0]},
                        {"r": "r2", "q": "q1", "probs": [0.0, 1.0]},
                        {"r": "r2", "q": "q2", "probs": [0.0, 1.0]},
                    ],
                }
            ]
        ),
        encoding="utf-8",
    )

    # two single-cell instances with opposing sharp distributions
    (DATA / "two_instances.jsonl").write_text(
        jsonl(
            [
                {
                    "instance_id": "A",
                    "realizations": [{"id": "r1"}],
                    "questions": [{"id": "q1"}],
                    "cells": [{"r": "r1", "q": "q1", "probs": [0.9, 0.1]}],
                },
                {
                    "instance_id": "B",
                    "realizations": [{"id": "r1"}],
                    "questions": [{"id": "q1"}],
                    "cells": [{"r": "r1", "q": "q1", "probs": [0.1, 0.9]}],
                },
            ]
        ),
        encoding="utf-8",
    )

    (DATA / "texts.txt").write_text(
        "The cat sat.\nThe happy dog runs quickly.\n", encoding="utf-8"
    )

    (DATA / "questions.txt").write_text(
        "What does the underlined word in paragraph 2 mean?\n"
        "Why did Tom go to the market?\n"
        "What does the second sentence in paragraph 1 refer to?\n",
        encoding="utf-8",
    )

    (DATA / "logits.jsonl").write_text(
        jsonl(
            [
                {"id": "a", "logits": [2.0, 0.0], "label": 0},
                {"id": "b", "logits": [1.0, 0.0], "label": 1},
                {"id": "c", "logits": [3.0, 0.0], "label": 0},
            ]
        ),
        encoding="utf-8",
    )

    (DATA / "seed7.jsonl").write_text(capture(["synth", "--spec", SEED7_SPEC]), encoding="utf-8")


def write_expected() -> None:
    EXPECTED.mkdir(parents=True, exist_ok=True)
    oracle_cases = {
        "report_question_decides.json": ["oracle", "--in", str(DATA / "question_decides.jsonl")],
        "report_realization_decides.json": ["oracle", "--in", str(DATA / "realization_decides.jsonl")],
        "report_two_instances.json": ["oracle", "--in", str(DATA / "two_instances.jsonl")],
        "report_two_instances_bits.json": [
            "oracle", "--in", str(DATA / "two_instances.jsonl"), "--unit", "bits",
        ],
        "report_seed7.json": ["oracle", "--in", str(DATA / "seed7.jsonl")],
        "readability.csv": ["readability", "--in", str(DATA / "texts.txt")],
        "filter.json": ["filter-questions", "--in", str(DATA / "questions.txt")],
        "calibrate.json": ["calibrate", "--in", str(DATA / "logits.jsonl")],
    }
    for name, argv in oracle_cases.items():
        (EXPECTED / name).write_text(capture(argv), encoding="utf-8")


def write_manifest() -> None:
    entries = [
        {
            "name": "relative-question-share-a",
            "kind": "value",
            "op": "relative_influence",
            "args": [0.116, 0.212],
            "expected_value": 0.547,
            "tolerance": 0.001,
        },
        {
            "name": "relative-question-share-b",
            "kind": "value",
            "op": "relative_influence",
            "args": [0.211, 0.290],
            "expected_value": 0.727,
            "tolerance": 0.001,
        },
        {
            "name": "relative-semantic-share",
            "kind": "value",
            "op": "relative_influence",
            "args": [0.325, 0.361],
            "expected_value": 0.900,
            "tolerance": 0.001,
        },
        {
            "name": "report-question-decides",
            "kind": "cli",
            "argv": ["influence", "--in", "{dir}/data/question_decides.jsonl"],
            "expected": "expected/report_question_decides.json",
        },
        {
            "name": "report-realization-decides",
            "kind": "cli",
            "argv": ["influence", "--in", "{dir}/data/realization_decides.jsonl"],
            "expected": "expected/report_realization_decides.json",
        },
        {
            "name": "report-two-instances",
            "kind": "cli",
            "argv": ["influence", "--in", "{dir}/data/two_instances.jsonl"],
            "expected": "expected/report_two_instances.json",
        },
        {
            "name": "report-two-instances-bits",
            "kind": "cli",
            "argv": ["influence", "--in", "{dir}/data/two_instances.jsonl", "--unit", "bits"],
            "expected": "expected/report_two_instances_bits.json",
        },
        {
            "name": "synth-seed7-regenerates",
            "kind": "cli",
            "argv": ["synth", "--spec", SEED7_SPEC],
            "expected": "data/seed7.jsonl",
        },
        {
            "name": "oracle-seed7",
            "kind": "cli",
            "argv": ["oracle", "--in", "{dir}/data/seed7.jsonl"],
            "expected": "expected/report_seed7.json",
        },
        {
            "name": "influence-seed7-matches-oracle",
            "kind": "cli",
            "argv": ["influence", "--in", "{dir}/data/seed7.jsonl"],
            "expected": "expected/report_seed7.json",
        },
        {
            "name": "readability-fixture",
            "kind": "cli",
            "argv": ["readability", "--in", "{dir}/data/texts.txt"],
            "expected": "expected/readability.csv",
        },
        {
            "name": "filter-fixture",
            "kind": "cli",
            "argv": ["filter-questions", "--in", "{dir}/data/questions.txt"],
            "expected": "expected/filter.json",
        },
        {
            "name": "calibrate-fixture",
            "kind": "cli",
            "argv": ["calibrate", "--in", "{dir}/data/logits.jsonl"],
            "expected": "expected/calibrate.json",
        },
    ]
    (FIXTURES / "manifest.json").write_text(
        json.dumps(entries, indent=2) + "\n", encoding="utf-8"
    )


if __name__ == "__main__":
    write_inputs()
    write_expected()
    write_manifest()
    print(f"fixtures regenerated under {FIXTURES}", file=sys.stderr)
