"""Runs a black-box classifier over a corpus and emits dataset + logit files.

A corpus file is dataset JSONL without the ``cells``: instances with
realization texts and (for multi-element tasks) question texts and gold
classes; single-element records may carry a top-level ``true_class``.
The classifier is any callable from a :class:`CellQuery` to a length-K
logit vector; stubs below cover offline use.

Wording-probe questions are dropped before emission (decided by the
analysis CLI's filter), the softmaxed scores become the cell
distributions, and the dataset file is accepted only after the analysis
CLI has validated it. Output is written once, in corpus order.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Mapping, Sequence

from influx_adapter import AdapterError
from influx_adapter.primary import filter_question_texts, validate_dataset_file

SENTINEL_QUESTION_ID = "_"


@dataclass(frozen=True)
class CellQuery:
    instance_id: str
    realization_id: str
    question_id: str | None
    realization_text: str | None
    question_text: str | None


Classifier = Callable[[CellQuery], Sequence[float]]


def stub_fixed_logits(logits: Sequence[float]) -> Classifier:
    frozen = [float(x) for x in logits]
    return lambda query: list(frozen)


def stub_uniform(n_classes: int) -> Classifier:
    return lambda query: [0.0] * n_classes


def stub_probability_table(
    table: Mapping[tuple[str, str, str | None], Sequence[float]],
    floor: float = 1e-12,
) -> Classifier:
    """Classifier replaying per-cell probabilities as floored log scores."""

    def classify(query: CellQuery) -> list[float]:
        key = (query.instance_id, query.realization_id, query.question_id)
        if key not in table:
            raise AdapterError(f"probability table has no entry for cell {key}")
        return [math.log(max(float(p), floor)) for p in table[key]]

    return classify


def load_corpus(path: str | Path) -> list[dict]:
    records = []
    with Path(path).open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise AdapterError(f"{path}: line {lineno}: malformed JSON: {exc.msg}") from exc
            if not isinstance(obj, dict) or not isinstance(obj.get("instance_id"), str):
                raise AdapterError(f"{path}: line {lineno}: missing instance_id")
            if not isinstance(obj.get("realizations"), list) or not obj["realizations"]:
                raise AdapterError(f"{path}: line {lineno}: missing realizations")
            records.append(obj)
    if not records:
        raise AdapterError(f"{path}: empty corpus")
    return records


def _softmax(scores: Sequence[float]) -> list[float]:
    top = max(scores)
    exps = [math.exp(s - top) for s in scores]
    total = sum(exps)
    return [e / total for e in exps]


def _check_scores(scores: Sequence[float], n_classes: int, where: str) -> list[float]:
    values = [float(s) for s in scores]
    if len(values) != n_classes:
        raise AdapterError(
            f"classifier output length mismatch at {where}: "
            f"got {len(values)}, expected {n_classes}"
        )
    if not all(math.isfinite(v) for v in values):
        raise AdapterError(f"classifier returned a non-finite score at {where}")
    return values


def _drop_filtered_questions(records: list[dict]) -> tuple[list[dict], int]:
    """Remove wording-probe questions corpus-wide with one filter call."""
    flat: list[tuple[int, int, str]] = []
    for rec_idx, record in enumerate(records):
        for q_idx, question in enumerate(record.get("questions") or []):
            text = question.get("text")
            if isinstance(text, str) and text.strip():
                flat.append((rec_idx, q_idx, text))
    if not flat:
        return records, 0
    removed_flags = filter_question_texts([t for _, _, t in flat])
    removed_keys = {
        (rec_idx, q_idx)
        for (rec_idx, q_idx, _), removed in zip(flat, removed_flags)
        if removed
    }
    if not removed_keys:
        return records, 0
    cleaned = []
    for rec_idx, record in enumerate(records):
        questions = record.get("questions") or []
        kept = [
            q for q_idx, q in enumerate(questions) if (rec_idx, q_idx) not in removed_keys
        ]
        if questions and not kept:
            raise AdapterError(
                f"instance '{record['instance_id']}': every question was filtered out"
            )
        record = dict(record)
        if questions:
            record["questions"] = kept
        cleaned.append(record)
    return cleaned, len(removed_keys)


def produce_distributions(
    corpus: list[dict],
    classifier: Classifier,
    n_classes: int,
    dataset_path: str | Path,
    logits_path: str | Path | None = None,
    drop_linguistic_questions: bool = True,
) -> dict:
    """Classify every (realization, question) cell and write the wire files.

    Returns a summary dict. The dataset file is validated by the analysis
    CLI before it reaches ``dataset_path``; logit records are emitted for
    cells whose gold class is known.
    """
    if n_classes < 2:
        raise AdapterError("n_classes must be >= 2")
    removed = 0
    if drop_linguistic_questions:
        corpus, removed = _drop_filtered_questions(corpus)

    dataset_lines = []
    logit_lines = []
    n_cells = 0
    for record in corpus:
        instance_id = record["instance_id"]
        questions = record.get("questions") or []
        question_axis = questions or [None]
        cells = []
        for realization in record["realizations"]:
            for question in question_axis:
                qid = question["id"] if question else None
                query = CellQuery(
                    instance_id=instance_id,
                    realization_id=realization["id"],
                    question_id=qid,
                    realization_text=realization.get("text"),
                    question_text=question.get("text") if question else None,
                )
                where = f"({instance_id},{realization['id']},{qid or SENTINEL_QUESTION_ID})"
                scores = _check_scores(classifier(query), n_classes, where)
                probs = _softmax(scores)
                cells.append(
                    {"r": realization["id"], "q": qid or SENTINEL_QUESTION_ID, "probs": probs}
                )
                n_cells += 1
                label = question.get("true_class") if question else record.get("true_class")
                if label is not None:
                    logit_lines.append(
                        json.dumps(
                            {
                                "id": f"{instance_id}/{realization['id']}/"
                                f"{qid or SENTINEL_QUESTION_ID}",
                                "logits": scores,
                                "label": label,
                            }
                        )
                    )

        out_record: dict = {"instance_id": instance_id}
        out_record["realizations"] = [
            {
                key: value
                for key, value in (
                    ("id", r["id"]),
                    ("readability", r.get("readability")),
                    ("text", r.get("text")),
                )
                if value is not None
            }
            for r in record["realizations"]
        ]
        if questions:
            out_record["questions"] = questions
        elif record.get("true_class") is not None:
            out_record["questions"] = [
                {"id": SENTINEL_QUESTION_ID, "true_class": record["true_class"]}
            ]
        out_record["cells"] = cells
        dataset_lines.append(json.dumps(out_record, ensure_ascii=False))

    dataset_path = Path(dataset_path)
    staging = dataset_path.with_name(dataset_path.name + ".staging")
    staging.write_text("\n".join(dataset_lines) + "\n", encoding="utf-8")
    try:
        validate_dataset_file(staging)
    except AdapterError:
        staging.unlink(missing_ok=True)
        raise
    os.replace(staging, dataset_path)

    if logits_path is not None:
        Path(logits_path).write_text(
            "\n".join(logit_lines) + ("\n" if logit_lines else ""), encoding="utf-8"
        )
    return {
        "instances": len(corpus),
        "cells": n_cells,
        "logit_records": len(logit_lines),
        "questions_removed": removed,
    }
