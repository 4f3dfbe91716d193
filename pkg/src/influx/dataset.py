"""Data model and JSONL ingestion for classifier-output datasets.

A dataset is a list of instances. Each instance carries one or more
realizations (alternative wordings of the same underlying content), an
optional set of questions, and one output distribution per
(realization, question) cell. Single-element tasks (sentiment and the
like) have no questions; their cells are keyed by the reserved sentinel
question id ``"_"``.

The cell grid is dense by contract: the estimators average uniformly
over realizations and questions, which presumes every pair is present.
Files with holes are rejected, never imputed.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

PROB_SUM_TOLERANCE = 1e-6
SENTINEL_QUESTION_ID = "_"

# Below this, a probability vector counts as already normalized and is left
# untouched, keeping save -> load cycles bit-stable.
_RENORM_SKIP = 1e-12


class ValidationError(ValueError):
    """An input record, file, or argument violates the data contract."""


class Task(str, Enum):
    MULTI_ELEMENT = "multi_element"
    SINGLE_ELEMENT = "single_element"


@dataclass(frozen=True, eq=False)
class Distribution:
    """Probability vector over the K output classes."""

    probs: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.probs, dtype=np.float64)
        arr.setflags(write=False)
        object.__setattr__(self, "probs", arr)

    @property
    def num_classes(self) -> int:
        return int(self.probs.shape[0])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Distribution):
            return NotImplemented
        return np.array_equal(self.probs, other.probs)


def validate_distribution(probs: Sequence[float]) -> Distribution:
    """Validate and renormalize a raw probability vector.

    Entries must be nonnegative and finite, the vector must have at least
    two classes, and the sum must lie within ``1 +/- 1e-6`` (loose enough
    to admit float32-serialized model outputs). The result is rescaled to
    unit sum unless it already is, to within 1e-12.
    """
    try:
        arr = np.asarray(probs, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"non-numeric probability: {exc}") from exc
    if arr.ndim != 1 or arr.size < 2:
        raise ValidationError("distribution needs at least 2 classes")
    if not np.all(np.isfinite(arr)):
        raise ValidationError("non-finite probability")
    if np.any(arr < 0.0):
        raise ValidationError(f"negative probability {arr.min():.6g}")
    # an entry above 1 + tolerance can never sum to 1 within tolerance, and
    # rejecting it here keeps the sum itself from overflowing
    if arr.max() > 1.0 + PROB_SUM_TOLERANCE:
        raise ValidationError(f"probability {arr.max():.6g} greater than 1")
    total = math.fsum(arr.tolist())
    if abs(total - 1.0) > PROB_SUM_TOLERANCE:
        raise ValidationError(f"probability sum {total:.6g} outside tolerance")
    if abs(total - 1.0) > _RENORM_SKIP:
        arr = arr / total
    return Distribution(arr)


@dataclass(frozen=True)
class Realization:
    realization_id: str
    readability: float | None = None
    text: str | None = None


@dataclass(frozen=True)
class Question:
    question_id: str
    text: str | None = None
    true_class: int | None = None


@dataclass(frozen=True)
class Instance:
    """One semantic unit: realizations x questions with a dense cell grid.

    ``questions`` holds the real questions and is empty for single-element
    tasks, whose cells are keyed by the sentinel question id. Such
    instances may still carry a gold label in ``true_class`` (declared in
    the wire format as a sentinel question row).
    """

    instance_id: str
    realizations: tuple[Realization, ...]
    questions: tuple[Question, ...]
    cells: Mapping[tuple[str, str], Distribution] = field(repr=False)
    true_class: int | None = None

    def question_ids(self) -> list[str]:
        if self.questions:
            return [q.question_id for q in self.questions]
        return [SENTINEL_QUESTION_ID]

    @property
    def num_classes(self) -> int:
        return next(iter(self.cells.values())).num_classes

    def cell_array(self) -> np.ndarray:
        """Cell distributions as an array of shape (n_real, n_quest, K)."""
        qids = self.question_ids()
        rows = [
            [self.cells[(r.realization_id, qid)].probs for qid in qids]
            for r in self.realizations
        ]
        return np.asarray(rows, dtype=np.float64)


@dataclass(frozen=True)
class Dataset:
    task: Task
    num_classes: int
    instances: tuple[Instance, ...]


def build_instance(
    instance_id: str,
    realizations: Iterable[Realization],
    questions: Iterable[Question],
    cells: Mapping[tuple[str, str], Distribution | Sequence[float]],
    true_class: int | None = None,
) -> Instance:
    """Assemble and validate a single instance.

    Checks id uniqueness, grid completeness, and class-count consistency.
    Raw probability sequences in ``cells`` are validated on the way in.
    """
    reals = tuple(realizations)
    quests = tuple(questions)
    if not instance_id:
        raise ValidationError("empty instance_id")
    if not reals:
        raise ValidationError(f"instance '{instance_id}': no realizations")

    rids = [r.realization_id for r in reals]
    if len(set(rids)) != len(rids):
        raise ValidationError(f"instance '{instance_id}': duplicate realization id")
    for r in reals:
        if r.readability is not None and not math.isfinite(r.readability):
            raise ValidationError(
                f"instance '{instance_id}': realization '{r.realization_id}': "
                "non-finite readability"
            )

    qids = [q.question_id for q in quests]
    if len(set(qids)) != len(qids):
        raise ValidationError(f"instance '{instance_id}': duplicate question id")
    if SENTINEL_QUESTION_ID in qids:
        raise ValidationError(
            f"instance '{instance_id}': question id '{SENTINEL_QUESTION_ID}' is reserved"
        )

    axis = qids or [SENTINEL_QUESTION_ID]
    checked: dict[tuple[str, str], Distribution] = {}
    k: int | None = None
    for (rid, qid), value in cells.items():
        if rid not in rids:
            raise ValidationError(
                f"instance '{instance_id}': cell references unknown realization '{rid}'"
            )
        if qid not in axis:
            raise ValidationError(
                f"instance '{instance_id}': cell references unknown question '{qid}'"
            )
        if (rid, qid) in checked:
            raise ValidationError(f"instance '{instance_id}': duplicate cell ({rid},{qid})")
        dist = value if isinstance(value, Distribution) else validate_distribution(value)
        if k is None:
            k = dist.num_classes
        elif dist.num_classes != k:
            raise ValidationError(
                f"instance '{instance_id}': inconsistent number of classes "
                f"({dist.num_classes} vs {k})"
            )
        checked[(rid, qid)] = dist
    for rid in rids:
        for qid in axis:
            if (rid, qid) not in checked:
                raise ValidationError(
                    f"instance '{instance_id}': incomplete cell grid: missing ({rid},{qid})"
                )

    assert k is not None
    for q in quests:
        if q.true_class is not None and not 0 <= q.true_class < k:
            raise ValidationError(
                f"instance '{instance_id}': question '{q.question_id}': "
                f"true_class {q.true_class} outside [0, {k})"
            )
    if true_class is not None and not 0 <= true_class < k:
        raise ValidationError(
            f"instance '{instance_id}': true_class {true_class} outside [0, {k})"
        )
    return Instance(instance_id, reals, quests, checked, true_class)


def build_dataset(instances: Iterable[Instance], task: Task | str | None = None) -> Dataset:
    """Assemble a dataset, inferring the task from questions when not given."""
    insts = tuple(instances)
    if not insts:
        raise ValidationError("empty dataset")

    ids = [i.instance_id for i in insts]
    if len(set(ids)) != len(ids):
        dup = next(x for x in ids if ids.count(x) > 1)
        raise ValidationError(f"duplicate instance_id '{dup}'")

    k = insts[0].num_classes
    for inst in insts[1:]:
        if inst.num_classes != k:
            raise ValidationError(
                f"instance '{inst.instance_id}': inconsistent number of classes "
                f"({inst.num_classes} vs {k})"
            )

    with_q = [bool(i.questions) for i in insts]
    if task is None:
        if all(with_q):
            task = Task.MULTI_ELEMENT
        elif not any(with_q):
            task = Task.SINGLE_ELEMENT
        else:
            raise ValidationError(
                "mixed task: some instances have questions and some do not"
            )
    else:
        task = Task(task)
        if task is Task.MULTI_ELEMENT and not all(with_q):
            bad = insts[with_q.index(False)].instance_id
            raise ValidationError(
                f"multi_element dataset requires at least one question per instance "
                f"(instance '{bad}' has none)"
            )
        if task is Task.SINGLE_ELEMENT and any(with_q):
            bad = insts[with_q.index(True)].instance_id
            raise ValidationError(
                f"single_element dataset cannot carry questions (instance '{bad}')"
            )
    return Dataset(task, k, insts)


def _parse_instance(obj: object, lineno: int) -> Instance:
    def fail(msg: str) -> ValidationError:
        return ValidationError(f"line {lineno}: {msg}")

    if not isinstance(obj, dict):
        raise fail("instance record must be a JSON object")
    iid = obj.get("instance_id")
    if not isinstance(iid, str) or not iid:
        raise fail("missing or invalid 'instance_id'")

    raw_reals = obj.get("realizations")
    if not isinstance(raw_reals, list) or not raw_reals:
        raise fail(f"instance '{iid}': 'realizations' must be a non-empty list")
    reals = []
    for r in raw_reals:
        if not isinstance(r, dict) or not isinstance(r.get("id"), str):
            raise fail(f"instance '{iid}': realization entries need a string 'id'")
        readability = r.get("readability")
        if readability is not None and not isinstance(readability, (int, float)):
            raise fail(f"instance '{iid}': realization '{r['id']}': invalid readability")
        text = r.get("text")
        if text is not None and not isinstance(text, str):
            raise fail(f"instance '{iid}': realization '{r['id']}': invalid text")
        reals.append(
            Realization(r["id"], None if readability is None else float(readability), text)
        )

    raw_quests = obj.get("questions") or []
    if not isinstance(raw_quests, list):
        raise fail(f"instance '{iid}': 'questions' must be a list")
    quests = []
    sentinel_true_class: int | None = None
    seen_sentinel = False
    for q in raw_quests:
        if not isinstance(q, dict) or not isinstance(q.get("id"), str):
            raise fail(f"instance '{iid}': question entries need a string 'id'")
        tc = q.get("true_class")
        if tc is not None and not isinstance(tc, int):
            raise fail(f"instance '{iid}': question '{q['id']}': invalid true_class")
        if q["id"] == SENTINEL_QUESTION_ID:
            # Sentinel row: declares the gold class of a single-element instance.
            if seen_sentinel:
                raise fail(f"instance '{iid}': duplicate question id '_'")
            seen_sentinel = True
            sentinel_true_class = tc
            continue
        text = q.get("text")
        if text is not None and not isinstance(text, str):
            raise fail(f"instance '{iid}': question '{q['id']}': invalid text")
        quests.append(Question(q["id"], text, tc))
    if seen_sentinel and quests:
        raise fail(f"instance '{iid}': sentinel question cannot be mixed with real questions")

    raw_cells = obj.get("cells")
    if not isinstance(raw_cells, list) or not raw_cells:
        raise fail(f"instance '{iid}': 'cells' must be a non-empty list")
    cells: dict[tuple[str, str], Sequence[float]] = {}
    for c in raw_cells:
        if (
            not isinstance(c, dict)
            or not isinstance(c.get("r"), str)
            or not isinstance(c.get("q"), str)
            or not isinstance(c.get("probs"), list)
        ):
            raise fail(f"instance '{iid}': cell entries need 'r', 'q' and a 'probs' list")
        key = (c["r"], c["q"])
        if key in cells:
            raise fail(f"instance '{iid}': duplicate cell ({key[0]},{key[1]})")
        cells[key] = c["probs"]

    try:
        return build_instance(iid, reals, quests, cells, true_class=sentinel_true_class)
    except ValidationError as exc:
        raise fail(str(exc)) from exc


def load_dataset(path: str | Path, task: Task | str | None = None) -> Dataset:
    """Load and validate a dataset from a JSONL file, one instance per line.

    ``task`` may be a :class:`Task`, its string value, or ``None`` to infer
    from the presence of questions. Raises :class:`ValidationError` with a
    line number on any malformed or contract-violating record.
    """
    path = Path(path)
    instances: list[Instance] = []
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValidationError(f"line {lineno}: malformed JSON: {exc.msg}") from exc
            instances.append(_parse_instance(obj, lineno))
    if not instances:
        raise ValidationError(f"{path}: empty dataset")
    return build_dataset(instances, task)


def _instance_record(inst: Instance) -> dict:
    record: dict = {"instance_id": inst.instance_id}
    reals = []
    for r in inst.realizations:
        entry: dict = {"id": r.realization_id}
        if r.readability is not None:
            entry["readability"] = r.readability
        if r.text is not None:
            entry["text"] = r.text
        reals.append(entry)
    record["realizations"] = reals

    if inst.questions:
        quests = []
        for q in inst.questions:
            entry = {"id": q.question_id}
            if q.text is not None:
                entry["text"] = q.text
            if q.true_class is not None:
                entry["true_class"] = q.true_class
            quests.append(entry)
        record["questions"] = quests
    elif inst.true_class is not None:
        record["questions"] = [
            {"id": SENTINEL_QUESTION_ID, "true_class": inst.true_class}
        ]

    cells = []
    for r in inst.realizations:
        for qid in inst.question_ids():
            dist = inst.cells[(r.realization_id, qid)]
            cells.append(
                {"r": r.realization_id, "q": qid, "probs": dist.probs.tolist()}
            )
    record["cells"] = cells
    return record


def dataset_to_jsonl(ds: Dataset) -> str:
    """Serialize a dataset to JSONL text (the on-disk wire format)."""
    lines = [json.dumps(_instance_record(i), ensure_ascii=False) for i in ds.instances]
    return "\n".join(lines) + "\n"


def save_dataset(ds: Dataset, path: str | Path) -> None:
    Path(path).write_text(dataset_to_jsonl(ds), encoding="utf-8")
