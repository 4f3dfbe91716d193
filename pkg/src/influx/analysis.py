"""Derived analyses over datasets and reports.

* rank normalization of scores onto (0, 1];
* concordance curves: after an entropy filter retains the most confident
  fraction of (realization, question) cells, how often does the
  readability ordering of two paraphrases agree with the ordering of the
  probability they give the true class;
* influence sweeps: the influence decomposition recomputed on the
  top-scoring fraction of instances, for a caller-supplied instance
  ordering, optionally next to a seeded random-ordering baseline.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.stats import rankdata

from influx.dataset import Dataset, ValidationError
from influx.influence import entropy, influence_report

SWEEP_VALUES = ("relative_question", "relative_context", "relative_semantic", "total")


def normalized_ranks(scores: Sequence[float]) -> np.ndarray:
    """Ascending ranks 1..n (ties averaged) divided by n; output in (0, 1]."""
    arr = np.asarray(scores, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise ValidationError("normalized_ranks needs a non-empty score vector")
    return rankdata(arr, method="average") / arr.size


def subset_size(fraction: float, n: int) -> int:
    """ceil(fraction * n), guarded against fp slop on grid fractions."""
    m = int(math.ceil(round(fraction * n, 9)))
    return min(max(m, 1), n)


def _clean_fractions(fractions: Iterable[float]) -> list[float]:
    cleaned = sorted(set(float(f) for f in fractions))
    if not cleaned:
        raise ValidationError("no fractions given")
    if cleaned[0] <= 0.0 or cleaned[-1] > 1.0:
        raise ValidationError("fractions must lie in (0, 1]")
    return cleaned


@dataclass(frozen=True)
class CurvePoint:
    fraction: float
    value: float | None
    n: int


@dataclass(frozen=True)
class ConcordanceItem:
    instance_id: str
    question_id: str
    realization_id: str
    readability: float
    true_class_prob: float
    entropy: float


@dataclass(frozen=True)
class ConcordanceCurve:
    min_gap: float
    points: tuple[CurvePoint, ...]


@dataclass(frozen=True)
class SweepCurve:
    value: str
    points: tuple[CurvePoint, ...]
    baseline: tuple[CurvePoint, ...] | None = None
    baseline_seed: int | None = None


def items_from_dataset(ds: Dataset) -> list[ConcordanceItem]:
    """One item per cell, carrying readability, true-class prob, and entropy.

    Requires a readability on every realization and a gold class on every
    question (single-element instances declare it via the sentinel row).
    """
    items: list[ConcordanceItem] = []
    for inst in ds.instances:
        for r in inst.realizations:
            if r.readability is None:
                raise ValidationError(
                    f"instance '{inst.instance_id}': realization '{r.realization_id}' "
                    "has no readability"
                )
        labels: dict[str, int] = {}
        if inst.questions:
            for q in inst.questions:
                if q.true_class is None:
                    raise ValidationError(
                        f"instance '{inst.instance_id}': question '{q.question_id}' "
                        "has no true_class"
                    )
                labels[q.question_id] = q.true_class
        else:
            if inst.true_class is None:
                raise ValidationError(
                    f"instance '{inst.instance_id}': no true_class declared"
                )
            labels[inst.question_ids()[0]] = inst.true_class
        for r in inst.realizations:
            for qid in inst.question_ids():
                dist = inst.cells[(r.realization_id, qid)]
                items.append(
                    ConcordanceItem(
                        instance_id=inst.instance_id,
                        question_id=qid,
                        realization_id=r.realization_id,
                        readability=float(r.readability),
                        true_class_prob=float(dist.probs[labels[qid]]),
                        entropy=entropy(dist),
                    )
                )
    return items


def concordance_curve(
    items: Sequence[ConcordanceItem],
    min_gap: float,
    fractions: Iterable[float],
) -> ConcordanceCurve:
    """Agreement between readability and true-class-probability orderings.

    For each retain fraction, keeps the lowest-entropy items (ties by
    input order), pairs items sharing (instance, question) whose
    readability gap is at least ``min_gap``, and scores the fraction of
    pairs ordered the same way by readability and probability. Pairs with
    equal probabilities count half. Fractions with no qualifying pairs
    report an undefined agreement and a zero pair count.
    """
    items = list(items)
    if not items:
        raise ValidationError("no concordance items")
    if min_gap < 0:
        raise ValidationError("min_gap must be nonnegative")
    fracs = _clean_fractions(fractions)
    order = sorted(range(len(items)), key=lambda i: (items[i].entropy, i))

    points: list[CurvePoint] = []
    for fraction in fracs:
        kept = order[: subset_size(fraction, len(items))]
        groups: dict[tuple[str, str], list[int]] = defaultdict(list)
        for idx in kept:
            it = items[idx]
            groups[(it.instance_id, it.question_id)].append(idx)
        agree = 0.0
        pairs = 0
        for members in groups.values():
            for ia, ib in combinations(members, 2):
                a, b = items[ia], items[ib]
                if abs(a.readability - b.readability) < min_gap:
                    continue
                pairs += 1
                if a.true_class_prob == b.true_class_prob:
                    agree += 0.5
                elif (a.readability - b.readability) * (
                    a.true_class_prob - b.true_class_prob
                ) > 0:
                    agree += 1.0
        points.append(CurvePoint(fraction, agree / pairs if pairs else None, pairs))
    return ConcordanceCurve(min_gap, tuple(points))


def _sweep_points(
    ds: Dataset,
    ordered_instances: Sequence,
    fractions: Sequence[float],
    value: str,
    threads: int,
) -> tuple[CurvePoint, ...]:
    points = []
    for fraction in fractions:
        m = subset_size(fraction, len(ordered_instances))
        sub = Dataset(ds.task, ds.num_classes, tuple(ordered_instances[:m]))
        report = influence_report(sub, threads=threads)
        points.append(CurvePoint(fraction, getattr(report, value), m))
    return tuple(points)


def influence_sweep(
    ds: Dataset,
    ordering_scores: Mapping[str, float],
    fractions: Iterable[float],
    value: str = "relative_question",
    baseline_seed: int | None = None,
    threads: int = 1,
) -> SweepCurve:
    """Influence values on top-scoring instance subsets of growing size.

    Instances are ranked by descending score (ties by instance id); each
    fraction keeps the top ceil(fraction * n) and recomputes the report.
    With ``baseline_seed``, a parallel curve is computed under one seeded
    uniform-random ordering of the instances.
    """
    if value not in SWEEP_VALUES:
        raise ValidationError(f"unknown sweep value '{value}' (expected one of {SWEEP_VALUES})")
    fracs = _clean_fractions(fractions)
    for inst in ds.instances:
        if inst.instance_id not in ordering_scores:
            raise ValidationError(f"missing score for instance '{inst.instance_id}'")
    ranked = sorted(
        ds.instances,
        key=lambda inst: (-float(ordering_scores[inst.instance_id]), inst.instance_id),
    )
    points = _sweep_points(ds, ranked, fracs, value, threads)

    baseline = None
    if baseline_seed is not None:
        perm = np.random.default_rng(baseline_seed).permutation(len(ds.instances))
        shuffled = [ds.instances[j] for j in perm]
        baseline = _sweep_points(ds, shuffled, fracs, value, threads)
    return SweepCurve(value, points, baseline, baseline_seed)
