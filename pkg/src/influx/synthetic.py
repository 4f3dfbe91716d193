"""Synthetic datasets with known structure, and an exact influence oracle.

Generation story, per instance: a per-(instance, question) direction on
the probability simplex fixes where the answer distribution should sit;
each realization perturbs it with its own simplex draw. Both draws come
from normalized unit-rate gamma variates (uniform on the simplex) keyed
by a counter scheme, so every cell is reproducible independently of
iteration order. The cell distribution is

    cell = normalize((direction * perturbation ** 0.5) ** sharpness)

Raising to the ``sharpness`` power concentrates every cell: its entropy
is strictly decreasing in sharpness for a fixed seed, so a sharpness
ladder drives all conditional entropies toward zero.

Realizations get deterministic filler texts of varying syllable density
(with their measured reading-ease scores) and questions get gold
classes, so that every downstream command can run on generated data.

Because instances, realizations, and questions are all weighted
uniformly both here and in the estimators, the estimator averages are
*identities* on this data, and :func:`exact_influence` (a pure-Python
exhaustive enumeration with compensated summation) must agree with
``influence_report`` to rounding error. That equivalence is the
strongest available end-to-end check of the estimator path.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Mapping

import numpy as np

from influx.dataset import (
    Dataset,
    Distribution,
    Question,
    Realization,
    Task,
    ValidationError,
    build_dataset,
    build_instance,
)
from influx.influence import InfluenceReport
from influx.readability import fres_score

_STREAM_DIRECTION = 0
_STREAM_PERTURBATION = 1
_PERTURBATION_WEIGHT = 0.5

_MAX_ORACLE_CELLS = 10**6


@dataclass(frozen=True)
class SyntheticSpec:
    """Shape and randomness of one synthetic dataset."""

    n_semantic: int
    n_realizations_per: int
    n_questions_per: int
    n_classes: int
    seed: int
    sharpness: float = 1.0

    def __post_init__(self) -> None:
        for name in ("n_semantic", "n_realizations_per", "n_questions_per", "n_classes", "seed"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool):
                raise ValidationError(f"{name} must be an integer")
        for name in ("n_semantic", "n_realizations_per", "n_questions_per"):
            if getattr(self, name) < 1:
                raise ValidationError(f"{name} must be >= 1")
        if self.n_classes < 2:
            raise ValidationError("n_classes must be >= 2")
        if self.seed < 0:
            raise ValidationError("seed must be a nonnegative integer")
        if not isinstance(self.sharpness, (int, float)) or isinstance(self.sharpness, bool):
            raise ValidationError("sharpness must be a positive real")
        if not (math.isfinite(self.sharpness) and self.sharpness > 0):
            raise ValidationError("sharpness must be a positive real")

    @classmethod
    def from_dict(cls, data: Mapping) -> "SyntheticSpec":
        allowed = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - allowed
        if unknown:
            raise ValidationError(
                f"unknown spec fields {sorted(unknown)} (expected {sorted(allowed)})"
            )
        try:
            return cls(**data)
        except TypeError as exc:
            raise ValidationError(f"invalid spec: {exc}") from exc

    def to_dict(self) -> dict:
        return asdict(self)


def _simplex_point(key: tuple[int, ...], k: int) -> np.ndarray:
    """Uniform simplex draw from normalized unit-rate gamma variates."""
    rng = np.random.default_rng(key)
    x = np.maximum(rng.standard_exponential(k), 1e-300)
    return x / x.sum()


_EASY_WORDS = ("a", "plain", "tale", "of", "two", "cats", "and", "one", "dog")
_HARD_WORDS = (
    "remarkable",
    "elaboration",
    "complicated",
    "vocabulary",
    "deliberation",
    "information",
)


def _realization_text(i: int, j: int) -> str:
    easy = " ".join(_EASY_WORDS[: 4 + (i + j) % 5])
    hard = " ".join(_HARD_WORDS[: 1 + j % len(_HARD_WORDS)])
    marker = "x" * (j + 1)
    return f"Wording {marker} retells the story. {easy.capitalize()}. {hard.capitalize()}."


def _question_text(i: int, k: int) -> str:
    if k % 3 == 2:
        # a deliberately wording-bound probe, so filters have work to do
        return f"What does the underlined word in paragraph {k} mean?"
    return f"Which option best matches episode {k + 1} of story {i + 1}?"


def generate_synthetic(spec: SyntheticSpec) -> Dataset:
    """Deterministically generate a dataset from a spec.

    Emits a multi-element dataset; with ``n_questions_per == 1`` the
    questions are suppressed and the dataset is single-element, its gold
    class declared through the sentinel row.
    """
    single = spec.n_questions_per == 1
    k = spec.n_classes
    instances = []
    for i in range(spec.n_semantic):
        realizations = []
        for j in range(spec.n_realizations_per):
            text = _realization_text(i, j)
            realizations.append(
                Realization(f"r{j:03d}", readability=fres_score(text).score, text=text)
            )

        directions = [
            _simplex_point((spec.seed, _STREAM_DIRECTION, i, q), k)
            for q in range(spec.n_questions_per)
        ]
        gold = [int(np.argmax(d)) for d in directions]
        if single:
            questions: list[Question] = []
            qids = ["_"]
            true_class = gold[0]
        else:
            questions = [
                Question(f"q{q:03d}", text=_question_text(i, q), true_class=gold[q])
                for q in range(spec.n_questions_per)
            ]
            qids = [q.question_id for q in questions]
            true_class = None

        cells = {}
        for q, direction in enumerate(directions):
            log_direction = np.log(direction)
            for j in range(spec.n_realizations_per):
                perturbation = _simplex_point(
                    (spec.seed, _STREAM_PERTURBATION, i, q, j), k
                )
                scores = spec.sharpness * (
                    log_direction + _PERTURBATION_WEIGHT * np.log(perturbation)
                )
                shifted = np.exp(scores - scores.max())
                cells[(f"r{j:03d}", qids[q])] = Distribution(shifted / shifted.sum())
        instances.append(
            build_instance(f"s{i:03d}", realizations, questions, cells, true_class=true_class)
        )
    return build_dataset(instances, Task.SINGLE_ELEMENT if single else Task.MULTI_ELEMENT)


def _entropy_exact(probs: list[float]) -> float:
    return -math.fsum(p * math.log(p) for p in probs if p > 0.0)


def _clamp_exact(value: float, name: str) -> float:
    if value < -1e-12:
        raise ValidationError(f"enumerated {name} influence is negative: {value:.3e}")
    return max(value, 0.0)


def exact_influence(ds: Dataset) -> InfluenceReport:
    """Influence decomposition by exhaustive enumeration.

    Every expectation is evaluated as a finite sum with uniform weights
    (1/n instances, 1/|R| realizations, 1/|Q| questions) in pure Python
    with ``math.fsum`` accumulation. Deliberately independent of
    ``influence_report``: its own loops, its own entropy, its own report
    assembly. Only enumerable supports are accepted.
    """
    total_cells = sum(
        len(inst.realizations) * len(inst.question_ids()) for inst in ds.instances
    )
    if total_cells > _MAX_ORACLE_CELLS:
        raise ValidationError(
            f"support too large to enumerate ({total_cells} cells > {_MAX_ORACLE_CELLS})"
        )

    k = ds.num_classes
    instances = sorted(ds.instances, key=lambda inst: inst.instance_id)
    n = len(instances)

    instance_means: list[list[float]] = []
    h_cells_terms: list[float] = []
    h_realization_terms: list[float] = []
    h_instance_terms: list[float] = []
    for inst in instances:
        qids = inst.question_ids()
        n_real = len(inst.realizations)
        n_quest = len(qids)
        grid = [
            [list(map(float, inst.cells[(r.realization_id, qid)].probs)) for qid in qids]
            for r in inst.realizations
        ]

        h_cells_terms.append(
            math.fsum(_entropy_exact(cell) for row in grid for cell in row)
            / (n_real * n_quest)
        )
        realization_entropies = []
        for row in grid:
            question_mean = [
                math.fsum(cell[c] for cell in row) / n_quest for c in range(k)
            ]
            realization_entropies.append(_entropy_exact(question_mean))
        h_realization_terms.append(math.fsum(realization_entropies) / n_real)

        instance_mean = [
            math.fsum(cell[c] for row in grid for cell in row) / (n_real * n_quest)
            for c in range(k)
        ]
        instance_means.append(instance_mean)
        h_instance_terms.append(_entropy_exact(instance_mean))

    marginal = [math.fsum(m[c] for m in instance_means) / n for c in range(k)]
    h_marginal = _entropy_exact(marginal)
    h_cells = math.fsum(h_cells_terms) / n
    h_realizations = math.fsum(h_realization_terms) / n
    h_instances = math.fsum(h_instance_terms) / n

    total = _clamp_exact(h_marginal - h_cells, "total")
    context = _clamp_exact(h_marginal - h_realizations, "context")
    semantic = _clamp_exact(h_marginal - h_instances, "semantic")
    question = _clamp_exact(total - context, "question")
    linguistic = _clamp_exact(context - semantic, "linguistic")

    def ratio(part: float, whole: float) -> float:
        return min(part / whole, 1.0) if whole > 0.0 else 0.0

    return InfluenceReport(
        total=total,
        element_question=question,
        element_context=context,
        semantic=semantic,
        linguistic=linguistic,
        relative_question=ratio(question, total),
        relative_context=ratio(context, total),
        relative_semantic=ratio(semantic, context),
        relative_linguistic=ratio(linguistic, context),
    )
