"""Influence decomposition over a dataset of per-cell output distributions.

Influence is measured in nats as a Jensen gap: the entropy of an averaged
output distribution minus the average entropy under a finer conditioning.
Concavity of entropy makes every gap nonnegative, and the decomposition
closes by construction:

    total    = question + context     (per-cell vs per-realization averages)
    context  = semantic + linguistic  (per-realization vs per-instance averages)

Four conditional-entropy aggregates drive everything, each a uniform
average: over all cells, over per-realization question-averaged
distributions, and over per-instance cell-averaged distributions, plus
the entropy of the grand mean distribution. Single-element datasets have
a single (sentinel) question per realization, which forces the question
term to zero and makes ``context`` the influence of the lone text element.

Per-instance partial results are accumulated with error-compensated
summation in instance-id lexicographic order, so reports are bit-identical
regardless of instance order in the file or of the thread count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from influx.dataset import Dataset, Distribution, Instance, ValidationError
from influx.parallel import ordered_map

# Negative Jensen gaps beyond this are a bug, not rounding noise.
CLAMP_TOLERANCE = 1e-12

_CLOSURE_TOLERANCE = 1e-12


class ConsistencyError(RuntimeError):
    """A computed result violates a structural identity beyond fp noise."""


def entropy(dist: Distribution | Sequence[float] | np.ndarray) -> float:
    """Shannon entropy in nats, with 0 * ln 0 taken as 0."""
    p = dist.probs if isinstance(dist, Distribution) else np.asarray(dist, dtype=np.float64)
    nz = p[p > 0.0]
    return float(-(nz * np.log(nz)).sum())


def _entropy_rows(rows: np.ndarray) -> np.ndarray:
    """Entropy of each row of a 2-d array of probability vectors."""
    safe = np.where(rows > 0.0, rows, 1.0)
    return -(np.where(rows > 0.0, rows * np.log(safe), 0.0)).sum(axis=-1)


def mean_distribution(dists: Sequence[Distribution]) -> Distribution:
    """Arithmetic per-class mean of distributions sharing the same K."""
    if not dists:
        raise ValidationError("mean of empty distribution list")
    k = dists[0].num_classes
    for d in dists[1:]:
        if d.num_classes != k:
            raise ValidationError(
                f"inconsistent number of classes ({d.num_classes} vs {k})"
            )
    stacked = np.stack([d.probs for d in dists])
    return Distribution(stacked.mean(axis=0))


def relative_influence(numerator: float, denominator: float) -> float:
    """Ratio of one influence value to another, e.g. question / total."""
    if denominator <= 0.0:
        raise ValidationError("degenerate influence denominator")
    return numerator / denominator


@dataclass(frozen=True)
class InfluenceReport:
    """Total, per-element, semantic, and linguistic influence in nats.

    Ratios are shares: question and context relative to total, semantic
    and linguistic relative to context. Degenerate denominators (zero
    influence) yield a ratio of 0.
    """

    total: float
    element_question: float
    element_context: float
    semantic: float
    linguistic: float
    relative_question: float
    relative_context: float
    relative_semantic: float
    relative_linguistic: float

    def __post_init__(self) -> None:
        values = (
            self.total,
            self.element_question,
            self.element_context,
            self.semantic,
            self.linguistic,
        )
        if any(v < 0.0 for v in values):
            raise ConsistencyError(f"negative influence value in report: {values}")
        if abs(self.element_context + self.element_question - self.total) > _CLOSURE_TOLERANCE:
            raise ConsistencyError("chain-rule closure violated: context + question != total")
        if abs(self.semantic + self.linguistic - self.element_context) > _CLOSURE_TOLERANCE:
            raise ConsistencyError("chain-rule closure violated: semantic + linguistic != context")
        ratios = (
            self.relative_question,
            self.relative_context,
            self.relative_semantic,
            self.relative_linguistic,
        )
        if any(not 0.0 <= r <= 1.0 for r in ratios):
            raise ConsistencyError(f"relative influence outside [0, 1]: {ratios}")

    def to_dict(self) -> dict:
        return {
            "total": self.total,
            "question": self.element_question,
            "context": self.element_context,
            "semantic": self.semantic,
            "linguistic": self.linguistic,
            "relative": {
                "question": self.relative_question,
                "context": self.relative_context,
                "semantic": self.relative_semantic,
                "linguistic": self.relative_linguistic,
            },
            "unit": "nats",
        }


def clamp_gap(value: float, name: str) -> float:
    """Clamp fp cancellation noise in a Jensen gap to zero.

    Values below ``-CLAMP_TOLERANCE`` indicate a real bug and raise.
    """
    if value >= 0.0:
        return value
    if value >= -CLAMP_TOLERANCE:
        return 0.0
    raise ConsistencyError(f"{name} influence is {value:.3e}, beyond rounding noise")


def share(part: float, whole: float) -> float:
    """``part / whole`` clipped to [0, 1]; 0 when the whole is degenerate."""
    if whole <= 0.0:
        return 0.0
    return min(part / whole, 1.0)


def report_from_entropies(
    h_marginal: float,
    h_cells: float,
    h_realizations: float,
    h_instances: float,
) -> InfluenceReport:
    """Assemble a report from the four entropy aggregates.

    The question and linguistic terms are differences of the clamped
    parents, which makes both closure identities hold by construction.
    """
    total = clamp_gap(h_marginal - h_cells, "total")
    context = clamp_gap(h_marginal - h_realizations, "context")
    semantic = clamp_gap(h_marginal - h_instances, "semantic")
    question = clamp_gap(total - context, "question")
    linguistic = clamp_gap(context - semantic, "linguistic")
    return InfluenceReport(
        total=total,
        element_question=question,
        element_context=context,
        semantic=semantic,
        linguistic=linguistic,
        relative_question=share(question, total),
        relative_context=share(context, total),
        relative_semantic=share(semantic, context),
        relative_linguistic=share(linguistic, context),
    )


class _InstanceTerms(NamedTuple):
    mean_cell: np.ndarray
    h_cells: float
    h_realizations: float
    h_instance: float


def _instance_terms(inst: Instance) -> _InstanceTerms:
    cells = inst.cell_array()  # (n_real, n_quest, K)
    n_real, n_quest, k = cells.shape
    flat = cells.reshape(n_real * n_quest, k)
    h_cells = float(_entropy_rows(flat).mean())
    per_realization = cells.mean(axis=1)  # question-averaged, per realization
    h_realizations = float(_entropy_rows(per_realization).mean())
    mean_cell = flat.mean(axis=0)
    return _InstanceTerms(mean_cell, h_cells, h_realizations, entropy(mean_cell))


def influence_report(ds: Dataset, threads: int = 1) -> InfluenceReport:
    """Compute the full influence decomposition of a validated dataset."""
    terms = ordered_map(_instance_terms, ds.instances, threads)
    ranked = sorted(zip((i.instance_id for i in ds.instances), terms))
    n = len(ranked)

    marginal = np.array(
        [math.fsum(t.mean_cell[k] for _, t in ranked) for k in range(ds.num_classes)]
    ) / n
    h_cells = math.fsum(t.h_cells for _, t in ranked) / n
    h_realizations = math.fsum(t.h_realizations for _, t in ranked) / n
    h_instances = math.fsum(t.h_instance for _, t in ranked) / n
    return report_from_entropies(entropy(marginal), h_cells, h_realizations, h_instances)
