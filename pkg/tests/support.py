"""Shared test utilities: dataset builders and independent oracles.

The oracles here are deliberately naive (flat loops, direct formulas)
and never call the code paths they are used to check.
"""

from __future__ import annotations

import math
from itertools import count

import numpy as np

from influx.dataset import (
    Dataset,
    Question,
    Realization,
    build_dataset,
    build_instance,
)


def entropy_oracle(probs) -> float:
    """Direct -sum(p ln p) evaluation."""
    return -math.fsum(p * math.log(p) for p in probs if p > 0)


def grid_instance(iid, cell_rows, readabilities=None, true_classes=None, texts=None):
    """Instance from a nested list: cell_rows[realization][question] = probs."""
    n_real = len(cell_rows)
    n_quest = len(cell_rows[0])
    reals = [
        Realization(
            f"r{j + 1}",
            readability=None if readabilities is None else readabilities[j],
            text=None if texts is None else texts[j],
        )
        for j in range(n_real)
    ]
    quests = [
        Question(
            f"q{k + 1}",
            true_class=None if true_classes is None else true_classes[k],
        )
        for k in range(n_quest)
    ]
    cells = {
        (f"r{j + 1}", f"q{k + 1}"): cell_rows[j][k]
        for j in range(n_real)
        for k in range(n_quest)
    }
    return build_instance(iid, reals, quests, cells)


def single_instance(iid, probs_by_realization, readabilities=None, true_class=None):
    """Single-element instance: one distribution per realization."""
    reals = [
        Realization(
            f"r{j + 1}",
            readability=None if readabilities is None else readabilities[j],
        )
        for j in range(len(probs_by_realization))
    ]
    cells = {(f"r{j + 1}", "_"): p for j, p in enumerate(probs_by_realization)}
    return build_instance(iid, reals, [], cells, true_class=true_class)


def question_decides_dataset() -> Dataset:
    """1 instance, 2x2 grid where only the question matters."""
    rows = [[[1.0, 0.0], [0.0, 1.0]], [[1.0, 0.0], [0.0, 1.0]]]
    return build_dataset([grid_instance("a", rows)])


def realization_decides_dataset() -> Dataset:
    """1 instance, 2x2 grid where only the realization matters."""
    rows = [[[1.0, 0.0], [1.0, 0.0]], [[0.0, 1.0], [0.0, 1.0]]]
    return build_dataset([grid_instance("a", rows)])


def two_instance_dataset() -> Dataset:
    """2 instances, 1x1 grids with opposing sharp distributions."""
    a = grid_instance("A", [[[0.9, 0.1]]])
    b = grid_instance("B", [[[0.1, 0.9]]])
    return build_dataset([a, b])


def random_dataset(rng: np.random.Generator, n_instances=None, n_real=None,
                   n_quest=None, k=None, single=False) -> Dataset:
    """Random dense-grid dataset built straight from Dirichlet draws.

    Independent of the synthetic generator: a second construction path
    for property tests.
    """
    n_instances = n_instances or int(rng.integers(1, 4))
    n_real = n_real or int(rng.integers(1, 4))
    n_quest = 1 if single else (n_quest or int(rng.integers(1, 4)))
    k = k or int(rng.integers(2, 5))
    alpha = float(rng.uniform(0.2, 3.0))
    instances = []
    for i in range(n_instances):
        if single:
            probs = [rng.dirichlet([alpha] * k).tolist() for _ in range(n_real)]
            instances.append(single_instance(f"i{i}", probs))
        else:
            rows = [
                [rng.dirichlet([alpha] * k).tolist() for _ in range(n_quest)]
                for _ in range(n_real)
            ]
            instances.append(grid_instance(f"i{i}", rows))
    return build_dataset(instances)


def concordance_oracle(items, min_gap, fraction):
    """Brute-force pairwise agreement: flat O(N^2) scan over all item pairs.

    Returns (agreement or None, n_pairs). Mirrors only the published
    scoring rule; shares no code with the curve implementation.
    """
    n = len(items)
    m = int(math.ceil(round(fraction * n, 9)))
    m = min(max(m, 1), n)
    order = sorted(range(n), key=lambda i: (items[i].entropy, i))
    kept = set(order[:m])
    agree = 0.0
    pairs = 0
    for a in range(n):
        for b in range(a + 1, n):
            if a not in kept or b not in kept:
                continue
            ia, ib = items[a], items[b]
            if ia.instance_id != ib.instance_id or ia.question_id != ib.question_id:
                continue
            if abs(ia.readability - ib.readability) < min_gap:
                continue
            pairs += 1
            if ia.true_class_prob == ib.true_class_prob:
                agree += 0.5
            else:
                same = (ia.readability > ib.readability) == (
                    ia.true_class_prob > ib.true_class_prob
                )
                if same and ia.readability != ib.readability:
                    agree += 1.0
    if pairs == 0:
        return None, 0
    return agree / pairs, pairs


_unique = count()


def fresh_id(prefix="x"):
    return f"{prefix}{next(_unique)}"
