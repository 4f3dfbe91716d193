"""Embedding-space diversity of a corpus.

Semantic diversity: mean cosine distance from each embedding to the
centroid of all embeddings, a proxy for how spread out the corpus is in
meaning. Linguistic diversity: the same statistic computed per instance
over that instance's realization embeddings, then averaged across
instances, a proxy for how much rewordings move a text around its own
center. Spreads are population standard deviations.

Vectors are taken as-is; cosine is scale-free per pair, but centroids
are not, so only a uniform rescaling of all vectors leaves the results
unchanged.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from influx.dataset import ValidationError


@dataclass(frozen=True, eq=False)
class EmbeddingRecord:
    id: str
    instance_id: str
    vector: np.ndarray

    def __post_init__(self) -> None:
        try:
            arr = np.array(self.vector, dtype=np.float64)
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"record '{self.id}': non-numeric entry: {exc}") from exc
        arr.setflags(write=False)
        object.__setattr__(self, "vector", arr)
        if arr.ndim != 1 or arr.size == 0:
            raise ValidationError(f"record '{self.id}': vector must be a non-empty 1-d array")
        if not np.all(np.isfinite(arr)):
            raise ValidationError(f"record '{self.id}': non-finite embedding entry")
        if not np.any(arr):
            raise ValidationError(f"record '{self.id}': zero-norm vector")


@dataclass(frozen=True)
class DiversityResult:
    mean: float
    std: float
    n: int


def load_embeddings(path: str | Path) -> list[EmbeddingRecord]:
    """Read embeddings from JSONL: {"id", "instance_id", "vector"} per line."""
    records: list[EmbeddingRecord] = []
    with Path(path).open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValidationError(f"line {lineno}: malformed JSON: {exc.msg}") from exc
            if (
                not isinstance(obj, dict)
                or not isinstance(obj.get("id"), str)
                or not isinstance(obj.get("instance_id"), str)
                or not isinstance(obj.get("vector"), list)
            ):
                raise ValidationError(
                    f"line {lineno}: embedding records need 'id', 'instance_id' and a 'vector' list"
                )
            try:
                records.append(EmbeddingRecord(obj["id"], obj["instance_id"], obj["vector"]))
            except ValidationError as exc:
                raise ValidationError(f"line {lineno}: {exc}") from exc
    if not records:
        raise ValidationError(f"{path}: no embedding records")
    dim = records[0].vector.size
    for r in records:
        if r.vector.size != dim:
            raise ValidationError(
                f"record '{r.id}': dimension mismatch ({r.vector.size} vs {dim})"
            )
    return records


def cosine_distance(a: np.ndarray | Sequence[float], b: np.ndarray | Sequence[float]) -> float:
    """1 - cos(a, b), clipped into [0, 2]."""
    va = np.asarray(a, dtype=np.float64)
    vb = np.asarray(b, dtype=np.float64)
    if va.shape != vb.shape:
        raise ValidationError(f"dimension mismatch ({va.size} vs {vb.size})")
    na = float(np.linalg.norm(va))
    nb = float(np.linalg.norm(vb))
    if na == 0.0 or nb == 0.0:
        raise ValidationError("zero-norm vector")
    d = 1.0 - float(va @ vb) / (na * nb)
    return min(max(d, 0.0), 2.0)


def _centroid_distance_stats(vectors: Sequence[np.ndarray]) -> tuple[float, float, int]:
    centroid = np.mean(np.stack(vectors), axis=0)
    if float(np.linalg.norm(centroid)) == 0.0:
        raise ValidationError("zero-norm centroid")
    distances = [cosine_distance(v, centroid) for v in vectors]
    return _mean_std(distances)


def _mean_std(values: Sequence[float]) -> tuple[float, float, int]:
    n = len(values)
    mean = math.fsum(values) / n
    variance = max(math.fsum(v * v for v in values) / n - mean * mean, 0.0)
    return mean, math.sqrt(variance), n


def semantic_diversity(records: Sequence[EmbeddingRecord]) -> DiversityResult:
    """Spread of all embeddings around the corpus centroid."""
    if not records:
        raise ValidationError("no embedding records")
    mean, std, n = _centroid_distance_stats([r.vector for r in records])
    return DiversityResult(mean, std, n)


def linguistic_diversity(records: Sequence[EmbeddingRecord]) -> DiversityResult:
    """Per-instance spread of realization embeddings, averaged over instances."""
    if not records:
        raise ValidationError("no embedding records")
    groups: dict[str, list[np.ndarray]] = {}
    for r in records:
        groups.setdefault(r.instance_id, []).append(r.vector)
    per_instance = [_centroid_distance_stats(vecs)[0] for vecs in groups.values()]
    mean, std, n = _mean_std(per_instance)
    return DiversityResult(mean, std, n)
