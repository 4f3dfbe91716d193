"""Sentence-embedding emission in the analysis package's wire format.

An embedder is any callable from (index, text) to a fixed-dimension
vector; stubs below cover offline use. Dimension drift across texts is
an error. Output is written once, in input order.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

from influx_adapter import AdapterError


@dataclass(frozen=True)
class EmbedItem:
    id: str
    instance_id: str
    text: str


Embedder = Callable[[int, str], Sequence[float]]


def stub_onehot_embedder(dim: int) -> Embedder:
    """One-hot by input index (modulo the dimension)."""

    def embed(index: int, text: str) -> list[float]:
        vector = [0.0] * dim
        vector[index % dim] = 1.0
        return vector

    return embed


def stub_hash_embedder(dim: int) -> Embedder:
    """Deterministic text-keyed vector: identical texts embed identically."""

    def embed(index: int, text: str) -> list[float]:
        digest = hashlib.sha256(text.encode("utf-8")).digest()
        return [1.0 + digest[i % len(digest)] / 255.0 for i in range(dim)]

    return embed


def embed_texts(
    items: Sequence[EmbedItem],
    embedder: Embedder,
    out_path: str | Path,
) -> int:
    """Embed every item and write embeddings JSONL; returns the record count."""
    lines = []
    dim: int | None = None
    for index, item in enumerate(items):
        vector = [float(x) for x in embedder(index, item.text)]
        if not vector or not all(math.isfinite(x) for x in vector):
            raise AdapterError(f"embedder returned an invalid vector for '{item.id}'")
        if dim is None:
            dim = len(vector)
        elif len(vector) != dim:
            raise AdapterError(
                f"embedding dimension drift at '{item.id}': {len(vector)} vs {dim}"
            )
        lines.append(
            json.dumps(
                {"id": item.id, "instance_id": item.instance_id, "vector": vector}
            )
        )
    Path(out_path).write_text(
        "\n".join(lines) + ("\n" if lines else ""), encoding="utf-8"
    )
    return len(lines)
