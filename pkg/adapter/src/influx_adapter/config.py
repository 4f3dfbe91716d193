"""JSON run configuration for the adapter CLI."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from influx_adapter import AdapterError
from influx_adapter.paraphrase import EndpointConfig
from influx_adapter.prompts import TARGET_LEVELS


@dataclass(frozen=True)
class AdapterConfig:
    corpus: str
    n_classes: int | None = None
    levels: tuple[int, ...] = TARGET_LEVELS
    endpoint: EndpointConfig | None = None
    outputs: dict = field(default_factory=dict)

    def output(self, key: str) -> str:
        try:
            return self.outputs[key]
        except KeyError:
            raise AdapterError(f"config is missing outputs.{key}") from None


def load_config(path: str | Path) -> AdapterConfig:
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise AdapterError(f"{path}: malformed JSON: {exc.msg}") from exc
    if not isinstance(raw, dict) or not isinstance(raw.get("corpus"), str):
        raise AdapterError(f"{path}: config needs a 'corpus' path")

    endpoint = None
    if isinstance(raw.get("endpoint"), dict):
        ep = raw["endpoint"]
        if not isinstance(ep.get("url"), str) or not isinstance(ep.get("model"), str):
            raise AdapterError(f"{path}: endpoint needs 'url' and 'model'")
        endpoint = EndpointConfig(
            url=ep["url"],
            model=ep["model"],
            api_key_env=ep.get("api_key_env", "OPENAI_API_KEY"),
            timeout_s=float(ep.get("timeout_s", 60.0)),
        )

    levels = raw.get("levels")
    if levels is not None:
        if not isinstance(levels, list) or not all(isinstance(l, int) for l in levels):
            raise AdapterError(f"{path}: 'levels' must be a list of integers")
        levels = tuple(levels)
    else:
        levels = TARGET_LEVELS

    n_classes = raw.get("n_classes")
    if n_classes is not None and not isinstance(n_classes, int):
        raise AdapterError(f"{path}: 'n_classes' must be an integer")

    outputs = raw.get("outputs") or {}
    if not isinstance(outputs, dict):
        raise AdapterError(f"{path}: 'outputs' must be an object")

    base = path.parent

    def resolve(p: str) -> str:
        candidate = Path(p)
        return str(candidate if candidate.is_absolute() else base / candidate)

    return AdapterConfig(
        corpus=resolve(raw["corpus"]),
        n_classes=n_classes,
        levels=levels,
        endpoint=endpoint,
        outputs={k: resolve(v) for k, v in outputs.items()},
    )
