"""Paraphrase generation through a chat-completions style endpoint.

One request per target readability level, sent through a bounded thread
pool with per-request retry and exponential backoff. Results keep the
input level order. Every realization is tagged with its *measured*
reading-ease score (scored by the analysis CLI), not the target.

Transports are injectable: the default posts JSON over HTTP with a
bearer token from the environment; tests use :func:`echo_transport`,
which returns the source text unchanged.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

from influx_adapter import AdapterError
from influx_adapter.primary import measure_readability
from influx_adapter.prompts import PARAPHRASE_PROMPTS, TARGET_LEVELS


class EndpointError(AdapterError):
    """The endpoint kept failing or returned an unusable completion."""


@dataclass(frozen=True)
class EndpointConfig:
    url: str
    model: str
    api_key_env: str = "OPENAI_API_KEY"
    timeout_s: float = 60.0


@dataclass(frozen=True)
class ParaphraseJob:
    source_text: str
    levels: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.source_text.strip():
            raise AdapterError("empty source text")
        bad = [l for l in self.levels if l not in PARAPHRASE_PROMPTS]
        if bad:
            raise AdapterError(
                f"unknown readability levels {bad}; valid levels are {list(TARGET_LEVELS)}"
            )
        if len(set(self.levels)) != len(self.levels):
            raise AdapterError("duplicate readability level requested")


Transport = Callable[[dict, EndpointConfig], str]


def echo_transport(payload: dict, config: EndpointConfig) -> str:
    """Offline stub: completion equals the user message (the source text)."""
    return payload["messages"][-1]["content"]


def http_transport(payload: dict, config: EndpointConfig) -> str:
    import requests

    headers = {"Content-Type": "application/json"}
    key = os.environ.get(config.api_key_env)
    if key:
        headers["Authorization"] = f"Bearer {key}"
    response = requests.post(
        config.url, json=payload, headers=headers, timeout=config.timeout_s
    )
    response.raise_for_status()
    body = response.json()
    try:
        return body["choices"][0]["message"]["content"]
    except (KeyError, IndexError, TypeError) as exc:
        raise EndpointError(f"unexpected endpoint response shape: {body!r}") from exc


@dataclass
class ChatCompletionsClient:
    config: EndpointConfig
    transport: Transport = field(default=http_transport)
    max_retries: int = 3
    backoff_s: float = 0.5

    def complete(self, instruction: str, content: str) -> str:
        payload = {
            "model": self.config.model,
            "messages": [
                {"role": "system", "content": instruction},
                {"role": "user", "content": content},
            ],
        }
        last_error: Exception | None = None
        for attempt in range(self.max_retries + 1):
            if attempt:
                time.sleep(self.backoff_s * 2 ** (attempt - 1))
            try:
                text = self.transport(payload, self.config)
            except Exception as exc:  # transport failures are retried
                last_error = exc
                continue
            if text and text.strip():
                return text
            last_error = EndpointError("empty completion")
        raise EndpointError(
            f"endpoint failed after {self.max_retries + 1} attempts: {last_error}"
        )


def generate_paraphrases(
    job: ParaphraseJob,
    client: ChatCompletionsClient,
    concurrency: int = 4,
) -> list[dict]:
    """One realization record per requested level, in input order.

    Records follow the dataset wire shape:
    ``{"id": "level55", "text": ..., "readability": <measured score>}``.
    """
    if not job.levels:
        return []

    def one(level: int) -> str:
        return client.complete(PARAPHRASE_PROMPTS[level], job.source_text)

    workers = max(1, min(concurrency, len(job.levels)))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        texts = list(pool.map(one, job.levels))
    scores = measure_readability(texts)
    return [
        {"id": f"level{level:02d}", "text": text, "readability": score}
        for level, text, score in zip(job.levels, texts, scores)
    ]
