"""Paraphrase generation tests against stub transports (offline)."""

from __future__ import annotations

import pytest

from influx_adapter import AdapterError
from influx_adapter.paraphrase import (
    ChatCompletionsClient,
    EndpointConfig,
    EndpointError,
    ParaphraseJob,
    echo_transport,
    generate_paraphrases,
)
from influx_adapter.primary import measure_readability
from influx_adapter.prompts import PARAPHRASE_PROMPTS, TARGET_LEVELS

ENDPOINT = EndpointConfig(url="https://example.invalid/v1/chat/completions", model="stub")


def echo_client(**kwargs):
    return ChatCompletionsClient(ENDPOINT, transport=echo_transport, backoff_s=0.0, **kwargs)


class TestJob:
    def test_levels_must_be_known(self):
        with pytest.raises(AdapterError, match="unknown readability levels"):
            ParaphraseJob("Some text.", (42,))

    def test_empty_source_rejected(self):
        with pytest.raises(AdapterError, match="empty source"):
            ParaphraseJob("   ", (95,))

    def test_level_table_is_complete(self):
        assert TARGET_LEVELS == (5, 20, 40, 55, 65, 75, 85, 95)
        assert PARAPHRASE_PROMPTS[95].endswith("average 11-year old student.")


class TestGenerate:
    def test_empty_levels_empty_result(self):
        job = ParaphraseJob("The cat sat.", ())
        assert generate_paraphrases(job, echo_client()) == []

    def test_echo_returns_source_with_measured_score(self):
        job = ParaphraseJob("The cat sat.", (95,))
        (realization,) = generate_paraphrases(job, echo_client())
        assert realization["id"] == "level95"
        assert realization["text"] == "The cat sat."
        assert realization["readability"] == pytest.approx(119.19, abs=1e-3)
        (source_score,) = measure_readability(["The cat sat."])
        assert realization["readability"] == source_score

    def test_one_realization_per_level_in_order(self):
        job = ParaphraseJob("The happy dog runs quickly.", (95, 5, 65))
        realizations = generate_paraphrases(job, echo_client(), concurrency=3)
        assert [r["id"] for r in realizations] == ["level95", "level05", "level65"]
        assert all(r["text"] == "The happy dog runs quickly." for r in realizations)


class TestRetry:
    def test_transient_failures_are_retried(self):
        calls = []

        def flaky(payload, config):
            calls.append(payload["messages"][0]["content"])
            if len(calls) < 3:
                raise ConnectionError("boom")
            return payload["messages"][-1]["content"]

        client = ChatCompletionsClient(ENDPOINT, transport=flaky, backoff_s=0.0)
        assert client.complete("instruction", "content") == "content"
        assert len(calls) == 3

    def test_persistent_failure_is_surfaced(self):
        attempts = []

        def broken(payload, config):
            attempts.append(1)
            raise ConnectionError("endpoint down")

        client = ChatCompletionsClient(ENDPOINT, transport=broken, backoff_s=0.0, max_retries=2)
        with pytest.raises(EndpointError, match="after 3 attempts.*endpoint down"):
            client.complete("instruction", "content")
        assert len(attempts) == 3

    def test_empty_completion_is_an_error(self):
        client = ChatCompletionsClient(
            ENDPOINT, transport=lambda p, c: "  ", backoff_s=0.0, max_retries=1
        )
        with pytest.raises(EndpointError, match="empty completion"):
            client.complete("instruction", "content")
