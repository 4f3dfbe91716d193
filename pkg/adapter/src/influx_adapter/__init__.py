"""Adapters that produce the influx wire formats from live systems.

Three producers, all writing files that the `influx` CLI accepts
unchanged: classifier output distributions and logits, readability-
targeted paraphrase realizations from a chat-completions endpoint, and
sentence embeddings. The analysis package is consumed strictly through
its command line and file formats, never imported.
"""


class AdapterError(RuntimeError):
    """A producer could not build a valid wire file."""


from influx_adapter.classify import (  # noqa: E402
    CellQuery,
    load_corpus,
    produce_distributions,
    stub_fixed_logits,
    stub_probability_table,
    stub_uniform,
)
from influx_adapter.embed import (  # noqa: E402
    EmbedItem,
    embed_texts,
    stub_hash_embedder,
    stub_onehot_embedder,
)
from influx_adapter.paraphrase import (  # noqa: E402
    ChatCompletionsClient,
    EndpointConfig,
    EndpointError,
    ParaphraseJob,
    echo_transport,
    generate_paraphrases,
)
from influx_adapter.prompts import PARAPHRASE_PROMPTS, TARGET_LEVELS  # noqa: E402

__version__ = "0.1.0"

__all__ = [
    "AdapterError",
    "CellQuery",
    "ChatCompletionsClient",
    "EmbedItem",
    "EndpointConfig",
    "EndpointError",
    "PARAPHRASE_PROMPTS",
    "ParaphraseJob",
    "TARGET_LEVELS",
    "echo_transport",
    "embed_texts",
    "generate_paraphrases",
    "load_corpus",
    "produce_distributions",
    "stub_fixed_logits",
    "stub_hash_embedder",
    "stub_onehot_embedder",
    "stub_probability_table",
    "stub_uniform",
]
