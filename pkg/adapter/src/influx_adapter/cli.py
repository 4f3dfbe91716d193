"""Adapter command line: config-driven producers of the influx wire files.

Exit codes: 0 success, 1 producer/validation error, 2 usage error. Stub
classifiers, embedders, and the echo endpoint make every command
runnable offline and deterministically.
"""

from __future__ import annotations

import argparse
import json
import sys

from influx_adapter import AdapterError
from influx_adapter.classify import load_corpus, produce_distributions, stub_fixed_logits, stub_uniform
from influx_adapter.config import load_config
from influx_adapter.embed import EmbedItem, embed_texts, stub_hash_embedder, stub_onehot_embedder
from influx_adapter.paraphrase import (
    ChatCompletionsClient,
    EndpointConfig,
    ParaphraseJob,
    echo_transport,
    generate_paraphrases,
)


def cmd_paraphrase(args) -> None:
    config = load_config(args.config)
    corpus = load_corpus(config.corpus)
    if args.stub_echo:
        endpoint = config.endpoint or EndpointConfig(url="stub", model="echo")
        client = ChatCompletionsClient(endpoint, transport=echo_transport)
    else:
        if config.endpoint is None:
            raise AdapterError("config has no endpoint; use --stub-echo for offline runs")
        client = ChatCompletionsClient(config.endpoint)

    lines = []
    generated = 0
    for record in corpus:
        source = record["realizations"][0].get("text")
        if not source:
            raise AdapterError(
                f"instance '{record['instance_id']}': first realization has no text"
            )
        job = ParaphraseJob(source_text=source, levels=config.levels)
        realizations = generate_paraphrases(job, client, concurrency=args.concurrency)
        generated += len(realizations)
        out_record = {"instance_id": record["instance_id"], "realizations": realizations}
        for key in ("questions", "true_class"):
            if key in record:
                out_record[key] = record[key]
        lines.append(json.dumps(out_record, ensure_ascii=False))
    out_path = config.output("paraphrases")
    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    print(f"wrote {generated} paraphrase realizations for {len(corpus)} instances to {out_path}")


def cmd_distributions(args) -> None:
    config = load_config(args.config)
    corpus = load_corpus(config.corpus)
    if config.n_classes is None:
        raise AdapterError("config needs 'n_classes' for the distributions command")
    if args.stub == "uniform":
        classifier = stub_uniform(config.n_classes)
    else:
        logits = [float(x) for x in args.stub_logits.split(",")]
        classifier = stub_fixed_logits(logits)
    summary = produce_distributions(
        corpus,
        classifier,
        config.n_classes,
        dataset_path=config.output("dataset"),
        logits_path=config.outputs.get("logits"),
        drop_linguistic_questions=not args.no_filter,
    )
    print(json.dumps(summary))


def cmd_embeddings(args) -> None:
    config = load_config(args.config)
    corpus = load_corpus(config.corpus)
    items = []
    for record in corpus:
        for realization in record["realizations"]:
            text = realization.get("text")
            if text:
                items.append(
                    EmbedItem(
                        id=f"{record['instance_id']}/{realization['id']}",
                        instance_id=record["instance_id"],
                        text=text,
                    )
                )
    embedder = (
        stub_onehot_embedder(args.dim)
        if args.stub == "onehot"
        else stub_hash_embedder(args.dim)
    )
    out_path = config.output("embeddings")
    count = embed_texts(items, embedder, out_path)
    print(f"wrote {count} embeddings to {out_path}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="influx-adapter",
        description="Produce influx wire files from classifiers, paraphrasers, and embedders.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("paraphrase", help="generate readability-targeted paraphrases")
    p.add_argument("--config", required=True, help="JSON run configuration")
    p.add_argument("--stub-echo", action="store_true", help="offline echo endpoint")
    p.add_argument("--concurrency", type=int, default=4)
    p.set_defaults(func=cmd_paraphrase)

    p = sub.add_parser("distributions", help="classify a corpus into dataset + logits files")
    p.add_argument("--config", required=True)
    p.add_argument("--stub", choices=("uniform", "fixed"), default="uniform")
    p.add_argument("--stub-logits", default="2,0", help="comma logits for --stub fixed")
    p.add_argument("--no-filter", action="store_true", help="keep wording-probe questions")
    p.set_defaults(func=cmd_distributions)

    p = sub.add_parser("embeddings", help="embed corpus realization texts")
    p.add_argument("--config", required=True)
    p.add_argument("--stub", choices=("onehot", "hash"), default="hash")
    p.add_argument("--dim", type=int, default=16)
    p.set_defaults(func=cmd_embeddings)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except AdapterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
