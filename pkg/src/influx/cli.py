"""Command-line front end.

One binary, subcommand per operation. Machine output is JSON by default;
curve commands switch to ``fraction,value,n`` CSV with ``--csv``. All
numeric output is printed with 6 significant digits. ``--unit bits``
rescales displayed influence values (storage stays in nats).

Exit codes: 0 success, 1 validation/input error, 2 usage error. Identical
inputs and flags produce byte-identical outputs for any ``--threads``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from pathlib import Path

from influx.analysis import (
    SWEEP_VALUES,
    ConcordanceCurve,
    SweepCurve,
    concordance_curve,
    influence_sweep,
    items_from_dataset,
)
from influx.calibration import (
    CalibrationError,
    accuracy,
    fit_temperature,
    load_logits,
    mean_max_probability,
)
from influx.dataset import Dataset, Task, ValidationError, dataset_to_jsonl, load_dataset
from influx.diversity import linguistic_diversity, load_embeddings, semantic_diversity
from influx.influence import InfluenceReport, influence_report
from influx.questions import is_linguistic_question
from influx.readability import fres_score
from influx.synthetic import SyntheticSpec, exact_influence, generate_synthetic

LN2 = math.log(2.0)

_TASK_ALIASES = {
    "auto": None,
    "rc": Task.MULTI_ELEMENT,
    "multi_element": Task.MULTI_ELEMENT,
    "sc": Task.SINGLE_ELEMENT,
    "single_element": Task.SINGLE_ELEMENT,
}


def _fmt(x: float) -> str:
    return f"{float(x):.6g}"


def _round6(x: float) -> float:
    return float(_fmt(x))


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8", newline="")


def _json_text(payload: dict) -> str:
    return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"


def _default_threads() -> int:
    try:
        return max(1, int(os.environ.get("INFLUX_THREADS", "1")))
    except ValueError:
        return 1


def parse_fractions(text: str) -> list[float]:
    """Parse '0.1:1.0:0.1' range syntax or a comma-separated list."""
    try:
        if ":" in text:
            parts = [float(p) for p in text.split(":")]
            if len(parts) != 3:
                raise ValueError("range syntax is start:stop:step")
            start, stop, step = parts
            if step <= 0 or start > stop:
                raise ValueError("range needs step > 0 and start <= stop")
            count = int(math.floor((stop - start) / step + 1e-9)) + 1
            return [round(start + i * step, 9) for i in range(count)]
        return [float(p) for p in text.split(",") if p.strip()]
    except ValueError as exc:
        raise ValidationError(f"invalid fractions '{text}': {exc}") from exc


def _report_payload(report: InfluenceReport, unit: str) -> dict:
    scale = 1.0 if unit == "nats" else 1.0 / LN2
    return {
        "total": _round6(report.total * scale),
        "question": _round6(report.element_question * scale),
        "context": _round6(report.element_context * scale),
        "semantic": _round6(report.semantic * scale),
        "linguistic": _round6(report.linguistic * scale),
        "relative": {
            "question": _round6(report.relative_question),
            "context": _round6(report.relative_context),
            "semantic": _round6(report.relative_semantic),
            "linguistic": _round6(report.relative_linguistic),
        },
        "unit": unit,
    }


def render_table(report: InfluenceReport, unit: str) -> str:
    """Aligned influence table: values with their shares in parentheses."""
    scale = 1.0 if unit == "nats" else 1.0 / LN2

    def pct(r: float) -> str:
        return f"({100.0 * r:.1f}%)"

    headers = ["total", "question", "context", "semantic", "linguistic"]
    row = [
        _fmt(report.total * scale),
        f"{_fmt(report.element_question * scale)} {pct(report.relative_question)}",
        f"{_fmt(report.element_context * scale)} {pct(report.relative_context)}",
        f"{_fmt(report.semantic * scale)} {pct(report.relative_semantic)}",
        f"{_fmt(report.linguistic * scale)} {pct(report.relative_linguistic)}",
    ]
    widths = [max(len(h), len(c)) for h, c in zip(headers, row)]
    head = "  ".join(h.ljust(w) for h, w in zip(headers, widths))
    body = "  ".join(c.ljust(w) for c, w in zip(row, widths))
    return f"{head.rstrip()}\n{body.rstrip()}\n"


def _curve_csv(points) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["fraction", "value", "n"])
    for p in points:
        writer.writerow([_fmt(p.fraction), "" if p.value is None else _fmt(p.value), p.n])
    return buf.getvalue()


def _concordance_payload(curve: ConcordanceCurve) -> dict:
    return {
        "min_gap": _round6(curve.min_gap),
        "points": [
            {
                "fraction": _round6(p.fraction),
                "agreement": None if p.value is None else _round6(p.value),
                "n_pairs": p.n,
            }
            for p in curve.points
        ],
    }


def _sweep_payload(curve: SweepCurve) -> dict:
    def pts(points):
        return [
            {"fraction": _round6(p.fraction), "value": _round6(p.value), "n_contexts": p.n}
            for p in points
        ]

    payload = {"value": curve.value, "points": pts(curve.points)}
    if curve.baseline is not None:
        payload["baseline"] = pts(curve.baseline)
        payload["baseline_seed"] = curve.baseline_seed
    return payload


def _load_dataset_arg(args) -> Dataset:
    return load_dataset(args.infile, task=_TASK_ALIASES[args.task])


def _dataset_texts(ds: Dataset) -> list[tuple[str, str]]:
    pairs = []
    for inst in ds.instances:
        for r in inst.realizations:
            if r.text is not None:
                pairs.append((f"{inst.instance_id}/{r.realization_id}", r.text))
    return pairs


def _read_text_lines(path: str) -> list[tuple[str, str]]:
    pairs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if line.strip():
                pairs.append((str(lineno), line.strip()))
    return pairs


def _read_scores(path: str) -> dict[str, float]:
    scores: dict[str, float] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        for rowno, row in enumerate(csv.reader(fh), 1):
            if not row or not "".join(row).strip():
                continue
            if len(row) < 2:
                raise ValidationError(f"{path}: row {rowno}: expected instance_id,score")
            iid, raw = row[0].strip(), row[1].strip()
            if rowno == 1 and iid == "instance_id":
                continue
            try:
                value = float(raw)
            except ValueError as exc:
                raise ValidationError(
                    f"{path}: row {rowno}: invalid score '{raw}'"
                ) from exc
            if iid in scores:
                raise ValidationError(f"{path}: duplicate score for instance '{iid}'")
            scores[iid] = value
    if not scores:
        raise ValidationError(f"{path}: no scores found")
    return scores


def cmd_influence(args) -> None:
    report = influence_report(_load_dataset_arg(args), threads=args.threads)
    _write_report(report, args)


def cmd_oracle(args) -> None:
    report = exact_influence(_load_dataset_arg(args))
    _write_report(report, args)


def _write_report(report: InfluenceReport, args) -> None:
    if args.table:
        _emit(render_table(report, args.unit), args.out)
    else:
        _emit(_json_text(_report_payload(report, args.unit)), args.out)
    if args.plot:
        from influx import plots

        plots.save_report_plot(report, args.plot, unit=args.unit)


def cmd_calibrate(args) -> None:
    records = load_logits(args.infile)
    before = mean_max_probability(records, 1.0)
    temperature = fit_temperature(records)
    payload = {
        "temperature": _round6(temperature.t),
        "accuracy": _round6(accuracy(records)),
        "mean_max_prob_before": _round6(before),
        "mean_max_prob_after": _round6(mean_max_probability(records, temperature.t)),
        "n_records": len(records),
    }
    _emit(_json_text(payload), args.out)


def cmd_readability(args) -> None:
    if args.format == "dataset":
        pairs = _dataset_texts(load_dataset(args.infile))
    else:
        pairs = _read_text_lines(args.infile)
    if not pairs:
        raise ValidationError("no texts found")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["id", "score", "n_words", "n_sentences", "n_syllables"])
    for text_id, text in pairs:
        b = fres_score(text)
        writer.writerow([text_id, _fmt(b.score), b.n_words, b.n_sentences, b.n_syllables])
    _emit(buf.getvalue(), args.out)


def cmd_filter_questions(args) -> None:
    if args.format == "dataset":
        ds = load_dataset(args.infile)
        pairs = [
            (f"{inst.instance_id}/{q.question_id}", q.text)
            for inst in ds.instances
            for q in inst.questions
            if q.text is not None
        ]
    else:
        pairs = _read_text_lines(args.infile)
    if not pairs:
        raise ValidationError("no questions found")
    kept = [{"id": i, "text": t} for i, t in pairs if not is_linguistic_question(t)]
    removed = [{"id": i, "text": t} for i, t in pairs if is_linguistic_question(t)]
    payload = {
        "kept": kept,
        "removed": removed,
        "n_total": len(pairs),
        "removed_fraction": _round6(len(removed) / len(pairs)),
    }
    _emit(_json_text(payload), args.out)


def cmd_diversity(args) -> None:
    records = load_embeddings(args.infile)
    rows = []
    if args.metric in ("semantic", "both"):
        rows.append(("semantic", semantic_diversity(records)))
    if args.metric in ("linguistic", "both"):
        rows.append(("linguistic", linguistic_diversity(records)))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["metric", "mean", "std", "n"])
    for name, result in rows:
        writer.writerow([name, _fmt(result.mean), _fmt(result.std), result.n])
    _emit(buf.getvalue(), args.out)


def cmd_agreement(args) -> None:
    ds = load_dataset(args.infile, task=_TASK_ALIASES[args.task])
    curve = concordance_curve(
        items_from_dataset(ds), args.min_gap, parse_fractions(args.fractions)
    )
    if args.csv:
        _emit(_curve_csv(curve.points), args.out)
    else:
        _emit(_json_text(_concordance_payload(curve)), args.out)
    if args.plot:
        from influx import plots

        plots.save_concordance_plot(curve, args.plot)


def cmd_sweep(args) -> None:
    ds = load_dataset(args.infile, task=_TASK_ALIASES[args.task])
    curve = influence_sweep(
        ds,
        _read_scores(args.order_by),
        parse_fractions(args.fractions),
        value=args.value,
        baseline_seed=args.baseline_seed,
        threads=args.threads,
    )
    if args.csv:
        _emit(_curve_csv(curve.points), args.out)
        if curve.baseline is not None and args.out is not None:
            base_path = Path(args.out).with_suffix(".baseline.csv")
            _emit(_curve_csv(curve.baseline), str(base_path))
    else:
        _emit(_json_text(_sweep_payload(curve)), args.out)
    if args.plot:
        from influx import plots

        plots.save_sweep_plot(curve, args.plot)


def cmd_synth(args) -> None:
    try:
        raw = json.loads(args.spec)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"invalid spec JSON: {exc.msg}") from exc
    if not isinstance(raw, dict):
        raise ValidationError("spec must be a JSON object")
    ds = generate_synthetic(SyntheticSpec.from_dict(raw))
    _emit(dataset_to_jsonl(ds), args.out)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="influx",
        description=(
            "Influence decomposition of classifier inputs (total, question, "
            "context, semantic, linguistic) plus calibration, readability, "
            "diversity, and analysis curves."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=None, help="output file (default: stdout)")
    common.add_argument(
        "--threads",
        type=int,
        default=_default_threads(),
        help="worker threads; never changes results (env INFLUX_THREADS)",
    )

    infile = argparse.ArgumentParser(add_help=False)
    infile.add_argument("--in", dest="infile", required=True, help="input file")

    task = argparse.ArgumentParser(add_help=False)
    task.add_argument(
        "--task",
        choices=sorted(_TASK_ALIASES),
        default="auto",
        help="dataset task (rc/multi_element, sc/single_element, or auto-infer)",
    )

    unit = argparse.ArgumentParser(add_help=False)
    unit.add_argument(
        "--unit",
        choices=("nats", "bits"),
        default="nats",
        help="display unit for influence values",
    )
    unit.add_argument("--table", action="store_true", help="aligned text table instead of JSON")
    unit.add_argument("--plot", default=None, help="also render a PNG figure to this path")

    p = sub.add_parser(
        "influence",
        parents=[common, infile, task, unit],
        help="influence decomposition of a dataset",
    )
    p.set_defaults(func=cmd_influence)

    p = sub.add_parser(
        "oracle",
        parents=[common, infile, task, unit],
        help="exact enumeration of the influence decomposition",
    )
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser(
        "calibrate",
        parents=[common, infile],
        help="fit the temperature that matches mean max probability to accuracy",
    )
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser(
        "readability",
        parents=[common, infile],
        help="reading-ease scores as CSV",
    )
    p.add_argument(
        "--format",
        choices=("lines", "dataset"),
        default="lines",
        help="plain text lines, or the 'text' fields of a dataset JSONL",
    )
    p.set_defaults(func=cmd_readability)

    p = sub.add_parser(
        "filter-questions",
        parents=[common, infile],
        help="split questions into kept/removed by the wording-probe filter",
    )
    p.add_argument(
        "--format",
        choices=("lines", "dataset"),
        default="lines",
        help="plain text lines, or question texts of a dataset JSONL",
    )
    p.set_defaults(func=cmd_filter_questions)

    p = sub.add_parser(
        "diversity",
        parents=[common, infile],
        help="semantic/linguistic embedding diversity as CSV",
    )
    p.add_argument("--metric", choices=("semantic", "linguistic", "both"), default="both")
    p.set_defaults(func=cmd_diversity)

    p = sub.add_parser(
        "agreement",
        parents=[common, infile, task],
        help="entropy-filtered readability/true-class-probability concordance curve",
    )
    p.add_argument("--min-gap", type=float, default=0.0, help="minimum readability gap for a pair")
    p.add_argument(
        "--fractions",
        default="0.1:1.0:0.1",
        help="retain fractions: start:stop:step or comma list",
    )
    p.add_argument("--csv", action="store_true", help="emit fraction,value,n CSV")
    p.add_argument("--plot", default=None, help="also render a PNG figure to this path")
    p.set_defaults(func=cmd_agreement)

    p = sub.add_parser(
        "sweep",
        parents=[common, infile, task],
        help="influence values on top-ranked instance subsets",
    )
    p.add_argument(
        "--order-by",
        required=True,
        help="CSV of instance_id,score used to rank instances (descending)",
    )
    p.add_argument("--value", choices=SWEEP_VALUES, default="relative_question")
    p.add_argument(
        "--fractions",
        default="0.1:1.0:0.1",
        help="subset fractions: start:stop:step or comma list",
    )
    p.add_argument("--baseline-seed", type=int, default=None, help="seeded random-order baseline")
    p.add_argument("--csv", action="store_true", help="emit fraction,value,n CSV")
    p.add_argument("--plot", default=None, help="also render a PNG figure to this path")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser(
        "synth",
        parents=[common],
        help="generate a synthetic dataset from a JSON spec",
    )
    p.add_argument(
        "--spec",
        required=True,
        help=(
            'JSON spec, e.g. \'{"n_semantic": 4, "n_realizations_per": 3, '
            '"n_questions_per": 3, "n_classes": 4, "seed": 7, "sharpness": 1.0}\''
        ),
    )
    p.set_defaults(func=cmd_synth)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (ValidationError, CalibrationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
