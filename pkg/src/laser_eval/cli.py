"""Command-line surface: score, align, correlate, report, export-pairs,
eval-classifier, annotate.

Exit codes: 0 success, 1 usage/config error, 2 data error, 3 backend error.
Every output file starts with a metadata header (config hash, pack version,
weights) so runs are auditable; nothing in an output depends on wall time,
which keeps reruns byte-identical.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

import yaml

from . import __version__
from .align import alignment_record, levenshtein_align, merge_pass, wer
from .annotate import AnnotationStore, create_app
from .ingest import (
    CorpusError,
    filter_zero_wer,
    import_human_annotations,
    load_corpus,
    merge_score_columns,
    export_training_pairs,
    training_pairs_to_jsonl,
)
from .llm_judge import JudgeConfig, TransportError, judge_corpus, load_template
from .rubric import (
    DegenerateReferenceError,
    PenaltyLevel,
    PenaltyWeights,
    SentenceEvaluation,
    aggregate_corpus,
    evaluate_sentence,
    evaluation_from_record,
    evaluation_record,
    score_sentence,
)
from .rules import RulesClassifier
from .stats import (
    ScoreTable,
    accuracy_to_csv,
    accuracy_to_text,
    classifier_accuracy,
    correlation_matrix,
    matrix_to_csv,
    matrix_to_json,
    qualitative_report,
    report_to_jsonl,
    report_to_markdown,
)
from .textnorm import PackError, fold, load_pack, tokenize

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_BACKEND = 3


class UsageError(ValueError):
    pass


class BackendError(RuntimeError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage problems exit 1, not argparse's 2
        raise UsageError(message)


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"config file not found: {p}")
    with open(p, encoding="utf-8") as fh:
        doc = yaml.safe_load(fh) or {}
    if not isinstance(doc, dict):
        raise UsageError(f"config file {p} must hold a mapping")
    return doc


def _effective(args, config: dict) -> dict:
    """Flags win over config file values."""
    eff = {
        "lang": args.lang or config.get("lang"),
        "pack_dir": getattr(args, "pack_dir", None) or config.get("pack_dir"),
        "backend": getattr(args, "backend", None) or config.get("backend", "rules"),
        "weights": {
            "minor": args.weights_minor
            if args.weights_minor is not None
            else config.get("weights", {}).get("minor", 0.5),
            "major": args.weights_major
            if args.weights_major is not None
            else config.get("weights", {}).get("major", 1.0),
        },
        "seed": args.seed if args.seed is not None else config.get("seed", 0),
        "judge": config.get("judge", {}),
        "names": config.get("names", []),
    }
    if getattr(args, "judge_endpoint", None):
        eff["judge"]["endpoint"] = args.judge_endpoint
    if getattr(args, "judge_model", None):
        eff["judge"]["model"] = args.judge_model
    return eff


def _config_hash(eff: dict) -> str:
    return hashlib.sha256(
        json.dumps(eff, sort_keys=True, ensure_ascii=False).encode()
    ).hexdigest()[:16]


def _meta(eff: dict, pack=None, command: str = "") -> dict:
    meta = {
        "tool": f"laser-eval {__version__}",
        "command": command,
        "config_hash": _config_hash(eff),
        "weights": eff["weights"],
        "punctuation": "stripped before all metrics",
    }
    if pack is not None:
        meta["pack"] = {"lang": pack.lang, "version": pack.version}
    return meta


def _write_jsonl(path: Path, meta: dict, records: list[dict]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps({"_meta": meta}, ensure_ascii=False, sort_keys=True) + "\n")
        for rec in records:
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")


def _read_evaluations(path: str | Path) -> list[SentenceEvaluation]:
    evals = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            doc = json.loads(line)
            if "_meta" in doc:
                continue
            evals.append(evaluation_from_record(doc))
    return evals


def _weights(eff: dict) -> PenaltyWeights:
    try:
        return PenaltyWeights(**eff["weights"])
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


# -- subcommands ------------------------------------------------------------


def cmd_score(args) -> int:
    eff = _effective(args, _load_config(args.config))
    if not eff["lang"]:
        raise UsageError("--lang (or config lang) is required")
    weights = _weights(eff)
    pack = load_pack(eff["lang"], eff["pack_dir"])
    records = load_corpus(args.corpus)
    kept, removed = filter_zero_wer(records, pack)

    report: dict = {"removed_zero_wer": removed, "kept": len(kept)}
    evals: list[SentenceEvaluation] = []
    backend = eff["backend"]
    if backend == "rules":
        classifier = RulesClassifier(pack, names=set(eff.get("names", [])))
        for rec in kept:
            evals.append(
                evaluate_sentence(
                    rec.ref_text, rec.hyp_text, classifier, pack, weights, rec.id
                )
            )
    elif backend == "llm":
        judge = eff["judge"]
        if not judge.get("endpoint") or not judge.get("model"):
            raise UsageError("llm backend needs judge.endpoint and judge.model")
        config = JudgeConfig(
            endpoint=judge["endpoint"],
            model=judge["model"],
            batch_size=int(judge.get("batch_size", 10)),
            max_retries=int(judge.get("max_retries", 3)),
            timeout=float(judge.get("timeout", 60.0)),
            temperature=float(judge.get("temperature", 0.0)),
            cache_dir=judge.get("cache_dir"),
            api_key_env=judge.get("api_key_env", "LASER_EVAL_API_KEY"),
        )
        template = load_template(judge.get("example_language", "hi"))
        evals, run_report = judge_corpus(kept, template, config, pack, weights)
        report["judge"] = run_report
        if kept and not evals:
            raise BackendError(
                f"judge produced no evaluations: {run_report.get('failed')}"
            )
    elif backend == "human-import":
        if not args.annotations:
            raise UsageError("human-import backend needs --annotations")
        n_by_id = {r.id: tokenize(r.ref_text, pack, r.id).n for r in kept}
        by_id = {r.id: r for r in kept}
        annotations, warnings = import_human_annotations(
            args.annotations, n_by_id, weights
        )
        report["annotation_warnings"] = warnings
        for ann in annotations:
            rec = by_id[ann.id]
            w = wer(tokenize(rec.ref_text, pack), tokenize(rec.hyp_text, pack))
            levels = (
                [PenaltyLevel.MAJOR] * ann.major_count
                + [PenaltyLevel.MINOR] * ann.minor_count
            )
            breakdown = score_sentence(ann.n_ref, levels, weights)
            evals.append(
                SentenceEvaluation(
                    id=ann.id,
                    lang=pack.lang,
                    ref_text=rec.ref_text,
                    hyp_text=rec.hyp_text,
                    n_ref=ann.n_ref,
                    classified_pairs=[],
                    total_penalty=breakdown.total_penalty,
                    laser_raw=breakdown.laser_raw,
                    laser=breakdown.laser,
                    wer=w.rate,
                    wer_counts={
                        "S": w.substitutions,
                        "I": w.insertions,
                        "D": w.deletions,
                        "N": w.n,
                    },
                    classifier_id="human",
                    weights=weights,
                    flags={"count_mismatch": ann.count_mismatch},
                )
            )
    else:
        raise UsageError(f"unknown backend {backend!r}")

    evals.sort(key=lambda e: e.id)
    out = Path(args.out or "out")
    meta = _meta(eff, pack, "score")
    _write_jsonl(out / "evaluations.jsonl", meta, [evaluation_record(e) for e in evals])
    summary = {"_meta": meta, **report}
    if evals:
        summary["corpus"] = aggregate_corpus(evals)
    with open(out / "summary.json", "w", encoding="utf-8") as fh:
        json.dump(summary, fh, ensure_ascii=False, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"wrote {out / 'evaluations.jsonl'} ({len(evals)} sentences, {len(removed)} removed at zero WER)")
    return EXIT_OK


def cmd_align(args) -> int:
    eff = _effective(args, _load_config(args.config))
    if not eff["lang"]:
        raise UsageError("--lang is required")
    pack = load_pack(eff["lang"], eff["pack_dir"])
    ref = tokenize(args.ref, pack, "ref")
    hyp = tokenize(args.hyp, pack, "hyp")
    raw = levenshtein_align(ref, hyp)
    merged = merge_pass(raw, pack)
    w = wer(ref, hyp)
    print(f"distance={raw.distance} S={raw.substitutions} D={raw.deletions} "
          f"I={raw.insertions} N={ref.n} WER={w.rate:.4f}")
    print(f"{'op':12s} {'reference':24s} {'hypothesis':24s} {'fold(ref)':20s} fold(hyp)")
    for p in merged.pairs:
        rf = " ".join(fold(t, pack) for t in p.ref)
        hf = " ".join(fold(t, pack) for t in p.hyp)
        print(
            f"{p.op.value:12s} {' '.join(p.ref_words) or '-':24s} "
            f"{' '.join(p.hyp_words) or '-':24s} {rf or '-':20s} {hf or '-'}"
        )
    if args.out:
        out = Path(args.out)
        meta = _meta(eff, pack, "align")
        _write_jsonl(out / "alignment.jsonl", meta, [alignment_record(merged, "cli", ref.n)])
    return EXIT_OK


def cmd_correlate(args) -> int:
    eff = _effective(args, _load_config(args.config))
    table: ScoreTable | None = None
    for idx, spec in enumerate(args.evals):
        name, _, path = spec.rpartition("=")
        if not name:
            name, path = f"laser_{Path(path).stem}", path
        evals = _read_evaluations(path)
        if not evals:
            raise CorpusError(f"{path}: no evaluations")
        evals.sort(key=lambda e: e.id)
        if table is None:
            table = ScoreTable(ids=[e.id for e in evals])
            table.columns["wer"] = [e.wer for e in evals]
            table.columns["one_minus_wer"] = [1.0 - e.wer for e in evals]
        score_attr = "laser_raw" if args.use_raw else "laser"
        table.add_column(name, {e.id: getattr(e, score_attr) for e in evals})
    assert table is not None
    warnings: list[str] = []
    if args.external:
        table, warnings = merge_score_columns(table, args.external)
        for w in warnings:
            print(f"warning: {w}", file=sys.stderr)
    columns = args.columns.split(",") if args.columns else None
    try:
        names, matrix = correlation_matrix(table, columns)
    except KeyError as exc:
        raise UsageError(str(exc)) from exc
    for i, row in enumerate(matrix):
        for j, cell in enumerate(row):
            if cell is None:
                print(
                    f"warning: correlation undefined for ({names[i]}, {names[j]})",
                    file=sys.stderr,
                )
    out = Path(args.out or "out")
    out.mkdir(parents=True, exist_ok=True)
    meta = _meta(eff, None, "correlate")
    header = f"# meta: {json.dumps(meta, sort_keys=True)}\n"
    (out / "correlations.csv").write_text(header + matrix_to_csv(names, matrix), "utf-8")
    doc = {"_meta": meta, **json.loads(matrix_to_json(names, matrix))}
    (out / "correlations.json").write_text(
        json.dumps(doc, ensure_ascii=False, indent=2) + "\n", "utf-8"
    )
    print(matrix_to_csv(names, matrix), end="")
    return EXIT_OK


def cmd_report(args) -> int:
    eff = _effective(args, _load_config(args.config))
    evals = _read_evaluations(args.evals)
    rep = qualitative_report(
        evals, wer_threshold=args.wer_threshold, laser_split=args.laser_split
    )
    out = Path(args.out or "out")
    out.mkdir(parents=True, exist_ok=True)
    meta = _meta(eff, None, "report")
    md = f"<!-- meta: {json.dumps(meta, sort_keys=True)} -->\n" + report_to_markdown(rep)
    (out / "report.md").write_text(md, "utf-8")
    (out / "report.jsonl").write_text(
        json.dumps({"_meta": meta}, ensure_ascii=False, sort_keys=True)
        + "\n"
        + report_to_jsonl(rep),
        "utf-8",
    )
    print(
        f"high-WER samples: {len(rep.high)} high-score, {len(rep.low)} low-score "
        f"(threshold {rep.wer_threshold}, split {rep.laser_split:.4f})"
    )
    return EXIT_OK


def cmd_export_pairs(args) -> int:
    eff = _effective(args, _load_config(args.config))
    evals = _read_evaluations(args.evals)
    heldout: set[str] = set()
    if args.heldout:
        heldout = {
            line.strip()
            for line in Path(args.heldout).read_text("utf-8").splitlines()
            if line.strip()
        }
    pairs, summary = export_training_pairs(
        evals, identical_sample_rate=args.rate, seed=eff["seed"], heldout_ids=heldout
    )
    out = Path(args.out or "out")
    out.mkdir(parents=True, exist_ok=True)
    meta = {**_meta(eff, None, "export-pairs"), "export": summary}
    path = out / "training_pairs.jsonl"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps({"_meta": meta}, ensure_ascii=False, sort_keys=True) + "\n")
        fh.write(training_pairs_to_jsonl(pairs))
    print(f"wrote {path}: {summary['class_counts']}")
    return EXIT_OK


def _read_labels(path: str) -> list[int]:
    labels = []
    for lineno, line in enumerate(Path(path).read_text("utf-8").splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            labels.append(int(line))
        except ValueError as exc:
            raise CorpusError(f"{path}:{lineno}: labels must be integers") from exc
    return labels


def cmd_eval_classifier(args) -> int:
    pred = _read_labels(args.pred)
    gold = _read_labels(args.gold)
    train_val = {}
    if args.train_val:
        for part in args.train_val.split(","):
            label, _, count = part.partition("=")
            train_val[int(label)] = int(count)
    try:
        table = classifier_accuracy(pred, gold, train_val)
    except ValueError as exc:
        raise CorpusError(str(exc)) from exc
    print(accuracy_to_text(table), end="")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        meta = _meta(_effective(args, _load_config(args.config)), None, "eval-classifier")
        header = f"# meta: {json.dumps(meta, sort_keys=True)}\n"
        (out / "accuracy.csv").write_text(header + accuracy_to_csv(table), "utf-8")
    return EXIT_OK


def cmd_annotate(args) -> int:
    eff = _effective(args, _load_config(args.config))
    if not eff["lang"]:
        raise UsageError("--lang is required")
    weights = _weights(eff)
    pack = load_pack(eff["lang"], eff["pack_dir"])
    store = AnnotationStore(args.store, weights)
    if args.corpus:
        records = load_corpus(args.corpus)
        kept, removed = filter_zero_wer(records, pack)
        added = store.build_tasks(kept, pack)
        print(f"queued {added} new tasks ({len(removed)} removed at zero WER)")
    app = create_app(store, ui_dir=args.ui_dir)
    import uvicorn

    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="laser-eval", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="YAML run config; flags override it")
        p.add_argument("--lang")
        p.add_argument("--pack-dir", dest="pack_dir")
        p.add_argument("--weights-minor", type=float, dest="weights_minor")
        p.add_argument("--weights-major", type=float, dest="weights_major")
        p.add_argument("--seed", type=int)
        p.add_argument("--out")

    p = sub.add_parser("score", help="score a corpus with a classifier backend")
    common(p)
    p.add_argument("--corpus", required=True)
    p.add_argument("--backend", choices=["rules", "llm", "human-import"])
    p.add_argument("--annotations", help="annotation TSV for the human-import backend")
    p.add_argument("--judge-endpoint", dest="judge_endpoint")
    p.add_argument("--judge-model", dest="judge_model")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("align", help="print the aligned word pairs for one sentence pair")
    common(p)
    p.add_argument("--ref", required=True)
    p.add_argument("--hyp", required=True)
    p.set_defaults(func=cmd_align)

    p = sub.add_parser("correlate", help="Pearson matrix over metric columns")
    common(p)
    p.add_argument("--evals", nargs="+", required=True,
                   help="evaluation JSONL files, optionally name=path")
    p.add_argument("--external", help="CSV of external metric columns keyed by id")
    p.add_argument("--columns", help="comma-separated column subset")
    p.add_argument("--use-raw", action="store_true",
                   help="correlate unclamped scores instead of clamped")
    p.set_defaults(func=cmd_correlate)

    p = sub.add_parser("report", help="qualitative report over high-WER samples")
    common(p)
    p.add_argument("--evals", required=True)
    p.add_argument("--wer-threshold", type=float, default=0.35, dest="wer_threshold")
    p.add_argument("--laser-split", type=float, default=None, dest="laser_split")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("export-pairs", help="export the word-pair training set")
    common(p)
    p.add_argument("--evals", required=True)
    p.add_argument("--rate", type=float, default=0.35,
                   help="sampling rate for identical pairs")
    p.add_argument("--heldout", help="file of sentence ids to tag as held out")
    p.set_defaults(func=cmd_export_pairs)

    p = sub.add_parser("eval-classifier", help="per-class accuracy of a label file")
    common(p)
    p.add_argument("--pred", required=True)
    p.add_argument("--gold", required=True)
    p.add_argument("--train-val", dest="train_val",
                   help="train+val counts per class, e.g. 0=310,1=312,2=77,3=251")
    p.set_defaults(func=cmd_eval_classifier)

    p = sub.add_parser("annotate", help="serve the annotation API and UI")
    common(p)
    p.add_argument("--corpus", help="corpus to queue as annotation tasks")
    p.add_argument("--store", required=True, help="directory for the append-only store")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8321)
    p.add_argument("--ui-dir", dest="ui_dir", help="built frontend bundle to serve at /")
    p.set_defaults(func=cmd_annotate)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PackError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CorpusError, DegenerateReferenceError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (BackendError, TransportError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BACKEND


if __name__ == "__main__":
    sys.exit(main())
