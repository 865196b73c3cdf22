"""Corpus I/O: loading pairs, zero-WER filtering, external score columns,
human-annotation import and the word-pair training-set export."""

from __future__ import annotations

import csv
import io
import json
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .align import wer
from .rubric import PenaltyLevel, PenaltyWeights, SentenceEvaluation, score_sentence
from .stats import ScoreTable
from .textnorm import LanguagePack, tokenize

__all__ = [
    "CorpusRecord",
    "CorpusError",
    "load_corpus",
    "save_corpus",
    "filter_zero_wer",
    "merge_score_columns",
    "TrainingPair",
    "export_training_pairs",
    "training_pairs_to_jsonl",
    "HumanAnnotation",
    "import_human_annotations",
]


class CorpusError(ValueError):
    """Malformed corpus/annotation input; message carries the line number."""


@dataclass(frozen=True)
class CorpusRecord:
    id: str
    lang: str
    ref_text: str
    hyp_text: str
    external_scores: dict = field(default_factory=dict)


def _validate(records: list[CorpusRecord], source: str) -> list[CorpusRecord]:
    seen: set[str] = set()
    for rec in records:
        if rec.id in seen:
            raise CorpusError(f"{source}: duplicate sentence id {rec.id!r}")
        seen.add(rec.id)
    return records


def load_corpus(path: str | Path, fmt: str | None = None) -> list[CorpusRecord]:
    """Load reference/hypothesis pairs from JSONL or TSV (inferred by suffix)."""
    path = Path(path)
    if not path.is_file():
        raise CorpusError(f"corpus file not found: {path}")
    fmt = fmt or ("tsv" if path.suffix.lower() in (".tsv", ".tab") else "jsonl")
    records: list[CorpusRecord] = []
    text = path.read_text(encoding="utf-8")

    if fmt == "jsonl":
        for lineno, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            try:
                doc = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"{path}:{lineno}: invalid JSON ({exc})") from exc
            missing = {"id", "ref"} - set(doc)
            if missing:
                raise CorpusError(f"{path}:{lineno}: missing fields {sorted(missing)}")
            if not str(doc["ref"]).strip():
                raise CorpusError(f"{path}:{lineno}: empty reference text")
            records.append(
                CorpusRecord(
                    id=str(doc["id"]),
                    lang=str(doc.get("lang", "")),
                    ref_text=str(doc["ref"]),
                    hyp_text=str(doc.get("hyp", "")),
                    external_scores=dict(doc.get("scores", {})),
                )
            )
    elif fmt == "tsv":
        reader = csv.DictReader(io.StringIO(text), delimiter="\t")
        required = {"id", "ref"}
        if not reader.fieldnames or required - set(reader.fieldnames):
            raise CorpusError(f"{path}:1: TSV header must include id, lang, ref, hyp")
        for lineno, row in enumerate(reader, start=2):
            if row.get("id") is None or not (row.get("ref") or "").strip():
                raise CorpusError(f"{path}:{lineno}: missing id or empty reference")
            records.append(
                CorpusRecord(
                    id=row["id"],
                    lang=row.get("lang", "") or "",
                    ref_text=row["ref"],
                    hyp_text=row.get("hyp", "") or "",
                )
            )
    else:
        raise CorpusError(f"unknown corpus format {fmt!r}")
    return _validate(records, str(path))


def save_corpus(records: Sequence[CorpusRecord], path: str | Path, fmt: str | None = None) -> None:
    path = Path(path)
    fmt = fmt or ("tsv" if path.suffix.lower() in (".tsv", ".tab") else "jsonl")
    if fmt == "jsonl":
        with open(path, "w", encoding="utf-8") as fh:
            for r in records:
                doc = {"id": r.id, "lang": r.lang, "ref": r.ref_text, "hyp": r.hyp_text}
                if r.external_scores:
                    doc["scores"] = r.external_scores
                fh.write(json.dumps(doc, ensure_ascii=False) + "\n")
    elif fmt == "tsv":
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, delimiter="\t")
            writer.writerow(["id", "lang", "ref", "hyp"])
            for r in records:
                writer.writerow([r.id, r.lang, r.ref_text, r.hyp_text])
    else:
        raise CorpusError(f"unknown corpus format {fmt!r}")


def filter_zero_wer(
    records: Sequence[CorpusRecord], pack: LanguagePack
) -> tuple[list[CorpusRecord], list[str]]:
    """Drop pairs with no transcription mismatch under this normalization."""
    kept: list[CorpusRecord] = []
    removed: list[str] = []
    for rec in records:
        ref = tokenize(rec.ref_text, pack, rec.id)
        hyp = tokenize(rec.hyp_text, pack, rec.id)
        if ref.words == hyp.words:
            removed.append(rec.id)
        else:
            kept.append(rec)
    return kept, removed


def merge_score_columns(table: ScoreTable, path: str | Path) -> tuple[ScoreTable, list[str]]:
    """Add external metric columns from a CSV keyed by sentence id.

    Unknown ids are skipped with a warning; ids absent from the file become
    explicit missing cells so correlations exclude them pairwise.
    """
    path = Path(path)
    warnings: list[str] = []
    with open(path, encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if not reader.fieldnames or reader.fieldnames[0] != "id":
            raise CorpusError(f"{path}: first CSV column must be 'id'")
        metrics = [c for c in reader.fieldnames[1:] if c]
        values: dict[str, dict[str, float]] = {m: {} for m in metrics}
        known = set(table.ids)
        seen: set[str] = set()
        for lineno, row in enumerate(reader, start=2):
            sid = row["id"]
            if sid in seen:
                raise CorpusError(f"{path}:{lineno}: duplicate id {sid!r}")
            seen.add(sid)
            if sid not in known:
                warnings.append(f"{path}:{lineno}: unknown sentence id {sid!r}, row skipped")
                continue
            for m in metrics:
                cell = (row.get(m) or "").strip()
                if cell:
                    values[m][sid] = float(cell)
    for m in metrics:
        table.add_column(m, values[m])
    return table, warnings


@dataclass(frozen=True)
class TrainingPair:
    ref_words: tuple[str, ...]
    hyp_words: tuple[str, ...]
    label: int
    category: str
    sentence_id: str
    split: str

    def __post_init__(self) -> None:
        if self.label not in (0, 1, 2, 3):
            raise ValueError("label must be in 0..3")
        if not self.ref_words and not self.hyp_words:
            raise ValueError("at least one side of a training pair must be non-empty")


def export_training_pairs(
    evals: Sequence[SentenceEvaluation],
    identical_sample_rate: float,
    seed: int,
    heldout_ids: set[str] | None = None,
    test_fraction: float = 0.1,
    val_fraction: float = 0.1,
) -> tuple[list[TrainingPair], dict]:
    """Word-pair classification dataset from classified evaluations.

    All mismatch pairs are exported; identical pairs are sampled at the given
    rate so class 0 does not swamp the set.  Pairs from held-out sentences
    are tagged ``heldout`` and excluded from the train/val/test assignment.
    """
    if not 0 <= identical_sample_rate <= 1:
        raise ValueError("identical_sample_rate must be within [0, 1]")
    rng = random.Random(seed)
    heldout_ids = heldout_ids or set()
    pairs: list[TrainingPair] = []
    for e in evals:
        for p in e.classified_pairs:
            if not p.ref_words and not p.hyp_words:
                continue
            label = int(p.level)
            if label == 0 and rng.random() >= identical_sample_rate:
                continue
            if e.id in heldout_ids:
                split = "heldout"
            else:
                roll = rng.random()
                if roll < test_fraction:
                    split = "test"
                elif roll < test_fraction + val_fraction:
                    split = "val"
                else:
                    split = "train"
            pairs.append(
                TrainingPair(
                    ref_words=p.ref_words,
                    hyp_words=p.hyp_words,
                    label=label,
                    category=p.category,
                    sentence_id=e.id,
                    split=split,
                )
            )
    histogram = {label: sum(1 for p in pairs if p.label == label) for label in (0, 1, 2, 3)}
    split_counts: dict[str, int] = {}
    for p in pairs:
        split_counts[p.split] = split_counts.get(p.split, 0) + 1
    summary = {
        "identical_sample_rate": identical_sample_rate,
        "seed": seed,
        "class_counts": histogram,
        "split_counts": split_counts,
    }
    return pairs, summary


def training_pairs_to_jsonl(pairs: Sequence[TrainingPair]) -> str:
    lines = []
    for p in pairs:
        lines.append(
            json.dumps(
                {
                    "ref": " ".join(p.ref_words),
                    "hyp": " ".join(p.hyp_words),
                    "label": p.label,
                    "category": p.category,
                    "sentence_id": p.sentence_id,
                    "split": p.split,
                },
                ensure_ascii=False,
            )
        )
    return "\n".join(lines) + ("\n" if lines else "")


@dataclass(frozen=True)
class HumanAnnotation:
    id: str
    no_penalty: tuple[str, ...]
    major: tuple[str, ...]
    minor: tuple[str, ...]
    no_penalty_count: int
    major_count: int
    minor_count: int
    n_ref: int
    human_score: float
    count_mismatch: bool


_ANNOTATION_COLUMNS = (
    "id",
    "no_penalty_errors",
    "major_errors",
    "minor_errors",
    "no_penalty_count",
    "major_count",
    "minor_count",
)


def _split_items(cell: str) -> tuple[str, ...]:
    cell = cell.strip()
    if not cell:
        return ()
    return tuple(item.strip() for item in cell.split(", ") if item.strip())


def import_human_annotations(
    path: str | Path,
    n_by_id: dict[str, int],
    weights: PenaltyWeights = PenaltyWeights(),
) -> tuple[list[HumanAnnotation], list[str]]:
    """Read the annotation TSV (three error lists + three counts per sentence).

    The human score uses this toolkit's reference token count ``N`` for the
    sentence; count/list disagreements are flagged as warnings, with the
    counts taken as authoritative.
    """
    path = Path(path)
    warnings: list[str] = []
    out: list[HumanAnnotation] = []
    with open(path, encoding="utf-8") as fh:
        reader = csv.DictReader(fh, delimiter="\t")
        if not reader.fieldnames or set(_ANNOTATION_COLUMNS) - set(reader.fieldnames):
            raise CorpusError(
                f"{path}: annotation TSV must have columns {', '.join(_ANNOTATION_COLUMNS)}"
            )
        for lineno, row in enumerate(reader, start=2):
            sid = (row.get("id") or "").strip()
            if not sid:
                raise CorpusError(f"{path}:{lineno}: missing sentence id")
            if sid not in n_by_id:
                raise CorpusError(f"{path}:{lineno}: unknown sentence id {sid!r}")
            try:
                counts = [
                    int(row["no_penalty_count"]),
                    int(row["major_count"]),
                    int(row["minor_count"]),
                ]
            except (TypeError, ValueError) as exc:
                raise CorpusError(f"{path}:{lineno}: bad count ({exc})") from exc
            lists = [
                _split_items(row.get("no_penalty_errors") or ""),
                _split_items(row.get("major_errors") or ""),
                _split_items(row.get("minor_errors") or ""),
            ]
            mismatch = any(lst and len(lst) != c for lst, c in zip(lists, counts))
            if mismatch:
                warnings.append(
                    f"{path}:{lineno}: error-list lengths disagree with counts for {sid!r}"
                )
            n = n_by_id[sid]
            # Single formula, shared with the rubric module.
            levels = [PenaltyLevel.MAJOR] * counts[1] + [PenaltyLevel.MINOR] * counts[2]
            breakdown = score_sentence(n, levels, weights)
            out.append(
                HumanAnnotation(
                    id=sid,
                    no_penalty=lists[0],
                    major=lists[1],
                    minor=lists[2],
                    no_penalty_count=counts[0],
                    major_count=counts[1],
                    minor_count=counts[2],
                    n_ref=n,
                    human_score=breakdown.laser,
                    count_mismatch=mismatch,
                )
            )
    return out, warnings
