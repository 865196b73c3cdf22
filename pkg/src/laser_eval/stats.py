"""Correlation matrices, classifier accuracy tables and the qualitative report."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction
from typing import Sequence

from .rubric import SentenceEvaluation

__all__ = [
    "ScoreTable",
    "UndefinedCorrelationError",
    "pearson",
    "correlation_matrix",
    "matrix_to_csv",
    "matrix_to_json",
    "ClassAccuracy",
    "AccuracyTable",
    "classifier_accuracy",
    "accuracy_to_text",
    "accuracy_to_csv",
    "QualitativeReport",
    "qualitative_report",
    "report_to_markdown",
    "report_to_jsonl",
]


class UndefinedCorrelationError(ValueError):
    """Correlation is undefined (constant column or < 2 paired values)."""


@dataclass
class ScoreTable:
    """Corpus-level matrix of metric columns keyed by sentence id.

    Missing values are explicit ``None`` and excluded pairwise downstream.
    """

    ids: list[str]
    columns: dict[str, list[float | None]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for name, col in self.columns.items():
            if len(col) != len(self.ids):
                raise ValueError(f"column {name!r} length != id count")

    def add_column(self, name: str, by_id: dict[str, float]) -> None:
        self.columns[name] = [by_id.get(i) for i in self.ids]

    @classmethod
    def from_evaluations(
        cls,
        evals: Sequence[SentenceEvaluation],
        laser_column: str = "laser",
        use_raw: bool = False,
    ) -> "ScoreTable":
        ids = [e.id for e in evals]
        t = cls(ids=ids)
        t.columns[laser_column] = [e.laser_raw if use_raw else e.laser for e in evals]
        t.columns["wer"] = [e.wer for e in evals]
        t.columns["one_minus_wer"] = [1.0 - e.wer for e in evals]
        return t


def _paired(x: Sequence[float | None], y: Sequence[float | None]) -> tuple[list[float], list[float]]:
    xs, ys = [], []
    for a, b in zip(x, y):
        if a is None or b is None:
            continue
        if isinstance(a, float) and math.isnan(a):
            continue
        if isinstance(b, float) and math.isnan(b):
            continue
        xs.append(float(a))
        ys.append(float(b))
    return xs, ys


def pearson(x: Sequence[float | None], y: Sequence[float | None]) -> float:
    """Sample Pearson correlation with pairwise exclusion of missing values."""
    xs, ys = _paired(x, y)
    if len(xs) < 2:
        raise UndefinedCorrelationError("need at least 2 paired non-missing values")
    n = len(xs)
    mx = math.fsum(xs) / n
    my = math.fsum(ys) / n
    sxy = math.fsum((a - mx) * (b - my) for a, b in zip(xs, ys))
    sxx = math.fsum((a - mx) ** 2 for a in xs)
    syy = math.fsum((b - my) ** 2 for b in ys)
    if sxx == 0.0 or syy == 0.0:
        raise UndefinedCorrelationError("correlation undefined for a constant column")
    r = sxy / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


def correlation_matrix(
    table: ScoreTable, columns: Sequence[str] | None = None
) -> tuple[list[str], list[list[float | None]]]:
    """Symmetric Pearson matrix; undefined cells are None, the diagonal 1.0."""
    names = list(columns) if columns else list(table.columns)
    missing = [c for c in names if c not in table.columns]
    if missing:
        raise KeyError(f"unknown columns {missing}")
    k = len(names)
    matrix: list[list[float | None]] = [[None] * k for _ in range(k)]
    for i in range(k):
        xs, _ = _paired(table.columns[names[i]], table.columns[names[i]])
        constant = len(set(xs)) <= 1
        matrix[i][i] = None if constant or len(xs) < 2 else 1.0
        for j in range(i + 1, k):
            try:
                r = pearson(table.columns[names[i]], table.columns[names[j]])
            except UndefinedCorrelationError:
                r = None
            matrix[i][j] = matrix[j][i] = r
    return names, matrix


def matrix_to_csv(names: Sequence[str], matrix: Sequence[Sequence[float | None]]) -> str:
    lines = ["," + ",".join(names)]
    for name, row in zip(names, matrix):
        cells = ["" if v is None else repr(v) for v in row]
        lines.append(name + "," + ",".join(cells))
    return "\n".join(lines) + "\n"


def matrix_to_json(names: Sequence[str], matrix: Sequence[Sequence[float | None]]) -> str:
    # r and 100*r are both carried to avoid unit confusion in downstream plots.
    pct = [[None if v is None else 100.0 * v for v in row] for row in matrix]
    return json.dumps(
        {"columns": list(names), "matrix": [list(r) for r in matrix], "matrix_pct": pct},
        ensure_ascii=False,
        indent=2,
    )


def _round2(value: Fraction) -> str:
    pct = Decimal(value.numerator) * 100 / Decimal(value.denominator)
    return str(pct.quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))


@dataclass(frozen=True)
class ClassAccuracy:
    label: int
    test_count: int
    correct_count: int
    train_val_count: int = 0

    @property
    def accuracy(self) -> Fraction | None:
        if self.test_count == 0:
            return None
        return Fraction(self.correct_count, self.test_count)

    @property
    def percent(self) -> str:
        acc = self.accuracy
        return "n/a" if acc is None else _round2(acc) + "%"


@dataclass(frozen=True)
class AccuracyTable:
    classes: tuple[ClassAccuracy, ...]
    overall: ClassAccuracy

    def __post_init__(self) -> None:
        assert self.overall.correct_count == sum(c.correct_count for c in self.classes)
        assert self.overall.test_count == sum(c.test_count for c in self.classes)


_CLASS_NAMES = {0: "0 (Identical)", 1: "1 (Non-Pen)", 2: "2 (Minor)", 3: "3 (Major)"}


def classifier_accuracy(
    pred: Sequence[int],
    gold: Sequence[int],
    train_val_counts: dict[int, int] | None = None,
) -> AccuracyTable:
    """Per-class and overall accuracy; the overall row is the count ratio."""
    if len(pred) != len(gold):
        raise ValueError(f"length mismatch: {len(pred)} predictions vs {len(gold)} gold labels")
    for v in list(pred) + list(gold):
        if int(v) not in (0, 1, 2, 3):
            raise ValueError(f"labels must be in 0..3, got {v!r}")
    train_val_counts = train_val_counts or {}
    per: list[ClassAccuracy] = []
    for label in (0, 1, 2, 3):
        test = sum(1 for g in gold if int(g) == label)
        correct = sum(1 for p, g in zip(pred, gold) if int(g) == label and int(p) == int(g))
        per.append(
            ClassAccuracy(label, test, correct, train_val_counts.get(label, 0))
        )
    overall = ClassAccuracy(
        label=-1,
        test_count=sum(c.test_count for c in per),
        correct_count=sum(c.correct_count for c in per),
        train_val_count=sum(c.train_val_count for c in per),
    )
    return AccuracyTable(classes=tuple(per), overall=overall)


def accuracy_to_text(table: AccuracyTable) -> str:
    lines = [f"{'Class':<16}{'#train+val':>12}{'#test':>8}{'#correct':>10}{'accuracy':>10}"]
    for c in table.classes:
        lines.append(
            f"{_CLASS_NAMES[c.label]:<16}{c.train_val_count:>12}{c.test_count:>8}"
            f"{c.correct_count:>10}{c.percent:>10}"
        )
    o = table.overall
    lines.append(
        f"{'All':<16}{o.train_val_count:>12}{o.test_count:>8}{o.correct_count:>10}{o.percent:>10}"
    )
    return "\n".join(lines) + "\n"


def accuracy_to_csv(table: AccuracyTable) -> str:
    lines = ["class,train_val,test,correct,accuracy_exact,accuracy_pct"]
    rows = list(table.classes) + [table.overall]
    for c in rows:
        name = _CLASS_NAMES.get(c.label, "all")
        exact = "" if c.accuracy is None else f"{c.correct_count}/{c.test_count}"
        lines.append(
            f"{name},{c.train_val_count},{c.test_count},{c.correct_count},{exact},{c.percent}"
        )
    return "\n".join(lines) + "\n"


@dataclass
class QualitativeReport:
    wer_threshold: float
    laser_split: float
    high: list[dict]
    low: list[dict]


def _report_row(e: SentenceEvaluation) -> dict:
    mismatches = [
        {
            "ref": " ".join(p.ref_words),
            "hyp": " ".join(p.hyp_words),
            "level": int(p.level),
            "category": p.category,
        }
        for p in e.classified_pairs
        if int(p.level) != 0
    ]
    return {
        "id": e.id,
        "ref": e.ref_text,
        "hyp": e.hyp_text,
        "wer": e.wer,
        "laser": e.laser,
        "mismatches": mismatches,
        "categories": e.category_counts(),
    }


def qualitative_report(
    evals: Sequence[SentenceEvaluation],
    wer_threshold: float = 0.35,
    laser_split: float | None = None,
) -> QualitativeReport:
    """High-WER samples bucketed into high and low scorers.

    ``laser_split`` defaults to the median score of the filtered set; the
    buckets partition it (laser >= split is high, the rest low).
    """
    filtered = [e for e in evals if e.wer > wer_threshold]
    if laser_split is None:
        scores = sorted(e.laser for e in filtered)
        if scores:
            mid = len(scores) // 2
            laser_split = (
                scores[mid] if len(scores) % 2 else (scores[mid - 1] + scores[mid]) / 2
            )
        else:
            laser_split = 0.5
    high = [_report_row(e) for e in filtered if e.laser >= laser_split]
    low = [_report_row(e) for e in filtered if e.laser < laser_split]
    return QualitativeReport(wer_threshold, laser_split, high, low)


def report_to_markdown(report: QualitativeReport) -> str:
    def section(title: str, rows: list[dict]) -> list[str]:
        out = [f"## {title}", ""]
        if not rows:
            return out + ["(none)", ""]
        out.append("| id | reference | hypothesis | mismatches (category) | LASER | WER |")
        out.append("|---|---|---|---|---|---|")
        for r in rows:
            mm = "; ".join(
                f"{m['ref'] or '-'} / {m['hyp'] or '-'} ({m['category']})"
                for m in r["mismatches"]
            )
            out.append(
                f"| {r['id']} | {r['ref']} | {r['hyp']} | {mm} | {r['laser']:.4f} | {r['wer']:.4f} |"
            )
        out.append("")
        return out

    lines = [
        "# High-WER qualitative report",
        "",
        f"WER threshold: > {report.wer_threshold}; score split: {report.laser_split:.4f}",
        "",
    ]
    lines += section("High score", report.high)
    lines += section("Low score", report.low)
    return "\n".join(lines)


def report_to_jsonl(report: QualitativeReport) -> str:
    lines = []
    for bucket, rows in (("high", report.high), ("low", report.low)):
        for r in rows:
            lines.append(json.dumps({"bucket": bucket, **r}, ensure_ascii=False))
    return "\n".join(lines) + ("\n" if lines else "")
