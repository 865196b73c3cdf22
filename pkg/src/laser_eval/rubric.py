"""Penalty classes, weights and the per-sentence score.

A sentence scores ``1 - total_penalty / N`` where ``N`` is the reference word
count, minor errors weigh 0.5, major errors 1.0 and everything else 0.
The raw value is kept alongside a [0, 1]-clamped presentation value.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Iterable, Protocol, Sequence

from .align import AlignedPair, Alignment, Op, levenshtein_align, merge_pass, wer
from .textnorm import LanguagePack, tokenize

__all__ = [
    "PenaltyLevel",
    "PenaltyClass",
    "PenaltyWeights",
    "CATEGORIES",
    "LEVEL_CATEGORIES",
    "ScoreBreakdown",
    "ClassifiedPair",
    "SentenceEvaluation",
    "PairClassifier",
    "DegenerateReferenceError",
    "EvaluationError",
    "score_sentence",
    "evaluate_sentence",
    "aggregate_corpus",
    "evaluation_record",
    "evaluation_from_record",
]


class PenaltyLevel(IntEnum):
    IDENTICAL = 0
    NON_PENALIZABLE = 1
    MINOR = 2
    MAJOR = 3


CATEGORIES = (
    "numerical",
    "abbreviation",
    "compound",
    "transliteration-native",
    "transliteration-actual",
    "alternate-spelling",
    "proper-noun",
    "colloquial",
    "small-spelling",
    "small-grammar",
    "meaning-altering-spelling",
    "substitution",
    "omission-addition",
    "reordering",
    "other",
)

# Category rows of the error table, keyed by the penalty level they carry.
LEVEL_CATEGORIES: dict[PenaltyLevel, tuple[str, ...]] = {
    PenaltyLevel.IDENTICAL: ("other",),
    PenaltyLevel.NON_PENALIZABLE: (
        "numerical",
        "abbreviation",
        "compound",
        "transliteration-native",
        "transliteration-actual",
        "alternate-spelling",
        "proper-noun",
        "colloquial",
        "other",
    ),
    PenaltyLevel.MINOR: ("small-spelling", "small-grammar", "other"),
    PenaltyLevel.MAJOR: (
        "meaning-altering-spelling",
        "substitution",
        "omission-addition",
        "reordering",
        "other",
    ),
}


class DegenerateReferenceError(ValueError):
    """Raised when a score is requested for an empty reference."""


class EvaluationError(RuntimeError):
    """Classifier failure, annotated with the sentence id."""


@dataclass(frozen=True)
class PenaltyClass:
    level: PenaltyLevel
    category: str
    rationale: str = ""

    def __post_init__(self) -> None:
        if self.category not in CATEGORIES:
            raise ValueError(f"unknown category {self.category!r}")
        if self.category not in LEVEL_CATEGORIES[self.level]:
            raise ValueError(
                f"category {self.category!r} is inconsistent with level {self.level.name}"
            )


@dataclass(frozen=True)
class PenaltyWeights:
    minor: float = 0.5
    major: float = 1.0

    def __post_init__(self) -> None:
        if not (0 <= self.minor <= self.major):
            raise ValueError("weights must satisfy 0 <= minor <= major")

    def of(self, level: PenaltyLevel) -> float:
        if level is PenaltyLevel.MINOR:
            return self.minor
        if level is PenaltyLevel.MAJOR:
            return self.major
        return 0.0


@dataclass(frozen=True)
class ScoreBreakdown:
    total_penalty: float
    laser_raw: float
    laser: float


def score_sentence(
    n: int,
    classes: Sequence[PenaltyClass | PenaltyLevel],
    weights: PenaltyWeights = PenaltyWeights(),
) -> ScoreBreakdown:
    """Score one sentence from its per-pair penalty classes."""
    if n < 1:
        raise DegenerateReferenceError("reference word count must be >= 1")
    total = 0.0
    for c in classes:
        level = c.level if isinstance(c, PenaltyClass) else PenaltyLevel(c)
        total += weights.of(level)
    raw = 1.0 - total / n
    return ScoreBreakdown(total_penalty=total, laser_raw=raw, laser=max(0.0, raw))


@dataclass(frozen=True)
class ClassifiedPair:
    ref_words: tuple[str, ...]
    hyp_words: tuple[str, ...]
    op: str
    level: PenaltyLevel
    category: str
    rationale: str = ""

    @classmethod
    def from_pair(cls, pair: AlignedPair, klass: PenaltyClass) -> "ClassifiedPair":
        return cls(
            ref_words=pair.ref_words,
            hyp_words=pair.hyp_words,
            op=pair.op.value,
            level=klass.level,
            category=klass.category,
            rationale=klass.rationale,
        )


class PairClassifier(Protocol):
    classifier_id: str

    def classify(self, alignment: Alignment) -> list[tuple[AlignedPair, PenaltyClass]]: ...


@dataclass
class SentenceEvaluation:
    id: str
    lang: str
    ref_text: str
    hyp_text: str
    n_ref: int
    classified_pairs: list[ClassifiedPair]
    total_penalty: float
    laser_raw: float
    laser: float
    wer: float
    wer_counts: dict[str, int]
    classifier_id: str
    weights: PenaltyWeights = field(default_factory=PenaltyWeights)
    flags: dict = field(default_factory=dict)

    def level_counts(self) -> dict[int, int]:
        out = {int(l): 0 for l in PenaltyLevel}
        for p in self.classified_pairs:
            out[int(p.level)] += 1
        return out

    def category_counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for p in self.classified_pairs:
            if p.level is PenaltyLevel.IDENTICAL:
                continue
            out[p.category] = out.get(p.category, 0) + 1
        return out


def evaluate_sentence(
    ref_raw: str,
    hyp_raw: str,
    classifier: PairClassifier,
    pack: LanguagePack,
    weights: PenaltyWeights = PenaltyWeights(),
    sent_id: str = "",
    kmax: int = 3,
) -> SentenceEvaluation:
    """tokenize -> align -> merge -> classify -> score, with WER attached."""
    ref = tokenize(ref_raw, pack, sent_id)
    hyp = tokenize(hyp_raw, pack, sent_id)
    if ref.n == 0:
        raise DegenerateReferenceError(f"sentence {sent_id!r}: empty reference")
    w = wer(ref, hyp)
    merged = merge_pass(levenshtein_align(ref, hyp), pack, kmax=kmax)
    try:
        classified = classifier.classify(merged)
    except Exception as exc:  # attach the sentence id for corpus-level reports
        raise EvaluationError(f"sentence {sent_id!r}: {exc}") from exc
    breakdown = score_sentence(ref.n, [k for _, k in classified], weights)
    return SentenceEvaluation(
        id=sent_id,
        lang=pack.lang,
        ref_text=ref_raw,
        hyp_text=hyp_raw,
        n_ref=ref.n,
        classified_pairs=[ClassifiedPair.from_pair(p, k) for p, k in classified],
        total_penalty=breakdown.total_penalty,
        laser_raw=breakdown.laser_raw,
        laser=breakdown.laser,
        wer=w.rate,
        wer_counts={"S": w.substitutions, "I": w.insertions, "D": w.deletions, "N": w.n},
        classifier_id=classifier.classifier_id,
        weights=weights,
    )


def aggregate_corpus(evals: Sequence[SentenceEvaluation]) -> dict:
    """Corpus roll-up: means plus per-level and per-category frequencies."""
    if not evals:
        raise ValueError("cannot aggregate an empty evaluation list")
    levels = {int(l): 0 for l in PenaltyLevel}
    categories: dict[str, int] = {}
    for e in evals:
        for lvl, cnt in e.level_counts().items():
            levels[lvl] += cnt
        for cat, cnt in e.category_counts().items():
            categories[cat] = categories.get(cat, 0) + cnt
    return {
        "count": len(evals),
        "mean_laser": sum(e.laser for e in evals) / len(evals),
        "mean_laser_raw": sum(e.laser_raw for e in evals) / len(evals),
        "mean_wer": sum(e.wer for e in evals) / len(evals),
        "level_counts": levels,
        "category_counts": dict(sorted(categories.items())),
    }


def evaluation_record(e: SentenceEvaluation) -> dict:
    """JSON-ready record; values stay unrounded, rounding is presentation-only."""
    return {
        "id": e.id,
        "lang": e.lang,
        "ref": e.ref_text,
        "hyp": e.hyp_text,
        "n_ref": e.n_ref,
        "pairs": [
            {
                "ref": list(p.ref_words),
                "hyp": list(p.hyp_words),
                "op": p.op,
                "level": int(p.level),
                "category": p.category,
                "rationale": p.rationale,
            }
            for p in e.classified_pairs
        ],
        "total_penalty": e.total_penalty,
        "laser_raw": e.laser_raw,
        "laser": e.laser,
        "wer": e.wer,
        "wer_counts": e.wer_counts,
        "classifier_id": e.classifier_id,
        "weights": {"minor": e.weights.minor, "major": e.weights.major},
        "flags": e.flags,
    }


def evaluation_from_record(rec: dict) -> SentenceEvaluation:
    return SentenceEvaluation(
        id=rec["id"],
        lang=rec.get("lang", ""),
        ref_text=rec.get("ref", ""),
        hyp_text=rec.get("hyp", ""),
        n_ref=rec["n_ref"],
        classified_pairs=[
            ClassifiedPair(
                ref_words=tuple(p["ref"]),
                hyp_words=tuple(p["hyp"]),
                op=p["op"],
                level=PenaltyLevel(p["level"]),
                category=p["category"],
                rationale=p.get("rationale", ""),
            )
            for p in rec.get("pairs", [])
        ],
        total_penalty=rec["total_penalty"],
        laser_raw=rec["laser_raw"],
        laser=rec["laser"],
        wer=rec["wer"],
        wer_counts=rec.get("wer_counts", {}),
        classifier_id=rec.get("classifier_id", ""),
        weights=PenaltyWeights(**rec.get("weights", {"minor": 0.5, "major": 1.0})),
        flags=rec.get("flags", {}),
    )


def dump_evaluations(evals: Iterable[SentenceEvaluation]) -> str:
    return "".join(
        json.dumps(evaluation_record(e), ensure_ascii=False) + "\n" for e in evals
    )
