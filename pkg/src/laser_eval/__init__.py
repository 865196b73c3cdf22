"""Penalty-rubric scoring of ASR hypotheses against references.

Aligned word pairs are classified as identical, non-penalizable, minor or
major; a sentence scores ``1 - weighted_penalties / reference_word_count``.
Classifier backends: a deterministic rule cascade over language packs, an
LLM judge behind a cached chat-completion client, and imported human
annotations.  A stats harness covers Pearson correlation matrices,
classifier accuracy tables and qualitative high-WER reports.
"""

__version__ = "0.1.0"

from .align import (
    AlignedPair,
    Alignment,
    Op,
    brute_force_distance,
    cer,
    levenshtein_align,
    merge_pass,
    wer,
)
from .rubric import (
    PenaltyClass,
    PenaltyLevel,
    PenaltyWeights,
    SentenceEvaluation,
    aggregate_corpus,
    evaluate_sentence,
    score_sentence,
)
from .rules import RulesClassifier, classify_pair, classify_sentence
from .textnorm import (
    LanguagePack,
    Token,
    TokenizedSentence,
    fold,
    load_pack,
    normalize_text,
    tokenize,
)

__all__ = [
    "__version__",
    "AlignedPair",
    "Alignment",
    "Op",
    "brute_force_distance",
    "cer",
    "levenshtein_align",
    "merge_pass",
    "wer",
    "PenaltyClass",
    "PenaltyLevel",
    "PenaltyWeights",
    "SentenceEvaluation",
    "aggregate_corpus",
    "evaluate_sentence",
    "score_sentence",
    "RulesClassifier",
    "classify_pair",
    "classify_sentence",
    "LanguagePack",
    "Token",
    "TokenizedSentence",
    "fold",
    "load_pack",
    "normalize_text",
    "tokenize",
]
