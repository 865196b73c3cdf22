"""Deterministic rule cascade assigning a penalty class to each aligned pair.

The cascade forgives first: equivalence rules (compound, numeral,
abbreviation, colloquial, fold/transliteration) fire before the minor rules,
which fire before the major catch-alls.  Rule 10 is total, so every pair gets
exactly one class.  Reordering is not detected semantically; reordered words
surface as substitution/insert/delete pairs and are penalized as such.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .align import AlignedPair, Alignment, Op, edit_distance
from .rubric import PenaltyClass, PenaltyLevel
from .textnorm import (
    LanguagePack,
    Token,
    abbreviation_key_span,
    fold,
    grapheme_split,
    number_value,
    script_of,
)

__all__ = ["RuleTrace", "classify_pair", "classify_sentence", "RulesClassifier"]


@dataclass
class RuleTrace:
    """Which rules were checked, and the one that decided the pair."""

    checked: list[tuple[str, bool]] = field(default_factory=list)
    final: str = ""

    def miss(self, name: str) -> None:
        self.checked.append((name, False))

    def hit(self, name: str) -> None:
        self.checked.append((name, True))
        self.final = name


def _fold_equal(pair: AlignedPair, pack: LanguagePack) -> bool:
    """Equal under per-token fold keys, or under a fold of the joined span
    (the second route catches whole-word lexical rules across compounds)."""
    ref_keys = "".join(fold(t, pack) for t in pair.ref)
    hyp_keys = "".join(fold(t, pack) for t in pair.hyp)
    if ref_keys == hyp_keys:
        return True
    return fold("".join(pair.ref_words), pack) == fold("".join(pair.hyp_words), pack)


def _scripts(pair: AlignedPair) -> tuple[str | None, str | None]:
    ref = script_of(" ".join(pair.ref_words)) if pair.ref else None
    hyp = script_of(" ".join(pair.hyp_words)) if pair.hyp else None
    return ref, hyp


def _strip_common(a: str, b: str) -> tuple[str, str]:
    """Remove the longest shared prefix, then the longest shared suffix."""
    i = 0
    while i < min(len(a), len(b)) and a[i] == b[i]:
        i += 1
    a, b = a[i:], b[i:]
    j = 0
    while j < min(len(a), len(b)) and a[len(a) - 1 - j] == b[len(b) - 1 - j]:
        j += 1
    if j:
        a, b = a[: len(a) - j], b[: len(b) - j]
    return a, b


def _split_cluster(cluster: str) -> tuple[str, str]:
    import unicodedata

    base = []
    marks = []
    for ch in cluster:
        (marks if unicodedata.category(ch).startswith("M") else base).append(ch)
    return "".join(base), "".join(marks)


def _similar_sound(a: str, b: str, pack: LanguagePack) -> bool:
    if pack.is_similar_sound(a, b):
        return True
    # Same-base grapheme clusters whose vowel signs form a listed pair
    # (covers Indic matra-length differences without enumerating syllables).
    ga, gb = grapheme_split(a), grapheme_split(b)
    if len(ga) == 1 and len(gb) == 1:
        base_a, marks_a = _split_cluster(ga[0])
        base_b, marks_b = _split_cluster(gb[0])
        if base_a == base_b and pack.is_similar_sound(marks_a, marks_b):
            return True
    return False


def classify_pair(
    pair: AlignedPair,
    pack: LanguagePack,
    names: frozenset[str] | set[str] | None = None,
) -> tuple[PenaltyClass, RuleTrace]:
    """First-match cascade over one merge-passed aligned pair.

    ``names`` is an optional per-corpus proper-noun lexicon (fold keys or
    normalized spellings); without it, unknown name variants one edit away
    fall through to the minor spelling rule.
    """
    trace = RuleTrace()
    ref_join = "".join(pair.ref_words)
    hyp_join = "".join(pair.hyp_words)

    # 1. exact match
    if pair.op is Op.MATCH or (
        len(pair.ref) == 1 and len(pair.hyp) == 1 and ref_join == hyp_join
    ):
        trace.hit("identical")
        return PenaltyClass(PenaltyLevel.IDENTICAL, "other", "exact match"), trace
    trace.miss("identical")

    ref_script, hyp_script = _scripts(pair)
    cross_script = bool(ref_script and hyp_script and ref_script != hyp_script)

    # 2. compound join/split
    if pair.op in (Op.JOIN, Op.SPLIT) and _fold_equal(pair, pack):
        trace.hit("compound")
        category = "transliteration-actual" if cross_script else "compound"
        return (
            PenaltyClass(PenaltyLevel.NON_PENALIZABLE, category, "compound word variation"),
            trace,
        )
    trace.miss("compound")

    # 3. equal numeral values
    if pair.ref and pair.hyp:
        rv = number_value(list(pair.ref), pack)
        if rv is not None and rv == number_value(list(pair.hyp), pack):
            trace.hit("numerical")
            return (
                PenaltyClass(
                    PenaltyLevel.NON_PENALIZABLE, "numerical", f"both denote {rv}"
                ),
                trace,
            )
    trace.miss("numerical")

    # 4. abbreviation spellings
    if pair.ref and pair.hyp:
        rk = abbreviation_key_span(list(pair.ref), pack)
        if rk is not None and rk == abbreviation_key_span(list(pair.hyp), pack):
            trace.hit("abbreviation")
            return (
                PenaltyClass(
                    PenaltyLevel.NON_PENALIZABLE, "abbreviation", f"both spell {rk!r}"
                ),
                trace,
            )
    trace.miss("abbreviation")

    # 5. colloquial / slang variants
    if len(pair.ref) == 1 and len(pair.hyp) == 1 and pack.is_colloquial_pair(
        ref_join, hyp_join
    ):
        trace.hit("colloquial")
        return (
            PenaltyClass(PenaltyLevel.NON_PENALIZABLE, "colloquial", "colloquial variant"),
            trace,
        )
    trace.miss("colloquial")

    # 6. proper-noun lexicon (optional, per corpus)
    if names and pair.ref and pair.hyp:
        keys = {ref_join, hyp_join, fold(ref_join, pack), fold(hyp_join, pack)}
        if keys & set(names) and edit_distance(
            grapheme_split(ref_join), grapheme_split(hyp_join)
        ) <= 2:
            trace.hit("proper-noun")
            return (
                PenaltyClass(PenaltyLevel.NON_PENALIZABLE, "proper-noun", "known name variant"),
                trace,
            )
    trace.miss("proper-noun")

    # 7. fold-equal spellings (same or cross script)
    if pair.ref and pair.hyp and _fold_equal(pair, pack):
        trace.hit("fold-equal")
        if cross_script:
            category = "transliteration-actual"
        elif ref_script == pack.native_script and pack.native_script != "Latin":
            category = "alternate-spelling"
        elif pack.native_script != "Latin":
            category = "transliteration-native"
        else:
            category = "alternate-spelling"
        return (
            PenaltyClass(PenaltyLevel.NON_PENALIZABLE, category, "fold-equal spelling"),
            trace,
        )
    trace.miss("fold-equal")

    # 8. minor: similar-sound spelling difference or grammatical suffix
    if pair.op is Op.SUBSTITUTE:
        mid_a, mid_b = _strip_common(ref_join, hyp_join)
        if _similar_sound(mid_a, mid_b, pack):
            trace.hit("small-spelling")
            return (
                PenaltyClass(
                    PenaltyLevel.MINOR, "small-spelling", f"{mid_a!r} ~ {mid_b!r}"
                ),
                trace,
            )
        trace.miss("small-spelling")
        i = 0
        while i < min(len(ref_join), len(hyp_join)) and ref_join[i] == hyp_join[i]:
            i += 1
        suf_a, suf_b = ref_join[i:], hyp_join[i:]
        if i >= 2 and pack.is_minor_suffix_pair(suf_a, suf_b):
            trace.hit("small-grammar")
            return (
                PenaltyClass(
                    PenaltyLevel.MINOR, "small-grammar", f"suffix {suf_a!r} ~ {suf_b!r}"
                ),
                trace,
            )
        trace.miss("small-grammar")
    else:
        trace.miss("small-spelling")
        trace.miss("small-grammar")

    # 9. omissions and additions
    if pair.op in (Op.DELETE, Op.INSERT):
        trace.hit("omission-addition")
        word = ref_join or hyp_join
        kind = "omission" if pair.op is Op.DELETE else "addition"
        return (
            PenaltyClass(PenaltyLevel.MAJOR, "omission-addition", f"{kind} of {word!r}"),
            trace,
        )
    trace.miss("omission-addition")

    # 10. major catch-all
    dist = edit_distance(grapheme_split(ref_join), grapheme_split(hyp_join))
    if dist <= 2:
        trace.hit("meaning-altering-spelling")
        return (
            PenaltyClass(
                PenaltyLevel.MAJOR,
                "meaning-altering-spelling",
                f"close spelling, {dist} grapheme edit(s)",
            ),
            trace,
        )
    trace.hit("substitution")
    return PenaltyClass(PenaltyLevel.MAJOR, "substitution", "unrelated word"), trace


def classify_sentence(
    a: Alignment,
    pack: LanguagePack,
    names: frozenset[str] | set[str] | None = None,
) -> list[tuple[AlignedPair, PenaltyClass, RuleTrace]]:
    return [(p, *classify_pair(p, pack, names)) for p in a.pairs]


class RulesClassifier:
    """PairClassifier over a language pack; pure and thread-safe."""

    def __init__(self, pack: LanguagePack, names: set[str] | None = None):
        self.pack = pack
        self.names = frozenset(names or ())
        self.classifier_id = f"rules:{pack.lang}/v{pack.version}"

    def classify(self, alignment: Alignment) -> list[tuple[AlignedPair, PenaltyClass]]:
        return [
            (pair, klass)
            for pair, klass, _ in classify_sentence(alignment, self.pack, self.names)
        ]
