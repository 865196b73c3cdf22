"""Edit-distance word alignment, compound join/split detection, WER and CER.

The aligner is an optimal unit-cost dynamic program with a deterministic
forward walk (Match > Substitute > Delete > Insert on ties, resolved left to
right).  :func:`merge_pass` then repairs the pair list locally: adjacent
groups whose sides are equivalent under the language pack (fold keys,
numeral values, abbreviation keys) are regrouped into join/split pairs or
re-paired, without ever changing either side's token sequence or increasing
the pair count.  WER always uses the pre-merge counts.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import Sequence

from .textnorm import (
    LanguagePack,
    Token,
    TokenizedSentence,
    abbreviation_key_span,
    fold,
    number_value,
)

__all__ = [
    "Op",
    "AlignedPair",
    "Alignment",
    "levenshtein_align",
    "merge_pass",
    "wer",
    "cer",
    "WerResult",
    "brute_force_distance",
    "edit_distance",
    "alignment_record",
]


class Op(str, Enum):
    MATCH = "match"
    SUBSTITUTE = "substitute"
    DELETE = "delete"  # reference word missing from the hypothesis
    INSERT = "insert"  # hypothesis word absent from the reference
    JOIN = "join"      # k hypothesis tokens form one reference token
    SPLIT = "split"    # one hypothesis token covers k reference tokens


# Hypothesis-to-reference view of the same pair (directional relabeling).
_REVERSE_OP = {
    Op.MATCH: Op.MATCH,
    Op.SUBSTITUTE: Op.SUBSTITUTE,
    Op.DELETE: Op.INSERT,
    Op.INSERT: Op.DELETE,
    Op.JOIN: Op.SPLIT,
    Op.SPLIT: Op.JOIN,
}


@dataclass(frozen=True)
class AlignedPair:
    ref: tuple[Token, ...]
    hyp: tuple[Token, ...]
    op: Op

    def __post_init__(self) -> None:
        nr, nh = len(self.ref), len(self.hyp)
        ok = {
            Op.MATCH: nr == 1 and nh == 1,
            Op.SUBSTITUTE: nr == 1 and nh == 1,
            Op.DELETE: nr == 1 and nh == 0,
            Op.INSERT: nr == 0 and nh == 1,
            Op.JOIN: nr == 1 and nh >= 2,
            Op.SPLIT: nr >= 2 and nh == 1,
        }[self.op]
        if not ok:
            raise ValueError(f"{self.op.value} pair with {nr} ref / {nh} hyp tokens")

    @property
    def k(self) -> int:
        return max(len(self.ref), len(self.hyp))

    @property
    def ref_words(self) -> tuple[str, ...]:
        return tuple(t.normalized for t in self.ref)

    @property
    def hyp_words(self) -> tuple[str, ...]:
        return tuple(t.normalized for t in self.hyp)

    @property
    def is_mismatch(self) -> bool:
        return self.op is not Op.MATCH


@dataclass(frozen=True)
class Alignment:
    pairs: tuple[AlignedPair, ...]
    distance: int  # unit-cost edit distance, fixed before any merge pass
    substitutions: int  # pre-merge counts, the basis for WER
    deletions: int
    insertions: int

    def counts(self) -> dict[str, int]:
        out = {op.value: 0 for op in Op}
        for p in self.pairs:
            out[p.op.value] += 1
        return out

    def ref_tokens(self) -> tuple[Token, ...]:
        return tuple(t for p in self.pairs for t in p.ref)

    def hyp_tokens(self) -> tuple[Token, ...]:
        return tuple(t for p in self.pairs for t in p.hyp)


def _suffix_dp(ref: Sequence[str], hyp: Sequence[str]) -> list[list[int]]:
    m, n = len(ref), len(hyp)
    dp = [[0] * (n + 1) for _ in range(m + 1)]
    for j in range(n + 1):
        dp[m][j] = n - j
    for i in range(m - 1, -1, -1):
        dp[i][n] = m - i
        row, below = dp[i], dp[i + 1]
        for j in range(n - 1, -1, -1):
            diag = below[j + 1] + (0 if ref[i] == hyp[j] else 1)
            row[j] = min(diag, below[j] + 1, row[j + 1] + 1)
    return dp


def levenshtein_align(ref: TokenizedSentence, hyp: TokenizedSentence) -> Alignment:
    """Optimal alignment of normalized token strings with deterministic ties."""
    rwords = [t.normalized for t in ref.tokens]
    hwords = [t.normalized for t in hyp.tokens]
    dp = _suffix_dp(rwords, hwords)
    m, n = len(rwords), len(hwords)

    pairs: list[AlignedPair] = []
    subs = dels = inss = 0
    i = j = 0
    while i < m or j < n:
        cur = dp[i][j]
        if i < m and j < n and rwords[i] == hwords[j] and dp[i + 1][j + 1] == cur:
            pairs.append(AlignedPair((ref.tokens[i],), (hyp.tokens[j],), Op.MATCH))
            i, j = i + 1, j + 1
        elif i < m and j < n and dp[i + 1][j + 1] + 1 == cur:
            pairs.append(AlignedPair((ref.tokens[i],), (hyp.tokens[j],), Op.SUBSTITUTE))
            subs += 1
            i, j = i + 1, j + 1
        elif i < m and dp[i + 1][j] + 1 == cur:
            pairs.append(AlignedPair((ref.tokens[i],), (), Op.DELETE))
            dels += 1
            i += 1
        else:
            pairs.append(AlignedPair((), (hyp.tokens[j],), Op.INSERT))
            inss += 1
            j += 1

    return Alignment(
        pairs=tuple(pairs),
        distance=dp[0][0],
        substitutions=subs,
        deletions=dels,
        insertions=inss,
    )


def _spans_equivalent(
    ref: Sequence[Token], hyp: Sequence[Token], pack: LanguagePack
) -> bool:
    """Pack equivalence of two spans: fold keys, numeral value or abbreviation."""
    if not ref or not hyp:
        return False
    ref_keys = "".join(fold(t, pack) for t in ref)
    hyp_keys = "".join(fold(t, pack) for t in hyp)
    if ref_keys == hyp_keys:
        return True
    # A second fold over the joined words catches whole-word lexical rules.
    if fold("".join(t.normalized for t in ref), pack) == fold(
        "".join(t.normalized for t in hyp), pack
    ):
        return True
    rv = number_value(list(ref), pack)
    if rv is not None and rv == number_value(list(hyp), pack):
        return True
    rk = abbreviation_key_span(list(ref), pack)
    if rk is not None and rk == abbreviation_key_span(list(hyp), pack):
        return True
    return False


_REPAIR_OPS = {Op.SUBSTITUTE, Op.DELETE, Op.INSERT}


def _pivot_pair(ref: tuple[Token, ...], hyp: tuple[Token, ...]) -> AlignedPair:
    if len(ref) == 1 and len(hyp) == 1:
        op = Op.MATCH if ref[0].normalized == hyp[0].normalized else Op.SUBSTITUTE
    elif len(ref) == 1:
        op = Op.JOIN
    else:
        op = Op.SPLIT
    return AlignedPair(ref, hyp, op)


def _try_window(
    window: list[AlignedPair], pack: LanguagePack, kmax: int
) -> list[AlignedPair] | None:
    """Rewrite one window of Sub/Del/Ins pairs around an equivalent pivot."""
    if any(p.op not in _REPAIR_OPS for p in window):
        return None
    # Stability guard: never reshuffle a window that already holds an
    # equivalent 1:1 pair; repair only ever introduces equivalences.
    for p in window:
        if p.op is Op.SUBSTITUTE and _spans_equivalent(p.ref, p.hyp, pack):
            return None

    rtoks = [t for p in window for t in p.ref]
    htoks = [t for p in window for t in p.hyp]

    def rewrite(pr: int, k_r: int, ph: int, k_h: int) -> list[AlignedPair] | None:
        ref_span = tuple(rtoks[pr : pr + k_r])
        hyp_span = tuple(htoks[ph : ph + k_h])
        if max(k_r, k_h) > kmax or min(k_r, k_h) != 1:
            return None
        if k_r == 1 and k_h == 1 and any(
            p.op is Op.SUBSTITUTE and p.ref == ref_span and p.hyp == hyp_span
            for p in window
        ):
            return None  # the pair already exists; nothing to repair
        if not _spans_equivalent(ref_span, hyp_span, pack):
            return None
        count = (len(rtoks) - k_r) + (len(htoks) - k_h) + 1
        if count > len(window):
            return None
        out = [AlignedPair((t,), (), Op.DELETE) for t in rtoks[:pr]]
        out += [AlignedPair((), (t,), Op.INSERT) for t in htoks[:ph]]
        out.append(_pivot_pair(ref_span, hyp_span))
        out += [AlignedPair((t,), (), Op.DELETE) for t in rtoks[pr + k_r :]]
        out += [AlignedPair((), (t,), Op.INSERT) for t in htoks[ph + k_h :]]
        return out

    # Joins first (1 ref : k hyp, widest runs first), then splits, then 1:1.
    for k_h in range(min(kmax, len(htoks)), 1, -1):
        for pr in range(len(rtoks)):
            for ph in range(len(htoks) - k_h + 1):
                done = rewrite(pr, 1, ph, k_h)
                if done is not None:
                    return done
    for k_r in range(min(kmax, len(rtoks)), 1, -1):
        for ph in range(len(htoks)):
            for pr in range(len(rtoks) - k_r + 1):
                done = rewrite(pr, k_r, ph, 1)
                if done is not None:
                    return done
    for pr in range(len(rtoks)):
        for ph in range(len(htoks)):
            done = rewrite(pr, 1, ph, 1)
            if done is not None:
                return done
    return None


def merge_pass(a: Alignment, pack: LanguagePack, kmax: int = 3) -> Alignment:
    """Regroup adjacent pairs into compound joins/splits and equivalent pairs.

    Preserves both token sequences and never increases the pair count; the
    pre-merge distance and WER counts are carried through unchanged.
    """
    pairs = list(a.pairs)
    max_window = kmax + 1
    changed = True
    while changed:
        changed = False
        i = 0
        while i < len(pairs):
            # Adjacent delete+insert collapses into one substitution pair.
            if i + 1 < len(pairs):
                x, y = pairs[i], pairs[i + 1]
                if {x.op, y.op} == {Op.DELETE, Op.INSERT}:
                    ref = x.ref or y.ref
                    hyp = x.hyp or y.hyp
                    pairs[i : i + 2] = [_pivot_pair(ref, hyp)]
                    changed = True
                    i = max(0, i - max_window)
                    continue
            fired = False
            for size in range(2, min(max_window, len(pairs) - i) + 1):
                rewritten = _try_window(pairs[i : i + size], pack, kmax)
                if rewritten is not None:
                    pairs[i : i + size] = rewritten
                    changed = True
                    fired = True
                    break
            if fired:
                i = max(0, i - max_window)
            else:
                i += 1
    return replace(a, pairs=tuple(pairs))


@dataclass(frozen=True)
class WerResult:
    rate: float
    substitutions: int
    insertions: int
    deletions: int
    n: int
    degenerate_reference: bool = False

    @property
    def edits(self) -> int:
        return self.substitutions + self.insertions + self.deletions


def wer(ref: TokenizedSentence, hyp: TokenizedSentence) -> WerResult:
    """Word error rate from the pre-merge optimal alignment (uncapped)."""
    a = levenshtein_align(ref, hyp)
    n = ref.n
    if n == 0:
        # Conventional value for a degenerate reference: the hypothesis length.
        return WerResult(float(hyp.n), a.substitutions, a.insertions, a.deletions,
                         0, degenerate_reference=hyp.n > 0)
    return WerResult(a.distance / n, a.substitutions, a.insertions, a.deletions, n)


def _sentence_graphemes(sent: TokenizedSentence) -> list[str]:
    out: list[str] = []
    for idx, tok in enumerate(sent.tokens):
        if idx:
            out.append(" ")
        out.extend(tok.graphemes)
    return out


def cer(ref: TokenizedSentence, hyp: TokenizedSentence) -> WerResult:
    """WER over the grapheme clusters of the space-joined normalized sentence."""
    rg, hg = _sentence_graphemes(ref), _sentence_graphemes(hyp)
    dp = _suffix_dp(rg, hg)
    # Recover counts by walking the same way the word aligner does.
    i = j = 0
    subs = dels = inss = 0
    m, n = len(rg), len(hg)
    while i < m or j < n:
        cur = dp[i][j]
        if i < m and j < n and rg[i] == hg[j] and dp[i + 1][j + 1] == cur:
            i, j = i + 1, j + 1
        elif i < m and j < n and dp[i + 1][j + 1] + 1 == cur:
            subs, i, j = subs + 1, i + 1, j + 1
        elif i < m and dp[i + 1][j] + 1 == cur:
            dels, i = dels + 1, i + 1
        else:
            inss, j = inss + 1, j + 1
    if m == 0:
        return WerResult(float(n), subs, inss, dels, 0, degenerate_reference=n > 0)
    return WerResult(dp[0][0] / m, subs, inss, dels, m)


def edit_distance(a: Sequence, b: Sequence) -> int:
    """Plain unit-cost edit distance between two sequences."""
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, x in enumerate(a, start=1):
        cur = [i]
        for j, y in enumerate(b, start=1):
            cur.append(min(prev[j - 1] + (x != y), prev[j] + 1, cur[-1] + 1))
        prev = cur
    return prev[-1]


_BRUTE_FORCE_LIMIT = 8


def brute_force_distance(ref: Sequence, hyp: Sequence) -> int:
    """Test oracle: breadth-first search over the edit graph.

    Independent of the DP aligner; rejects inputs longer than 8 tokens.
    """
    r = [t.normalized if isinstance(t, Token) else t for t in ref]
    h = [t.normalized if isinstance(t, Token) else t for t in hyp]
    if len(r) > _BRUTE_FORCE_LIMIT or len(h) > _BRUTE_FORCE_LIMIT:
        raise ValueError(f"brute_force_distance is limited to {_BRUTE_FORCE_LIMIT} tokens per side")
    m, n = len(r), len(h)

    def closure(i: int, j: int) -> tuple[int, int]:
        while i < m and j < n and r[i] == h[j]:
            i, j = i + 1, j + 1
        return i, j

    frontier = {closure(0, 0)}
    seen = set(frontier)
    dist = 0
    while (m, n) not in frontier:
        nxt: set[tuple[int, int]] = set()
        for i, j in frontier:
            steps = []
            if i < m and j < n:
                steps.append((i + 1, j + 1))
            if i < m:
                steps.append((i + 1, j))
            if j < n:
                steps.append((i, j + 1))
            for s in steps:
                s = closure(*s)
                if s not in seen:
                    seen.add(s)
                    nxt.add(s)
        frontier = nxt
        dist += 1
    return dist


def alignment_record(a: Alignment, sent_id: str, n: int) -> dict:
    """Line-oriented JSON shape consumed by the rubric, annotation and export."""
    return {
        "id": sent_id,
        "pairs": [
            {
                "ref": list(p.ref_words),
                "hyp": list(p.hyp_words),
                "op": p.op.value,
                "op_hyp_to_ref": _REVERSE_OP[p.op].value,
                "k": p.k,
            }
            for p in a.pairs
        ],
        "S": a.substitutions,
        "I": a.insertions,
        "D": a.deletions,
        "N": n,
        "distance": a.distance,
    }
