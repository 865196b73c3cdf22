"""Unicode-aware tokenization, normalization and per-language resource packs.

Everything downstream (alignment, rubric classification, scoring) operates on
the token and fold-key representations produced here.  All functions are pure;
a :class:`LanguagePack` is immutable after load and safe to share across
threads.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

import regex
import yaml

__all__ = [
    "Token",
    "TokenizedSentence",
    "LanguagePack",
    "PackError",
    "normalize_token",
    "normalize_text",
    "tokenize",
    "grapheme_split",
    "fold",
    "parse_number",
    "number_value",
    "abbreviation_key",
    "abbreviation_key_span",
    "script_of",
    "load_pack",
    "available_packs",
    "default_pack_dir",
]

_GRAPHEME_RE = regex.compile(r"\X")

# Characters kept when they sit inside a word ("bumble-bee", "don't").
_INNER_PUNCT = ("-", "'")

_SCRIPT_RANGES = {
    "Devanagari": (0x0900, 0x097F),
    "Kannada": (0x0C80, 0x0CFF),
    "Malayalam": (0x0D00, 0x0D7F),
}

_LANG_SCRIPT = {
    "hi": "Devanagari",
    "mr": "Devanagari",
    "kn": "Kannada",
    "ml": "Malayalam",
    "en": "Latin",
}


class PackError(ValueError):
    """Raised when a language pack file is missing or malformed."""


def grapheme_split(text: str) -> list[str]:
    """Split ``text`` into extended grapheme clusters."""
    return _GRAPHEME_RE.findall(text)


def script_of(text: str) -> str | None:
    """Dominant script of the letters in ``text`` (None if it has no letters)."""
    counts: dict[str, int] = {}
    for ch in text:
        if not unicodedata.category(ch).startswith("L"):
            continue
        cp = ord(ch)
        for name, (lo, hi) in _SCRIPT_RANGES.items():
            if lo <= cp <= hi:
                counts[name] = counts.get(name, 0) + 1
                break
        else:
            counts["Latin"] = counts.get("Latin", 0) + 1
    if not counts:
        return None
    return max(counts, key=lambda k: (counts[k], k))


def normalize_token(word: str) -> str:
    """Normalize one whitespace-delimited word.

    NFC composition, punctuation stripped (intra-word hyphens and apostrophes
    survive), zero-width/format characters dropped, Latin lowercased.  May
    return an empty string for punctuation-only input.
    """
    w = unicodedata.normalize("NFC", word).replace("’", "'")
    kept: list[str] = []
    for ch in w:
        cat = unicodedata.category(ch)
        if cat.startswith("P") and ch not in _INNER_PUNCT:
            continue
        if cat == "Cf":  # ZWJ/ZWNJ and friends
            continue
        if cat.startswith("Z"):
            continue
        kept.append(ch)
    return "".join(kept).strip("".join(_INNER_PUNCT)).lower()


def normalize_text(raw: str) -> str:
    """Normalize a whole string; whitespace collapses to single spaces."""
    return " ".join(t for t in (normalize_token(w) for w in raw.split()) if t)


@dataclass(frozen=True)
class Token:
    """One normalized word with its grapheme-cluster decomposition."""

    surface: str
    normalized: str
    graphemes: tuple[str, ...]
    index: int

    def __post_init__(self) -> None:
        if not self.normalized:
            raise ValueError("token normalized form must be non-empty")
        if "".join(self.graphemes) != self.normalized:
            raise ValueError("graphemes must concatenate to the normalized form")


@dataclass(frozen=True)
class TokenizedSentence:
    id: str
    lang: str
    tokens: tuple[Token, ...]
    raw: str

    @property
    def n(self) -> int:
        """Reference word count used as the score denominator."""
        return len(self.tokens)

    @property
    def words(self) -> tuple[str, ...]:
        return tuple(t.normalized for t in self.tokens)


@dataclass
class _FoldRule:
    pattern: str
    repl: str
    compiled: regex.Pattern = field(repr=False, compare=False, default=None)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        if self.compiled is None:
            self.compiled = regex.compile(self.pattern)


def _symmetric(pairs: Iterable[Sequence[str]]) -> frozenset[tuple[str, str]]:
    out: set[tuple[str, str]] = set()
    for a, b in pairs:
        out.add((a, b))
        out.add((b, a))
    return frozenset(out)


@dataclass
class LanguagePack:
    """Per-language matching resources.

    ``fold_rules`` are ordered regex rewrites applied to normalized strings
    until a fixpoint; for Indic scripts they include a romanizing character
    map so fold keys are always Latin and cross-script variants can compare.
    """

    lang: str
    version: int = 1
    numeral_lexicon: dict[str, dict] = field(default_factory=dict)
    letter_names: dict[str, str] = field(default_factory=dict)
    fold_rules: tuple[_FoldRule, ...] = ()
    minor_suffix_pairs: frozenset[tuple[str, str]] = frozenset()
    colloquial_pairs: frozenset[tuple[str, str]] = frozenset()
    similar_sound_graphemes: frozenset[tuple[str, str]] = frozenset()
    _fold_cache: dict[str, str] = field(default_factory=dict, repr=False, compare=False)

    @property
    def native_script(self) -> str:
        return _LANG_SCRIPT.get(self.lang, "Latin")

    def is_colloquial_pair(self, a: str, b: str) -> bool:
        if (a, b) in self.colloquial_pairs:
            return True
        return (fold(a, self), fold(b, self)) in self.colloquial_pairs

    def is_similar_sound(self, a: str, b: str) -> bool:
        return (a, b) in self.similar_sound_graphemes

    def is_minor_suffix_pair(self, a: str, b: str) -> bool:
        return (a, b) in self.minor_suffix_pairs


_MAX_FOLD_PASSES = 16


def fold(token: Token | str, pack: LanguagePack) -> str:
    """Canonical fold key of a token; pack-equivalent spellings share a key."""
    s = token.normalized if isinstance(token, Token) else token
    cached = pack._fold_cache.get(s)
    if cached is not None:
        return cached
    cur = s
    for _ in range(_MAX_FOLD_PASSES):
        nxt = cur
        for rule in pack.fold_rules:
            nxt = rule.compiled.sub(rule.repl, nxt)
        if nxt == cur:
            break
        cur = nxt
    pack._fold_cache[s] = cur
    return cur


def _as_word(tok: Token | str) -> str:
    return tok.normalized if isinstance(tok, Token) else tok


def parse_number(tokens: Sequence[Token | str], pack: LanguagePack) -> tuple[int, int] | None:
    """Greedy parse of a digit string or numeral-word sequence from position 0.

    Returns ``(value, consumed_token_count)`` or None when the first token
    does not start a number.  Uses the additive/multiplicative grammar common
    to the supported numeral lexicons ("terah sau" = 13 * 100).
    """
    total = 0
    cur: int | None = None
    consumed = 0
    for tok in tokens:
        word = _as_word(tok)
        if word.isdigit():
            if cur is not None:
                break
            cur = int(word)
            consumed += 1
            continue
        entry = pack.numeral_lexicon.get(word)
        if entry is None:
            break
        if "multiplier" in entry:
            cur = (cur if cur is not None else 1) * int(entry["multiplier"])
            total += cur
            cur = None
        else:
            if cur is not None:
                break
            cur = int(entry["value"])
        consumed += 1
    if consumed == 0:
        return None
    return total + (cur or 0), consumed


def number_value(tokens: Sequence[Token | str], pack: LanguagePack) -> int | None:
    """Value of a full token span iff it parses as one number, else None."""
    parsed = parse_number(tokens, pack)
    if parsed is None:
        return None
    value, consumed = parsed
    if consumed != len(tokens):
        return None
    return value


_DOTTED_ACRONYM_RE = regex.compile(r"^(?:[A-Za-z]\.)+[A-Za-z]?\.?$")
_CAPS_ACRONYM_RE = regex.compile(r"^[A-Z]{2,}$")


def _letter_name_key(word: str, pack: LanguagePack) -> str | None:
    """Greedy decomposition of ``word`` into spelled-out letter names."""
    if not pack.letter_names:
        return None
    names = sorted(pack.letter_names, key=len, reverse=True)
    out: list[str] = []
    i = 0
    while i < len(word):
        for name in names:
            if word.startswith(name, i):
                out.append(pack.letter_names[name])
                i += len(name)
                break
        else:
            return None
    if len(out) < 2:
        return None
    return "".join(out)


def abbreviation_key(token: Token | str, pack: LanguagePack) -> str | None:
    """Latin letter string for acronyms and spelled-out letter sequences."""
    surface = token.surface if isinstance(token, Token) else token
    word = _as_word(token)
    compact = surface.replace("-", "")
    if _DOTTED_ACRONYM_RE.match(compact) or _CAPS_ACRONYM_RE.match(compact):
        letters = "".join(ch for ch in compact if ch.isalpha()).lower()
        if len(letters) >= 2:
            return letters
    return _letter_name_key(word, pack)


def abbreviation_key_span(tokens: Sequence[Token | str], pack: LanguagePack) -> str | None:
    """Abbreviation key of a (possibly multi-token) span."""
    if len(tokens) == 1:
        return abbreviation_key(tokens[0], pack)
    if not tokens:
        return None
    joined_surface = "".join(t.surface if isinstance(t, Token) else t for t in tokens)
    joined_norm = "".join(_as_word(t) for t in tokens)
    if _DOTTED_ACRONYM_RE.match(joined_surface) or _CAPS_ACRONYM_RE.match(joined_surface):
        letters = "".join(ch for ch in joined_surface if ch.isalpha()).lower()
        if len(letters) >= 2:
            return letters
    return _letter_name_key(joined_norm, pack)


def tokenize(raw: str, pack: LanguagePack | str, sent_id: str = "") -> TokenizedSentence:
    """Whitespace tokenization of the normalized text, with graphemes."""
    lang = pack.lang if isinstance(pack, LanguagePack) else pack
    tokens: list[Token] = []
    for word in unicodedata.normalize("NFC", raw).split():
        norm = normalize_token(word)
        if not norm:
            continue
        tokens.append(
            Token(
                surface=word,
                normalized=norm,
                graphemes=tuple(grapheme_split(norm)),
                index=len(tokens),
            )
        )
    return TokenizedSentence(id=sent_id, lang=lang, tokens=tuple(tokens), raw=raw)


_PACK_SECTIONS = (
    "numeral_lexicon",
    "letter_names",
    "fold_rules",
    "minor_suffix_pairs",
    "colloquial_pairs",
    "similar_sound_graphemes",
)


def default_pack_dir() -> Path:
    return Path(str(resources.files("laser_eval").joinpath("packs")))


def available_packs(pack_dir: Path | str | None = None) -> list[str]:
    root = Path(pack_dir) if pack_dir else default_pack_dir()
    return sorted(p.stem for p in root.glob("*.yaml"))


def load_pack(lang: str, pack_dir: Path | str | None = None) -> LanguagePack:
    """Load the pack for ``lang`` from ``pack_dir`` (default: shipped packs)."""
    root = Path(pack_dir) if pack_dir else default_pack_dir()
    path = root / f"{lang}.yaml"
    if not path.is_file():
        raise PackError(f"no language pack for {lang!r} in {root}")
    with open(path, encoding="utf-8") as fh:
        doc = yaml.safe_load(fh) or {}
    if doc.get("lang") != lang:
        raise PackError(f"{path}: pack lang {doc.get('lang')!r} does not match file name")
    unknown = set(doc) - set(_PACK_SECTIONS) - {"lang", "version"}
    if unknown:
        raise PackError(f"{path}: unknown sections {sorted(unknown)}")

    numerals: dict[str, dict] = {}
    for word, spec in (doc.get("numeral_lexicon") or {}).items():
        if isinstance(spec, dict):
            if set(spec) - {"value", "multiplier"}:
                raise PackError(f"{path}: bad numeral entry {word!r}")
            numerals[str(word)] = spec
        else:
            numerals[str(word)] = {"value": int(spec)}

    rules = []
    for i, entry in enumerate(doc.get("fold_rules") or []):
        try:
            rules.append(_FoldRule(pattern=entry["pattern"], repl=entry.get("repl", "")))
        except (KeyError, regex.error, TypeError) as exc:
            raise PackError(f"{path}: fold rule #{i} invalid: {exc}") from exc

    def pairs(section: str) -> frozenset[tuple[str, str]]:
        rows = doc.get(section) or []
        for row in rows:
            if not isinstance(row, (list, tuple)) or len(row) != 2:
                raise PackError(f"{path}: {section} entries must be 2-item lists")
        return _symmetric((str(a), str(b)) for a, b in rows)

    return LanguagePack(
        lang=lang,
        version=int(doc.get("version", 1)),
        numeral_lexicon=numerals,
        letter_names={str(k): str(v) for k, v in (doc.get("letter_names") or {}).items()},
        fold_rules=tuple(rules),
        minor_suffix_pairs=pairs("minor_suffix_pairs"),
        colloquial_pairs=pairs("colloquial_pairs"),
        similar_sound_graphemes=pairs("similar_sound_graphemes"),
    )
