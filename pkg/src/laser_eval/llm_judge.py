"""LLM-judge backend: prompt rendering, response parsing, validation, caching.

The judge speaks a vendor-neutral chat-completion protocol: a single user
message POSTed as ``{model, messages, temperature}``, the reply read from
``choices[0].message.content``.  Every request/response is cached under a
content hash of (model, prompt), so warm-cache reruns make zero network
calls and are byte-deterministic.  The judge's own word-pair lists are
trusted for scoring; the local alignment is only consulted for the
hallucination warning and WER.
"""

from __future__ import annotations

import hashlib
import json
import os
import re
import tempfile
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path
from typing import Callable, Sequence

import httpx

from .align import levenshtein_align, merge_pass, wer
from .rubric import (
    ClassifiedPair,
    LEVEL_CATEGORIES,
    PenaltyClass,
    PenaltyLevel,
    PenaltyWeights,
    SentenceEvaluation,
    score_sentence,
)
from .textnorm import LanguagePack, tokenize

__all__ = [
    "PromptTemplate",
    "load_template",
    "build_prompt",
    "JudgmentItem",
    "LlmJudgment",
    "JudgmentValidation",
    "parse_response",
    "validate_judgment",
    "JudgeConfig",
    "ResponseCache",
    "JudgeClient",
    "judge_corpus",
    "judgment_to_evaluation",
    "JudgeError",
    "MalformedResponse",
    "CountMismatch",
    "SchemaError",
    "TransportError",
]


class JudgeError(RuntimeError):
    def __init__(self, message: str, raw: str = ""):
        super().__init__(message)
        self.raw = raw


class MalformedResponse(JudgeError):
    """No parseable JSON object in the response."""


class CountMismatch(JudgeError):
    """Wrong number of judgments for the batch."""


class SchemaError(JudgeError):
    """A judgment is missing a required field."""


class TransportError(JudgeError):
    """Endpoint unreachable or persistently failing."""


@dataclass(frozen=True)
class PromptTemplate:
    instructions: str
    example_block: str
    response_structure: str
    example_language: str

    def render(self) -> str:
        return "\n\n".join(
            part.strip("\n")
            for part in (self.instructions, self.example_block, self.response_structure)
        )


def _read_template_file(name: str, template_dir: Path | str | None) -> str:
    if template_dir is not None:
        return (Path(template_dir) / name).read_text(encoding="utf-8")
    return resources.files("laser_eval").joinpath(f"templates/{name}").read_text("utf-8")


def load_template(
    example_language: str = "hi", template_dir: Path | str | None = None
) -> PromptTemplate:
    """Instructions and response structure are shared; the example block swaps."""
    return PromptTemplate(
        instructions=_read_template_file("instructions.txt", template_dir),
        example_block=_read_template_file(f"example_{example_language}.txt", template_dir),
        response_structure=_read_template_file("response_structure.txt", template_dir),
        example_language=example_language,
    )


def build_prompt(
    batch: Sequence[tuple[str, str]], template: PromptTemplate
) -> str:
    """Render the judge prompt for a batch of (predicted, original) pairs."""
    if not batch:
        raise ValueError("batch must be non-empty")
    lines = [template.render(), "", "SENTENCE PAIRS:"]
    for i, (predicted, original) in enumerate(batch, start=1):
        lines.append(f"{i}. Sentence 1 - predicted: {predicted}")
        lines.append(f"   Sentence 2 - original: {original}")
    lines.append(
        "Return ONLY the output I asked for in a single json "
        "(number each sentence pair) and not details."
    )
    return "\n".join(lines)


@dataclass(frozen=True)
class JudgmentItem:
    ref_word: str
    hyp_word: str
    reason: str


@dataclass(frozen=True)
class LlmJudgment:
    pair_id: int
    token_count: int
    non_penalizable: tuple[JudgmentItem, ...]
    major: tuple[JudgmentItem, ...]
    minor: tuple[JudgmentItem, ...]
    total_penalty: float
    score: float


@dataclass(frozen=True)
class JudgmentValidation:
    recomputed_penalty: float
    recomputed_score: float
    consistent: bool


_SCORE_TOLERANCE = 5e-4

_FIELD_ALIASES = {
    "token_count": ("token_count", "tokens", "word_count", "number_of_tokens", "total_tokens"),
    "non_penalizable": ("non_penalizable", "no_penalty", "nonpenalizable", "non_pen"),
    "major": ("major", "major_errors", "major_penalizable"),
    "minor": ("minor", "minor_errors", "minor_penalizable"),
    "total_penalty": ("total_penalty", "penalty", "total"),
    "score": ("score", "final_score", "similarity_score"),
}

_ITEM_RE = re.compile(r"^(?P<a>.*?)\s+vs\.?\s+(?P<b>.*?)(?:\s*[(:](?P<why>.*?)\)?)?$")


def _parse_item(entry: object) -> JudgmentItem:
    if isinstance(entry, dict):
        ref = entry.get("ref") or entry.get("ref_word") or entry.get("original") or ""
        hyp = entry.get("hyp") or entry.get("hyp_word") or entry.get("predicted") or ""
        return JudgmentItem(str(ref), str(hyp), str(entry.get("reason", "")))
    text = str(entry).strip()
    m = _ITEM_RE.match(text)
    if m:
        return JudgmentItem(m.group("a").strip(), m.group("b").strip(), (m.group("why") or "").strip())
    return JudgmentItem("", "", text)


def _lookup(doc: dict, field_name: str, raw: str):
    for alias in _FIELD_ALIASES[field_name]:
        if alias in doc:
            return doc[alias]
    raise SchemaError(f"judgment missing field {field_name!r}", raw=raw)


def _extract_json(text: str) -> object:
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        pass
    fenced = re.search(r"```(?:json)?\s*(.*?)```", text, flags=re.S)
    if fenced:
        try:
            return json.loads(fenced.group(1))
        except json.JSONDecodeError:
            pass
    start = text.find("{")
    while start != -1:  # first balanced object after any leading prose
        depth = 0
        for end in range(start, len(text)):
            if text[end] == "{":
                depth += 1
            elif text[end] == "}":
                depth -= 1
                if depth == 0:
                    try:
                        return json.loads(text[start : end + 1])
                    except json.JSONDecodeError:
                        break
        start = text.find("{", start + 1)
    raise MalformedResponse("no parseable JSON object in response", raw=text)


def parse_response(text: str, expected_count: int) -> list[LlmJudgment]:
    """Extract judgments, tolerating code fences and leading prose."""
    doc = _extract_json(text)
    entries: dict[int, dict] = {}
    if isinstance(doc, dict):
        for key, value in doc.items():
            m = re.search(r"\d+", str(key))
            if m and isinstance(value, dict):
                entries[int(m.group())] = value
        if not entries and expected_count == 1 and doc:
            entries[1] = doc  # single unnumbered judgment object
    elif isinstance(doc, list):
        entries = {i: v for i, v in enumerate(doc, start=1) if isinstance(v, dict)}
    if len(entries) != expected_count or set(entries) != set(range(1, expected_count + 1)):
        raise CountMismatch(
            f"expected {expected_count} judgments, found {sorted(entries)}", raw=text
        )

    out = []
    for pair_id in range(1, expected_count + 1):
        j = entries[pair_id]
        try:
            token_count = int(_lookup(j, "token_count", text))
            non_pen = tuple(_parse_item(e) for e in _lookup(j, "non_penalizable", text))
            major = tuple(_parse_item(e) for e in _lookup(j, "major", text))
            minor = tuple(_parse_item(e) for e in _lookup(j, "minor", text))
            total_penalty = float(_lookup(j, "total_penalty", text))
            score = float(_lookup(j, "score", text))
        except (TypeError, ValueError) as exc:
            raise SchemaError(f"judgment {pair_id}: {exc}", raw=text) from exc
        out.append(
            LlmJudgment(
                pair_id=pair_id,
                token_count=token_count,
                non_penalizable=non_pen,
                major=major,
                minor=minor,
                total_penalty=total_penalty,
                score=score,
            )
        )
    return out


def validate_judgment(
    j: LlmJudgment, weights: PenaltyWeights = PenaltyWeights()
) -> JudgmentValidation:
    """Recompute the score from the judgment's own lists and flag mismatches.

    An inconsistent judgment is downgraded, never discarded: callers use the
    recomputed score and record the flag.
    """
    if j.token_count < 1:
        raise ValueError(f"judgment {j.pair_id}: degenerate token count {j.token_count}")
    penalty = weights.major * len(j.major) + weights.minor * len(j.minor)
    recomputed = 1.0 - penalty / j.token_count
    return JudgmentValidation(
        recomputed_penalty=penalty,
        recomputed_score=recomputed,
        consistent=abs(recomputed - j.score) <= _SCORE_TOLERANCE,
    )


@dataclass(frozen=True)
class JudgeConfig:
    endpoint: str
    model: str
    batch_size: int = 10
    max_retries: int = 3
    timeout: float = 60.0
    temperature: float = 0.0
    cache_dir: str | None = None
    api_key_env: str = "LASER_EVAL_API_KEY"

    def __post_init__(self) -> None:
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")


class ResponseCache:
    """Content-addressed store of raw responses; writes are atomic."""

    def __init__(self, directory: str | Path):
        self.dir = Path(directory)
        self.dir.mkdir(parents=True, exist_ok=True)

    @staticmethod
    def key(model: str, prompt: str) -> str:
        return hashlib.sha256(f"{model}\x00{prompt}".encode()).hexdigest()

    def _path(self, key: str) -> Path:
        return self.dir / f"{key}.json"

    def get(self, key: str) -> str | None:
        path = self._path(key)
        if not path.is_file():
            return None
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)["response"]

    def put(self, key: str, request: dict, response: str) -> None:
        entry = {
            "key": key,
            "request": request,
            "response": response,
            "timestamp": datetime.now(timezone.utc).isoformat(),
        }
        fd, tmp = tempfile.mkstemp(dir=self.dir, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                json.dump(entry, fh, ensure_ascii=False)
            os.replace(tmp, self._path(key))
        finally:
            if os.path.exists(tmp):
                os.unlink(tmp)


class JudgeClient:
    """Thin chat-completion client; the transport is injectable for tests."""

    def __init__(self, config: JudgeConfig, transport: httpx.BaseTransport | None = None):
        self.config = config
        headers = {}
        api_key = os.environ.get(config.api_key_env)
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        self._client = httpx.Client(
            timeout=config.timeout, transport=transport, headers=headers
        )
        self.requests_made = 0

    def request_body(self, prompt: str) -> dict:
        return {
            "model": self.config.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": self.config.temperature,
        }

    def complete(self, prompt: str) -> str:
        self.requests_made += 1
        resp = self._client.post(self.config.endpoint, json=self.request_body(prompt))
        resp.raise_for_status()
        return resp.json()["choices"][0]["message"]["content"]

    def close(self) -> None:
        self._client.close()


_CATEGORY_HINTS = (
    ("number", "numerical"),
    ("numer", "numerical"),
    ("abbrev", "abbreviation"),
    ("compound", "compound"),
    ("translit", "transliteration-native"),
    ("colloquial", "colloquial"),
    ("slang", "colloquial"),
    ("proper", "proper-noun"),
    ("name", "proper-noun"),
    ("regional", "alternate-spelling"),
    ("alternate", "alternate-spelling"),
    ("grammar", "small-grammar"),
    ("grammat", "small-grammar"),
    ("singular", "small-grammar"),
    ("plural", "small-grammar"),
    ("gender", "small-grammar"),
    ("tense", "small-grammar"),
    ("spell", "small-spelling"),
    ("substitut", "substitution"),
    ("omission", "omission-addition"),
    ("omit", "omission-addition"),
    ("addition", "omission-addition"),
    ("added", "omission-addition"),
    ("reorder", "reordering"),
)


def _category_for(reason: str, level: PenaltyLevel) -> str:
    low = reason.lower()
    for needle, category in _CATEGORY_HINTS:
        if needle in low and category in LEVEL_CATEGORIES[level]:
            return category
    if level is PenaltyLevel.MAJOR and "spell" in low:
        return "meaning-altering-spelling"
    return "other"


def judgment_to_evaluation(
    judgment: LlmJudgment,
    record,
    pack: LanguagePack,
    classifier_id: str,
    weights: PenaltyWeights = PenaltyWeights(),
) -> SentenceEvaluation:
    """Convert a validated judgment into the common evaluation shape.

    The stored score is always the one recomputed from the judgment's lists
    (exact under the weights); the judge's reported score is kept in flags.
    """
    validation = validate_judgment(judgment, weights)
    classes: list[ClassifiedPair] = []
    for level, items in (
        (PenaltyLevel.NON_PENALIZABLE, judgment.non_penalizable),
        (PenaltyLevel.MAJOR, judgment.major),
        (PenaltyLevel.MINOR, judgment.minor),
    ):
        for item in items:
            op = "substitute"
            if not item.ref_word and item.hyp_word:
                op = "insert"
            elif item.ref_word and not item.hyp_word:
                op = "delete"
            classes.append(
                ClassifiedPair(
                    ref_words=(item.ref_word,) if item.ref_word else (),
                    hyp_words=(item.hyp_word,) if item.hyp_word else (),
                    op=op,
                    level=level,
                    category=_category_for(item.reason, level),
                    rationale=item.reason,
                )
            )
    breakdown = score_sentence(judgment.token_count, [PenaltyLevel(c.level) for c in classes], weights)

    ref = tokenize(record.ref_text, pack, record.id)
    hyp = tokenize(record.hyp_text, pack, record.id)
    w = wer(ref, hyp)
    merged = merge_pass(levenshtein_align(ref, hyp), pack)
    mismatched = sum(1 for p in merged.pairs if p.is_mismatch)
    listed = len(judgment.non_penalizable) + len(judgment.major) + len(judgment.minor)

    flags = {
        "reported_score": judgment.score,
        "reported_total_penalty": judgment.total_penalty,
        "recomputed_score": validation.recomputed_score,
        "consistent": validation.consistent,
        "judge_token_count": judgment.token_count,
        "local_ref_token_count": ref.n,
    }
    if listed > mismatched:
        flags["hallucinated_pairs"] = {"listed": listed, "aligned_mismatches": mismatched}

    return SentenceEvaluation(
        id=record.id,
        lang=pack.lang,
        ref_text=record.ref_text,
        hyp_text=record.hyp_text,
        n_ref=judgment.token_count,
        classified_pairs=classes,
        total_penalty=breakdown.total_penalty,
        laser_raw=breakdown.laser_raw,
        laser=breakdown.laser,
        wer=w.rate,
        wer_counts={"S": w.substitutions, "I": w.insertions, "D": w.deletions, "N": w.n},
        classifier_id=classifier_id,
        weights=weights,
        flags=flags,
    )


def _chunks(seq: Sequence, size: int):
    for i in range(0, len(seq), size):
        yield seq[i : i + size]


def judge_corpus(
    records: Sequence,
    template: PromptTemplate,
    config: JudgeConfig,
    pack: LanguagePack,
    weights: PenaltyWeights = PenaltyWeights(),
    transport: httpx.BaseTransport | None = None,
    sleep: Callable[[float], None] = time.sleep,
) -> tuple[list[SentenceEvaluation], dict]:
    """Judge a corpus in batches with caching, retries and per-pair isolation."""
    cache = ResponseCache(config.cache_dir) if config.cache_dir else None
    client = JudgeClient(config, transport=transport)
    evals: list[SentenceEvaluation] = []
    failed: list[dict] = []
    inconsistent: list[str] = []
    conservation: list[str] = []
    cache_hits = cache_misses = 0

    try:
        for batch in _chunks(list(records), config.batch_size):
            prompt = build_prompt([(r.hyp_text, r.ref_text) for r in batch], template)
            key = ResponseCache.key(config.model, prompt)
            judgments: list[LlmJudgment] | None = None
            failure: JudgeError | None = None

            cached = cache.get(key) if cache else None
            if cached is not None:
                cache_hits += 1
                try:
                    judgments = parse_response(cached, len(batch))
                except JudgeError as exc:
                    failure = exc  # cached failures replay identically
            else:
                cache_misses += 1
                text: str | None = None
                for attempt in range(config.max_retries + 1):
                    try:
                        text = client.complete(prompt)
                        judgments = parse_response(text, len(batch))
                        break
                    except (httpx.HTTPError, KeyError, json.JSONDecodeError) as exc:
                        failure = TransportError(f"request failed: {exc}")
                    except JudgeError as exc:
                        failure = exc
                    if attempt < config.max_retries:
                        sleep(min(2.0, 0.1 * (attempt + 1)))
                if judgments is not None:
                    failure = None
                if cache and text is not None and judgments is not None:
                    cache.put(key, client.request_body(prompt), text)

            if judgments is None:
                failed.append(
                    {
                        "pair_ids": [r.id for r in batch],
                        "error": type(failure).__name__ if failure else "Unknown",
                        "detail": str(failure) if failure else "",
                    }
                )
                continue

            for record, judgment in zip(batch, judgments):
                try:
                    ev = judgment_to_evaluation(
                        judgment, record, pack, config.model, weights
                    )
                except ValueError as exc:
                    failed.append(
                        {"pair_ids": [record.id], "error": "DegenerateJudgment", "detail": str(exc)}
                    )
                    continue
                if not ev.flags.get("consistent", True):
                    inconsistent.append(record.id)
                if "hallucinated_pairs" in ev.flags:
                    conservation.append(record.id)
                evals.append(ev)
    finally:
        client.close()

    report = {
        "model": config.model,
        "endpoint": config.endpoint,
        "batch_size": config.batch_size,
        "temperature": config.temperature,
        "full_prompt_resent_per_batch": True,
        "total_records": len(records),
        "succeeded": len(evals),
        "failed": failed,
        "inconsistent_ids": inconsistent,
        "conservation_warning_ids": conservation,
        "cache_hits": cache_hits,
        "cache_misses": cache_misses,
        "requests_made": client.requests_made,
    }
    return evals, report
