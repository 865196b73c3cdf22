from __future__ import annotations

import json
from dataclasses import dataclass

import httpx
import pytest

from laser_eval.llm_judge import (
    CountMismatch,
    JudgeConfig,
    MalformedResponse,
    ResponseCache,
    SchemaError,
    build_prompt,
    judge_corpus,
    load_template,
    parse_response,
    validate_judgment,
)
from laser_eval.rubric import dump_evaluations

from conftest import HI_HYP, HI_REF


@dataclass
class Rec:
    id: str
    lang: str
    ref_text: str
    hyp_text: str


WORKED_JUDGMENT = {
    "token_count": 12,
    "non_penalizable": [
        {"ref": "vo", "hyp": "vaha", "reason": "colloquial variation"},
        {"ref": "bhajansangraha", "hyp": "bhajan sangraha", "reason": "compound word"},
        {"ref": "paas walaa", "hyp": "paaswala", "reason": "compound word"},
        {"ref": "A.T.M.", "hyp": "aytiem", "reason": "abbreviation"},
        {"ref": "das", "hyp": "10", "reason": "numerical"},
        {"ref": "times", "hyp": "taims", "reason": "transliteration"},
        {"ref": "skool", "hyp": "skul", "reason": "transliteration"},
    ],
    "major": [
        {"ref": "ke", "hyp": "komal", "reason": "wrong substitution"},
        {"ref": "", "hyp": "par", "reason": "addition of word"},
    ],
    "minor": [{"ref": "hai", "hyp": "hain", "reason": "singular plural grammar"}],
    "total_penalty": 2.5,
    "score": 0.7917,
}

WORKED_RESPONSE = json.dumps({"1": WORKED_JUDGMENT})

WORKED_RECORD = Rec("a1", "hi", HI_REF, HI_HYP)


def canned_transport(payload: str, counter: dict | None = None) -> httpx.MockTransport:
    def handler(request: httpx.Request) -> httpx.Response:
        if counter is not None:
            counter["calls"] = counter.get("calls", 0) + 1
            counter.setdefault("bodies", []).append(json.loads(request.content))
        return httpx.Response(
            200, json={"choices": [{"message": {"content": payload}}]}
        )

    return httpx.MockTransport(handler)


def test_template_sections_present():
    tpl = load_template("hi")
    rendered = tpl.render()
    for section in (
        "A) Define Non-Penalizable Errors",
        "B) Define Minor Penalizable Errors",
        "C) Define Major Penalizable Errors",
        "D) Matching Strategy",
        "E) Scoring",
    ):
        assert section in rendered
    assert (
        "Number of tokens in original sentence; list of tokens with non-penalizable "
        "errors; list of tokens with major penalizable errors; list of tokens with "
        "minor penalizable errors; total penalty; score." in rendered
    )
    assert "bhajansangraha" in rendered


def test_marathi_template_swaps_examples_only():
    hi, mr = load_template("hi"), load_template("mr")
    assert hi.instructions == mr.instructions
    assert hi.response_structure == mr.response_structure
    assert hi.example_block != mr.example_block
    assert "panipuri" in mr.example_block


def test_build_prompt_numbering_and_stability():
    tpl = load_template("hi")
    prompt = build_prompt([("p one", "o one"), ("p two", "o two")], tpl)
    assert "1. Sentence 1 - predicted: p one" in prompt
    assert "2. Sentence 1 - predicted: p two" in prompt
    assert prompt.endswith("(number each sentence pair) and not details.")
    assert prompt == build_prompt([("p one", "o one"), ("p two", "o two")], tpl)
    with pytest.raises(ValueError):
        build_prompt([], tpl)


def test_parse_worked_response():
    (j,) = parse_response(WORKED_RESPONSE, 1)
    assert j.token_count == 12
    assert len(j.non_penalizable) == 7 and len(j.major) == 2 and len(j.minor) == 1
    assert j.total_penalty == 2.5 and j.score == 0.7917


def test_parse_tolerates_fences_and_prose():
    wrapped = "Here is the scoring you asked for:\n```json\n" + WORKED_RESPONSE + "\n```\nDone."
    (j,) = parse_response(wrapped, 1)
    assert j.score == 0.7917


def test_parse_string_items():
    doc = {"1": {**WORKED_JUDGMENT, "minor": ["hai vs hain (grammar)"]}}
    (j,) = parse_response(json.dumps(doc), 1)
    assert j.minor[0].ref_word == "hai" and j.minor[0].hyp_word == "hain"


def test_parse_errors():
    with pytest.raises(MalformedResponse):
        parse_response("", 1)
    with pytest.raises(MalformedResponse):
        parse_response("no json at all", 1)
    with pytest.raises(CountMismatch):
        parse_response(json.dumps({"1": WORKED_JUDGMENT, "2": WORKED_JUDGMENT}), 3)
    with pytest.raises(SchemaError):
        parse_response(json.dumps({"1": {"token_count": 4}}), 1)
    try:
        parse_response("garbage", 2)
    except MalformedResponse as exc:
        assert exc.raw == "garbage"


def test_validation():
    (j,) = parse_response(WORKED_RESPONSE, 1)
    v = validate_judgment(j)
    assert v.consistent and v.recomputed_penalty == 2.5
    assert v.recomputed_score == pytest.approx(1 - 2.5 / 12)

    (bad,) = parse_response(json.dumps({"1": {**WORKED_JUDGMENT, "score": 0.5}}), 1)
    vb = validate_judgment(bad)
    assert not vb.consistent and vb.recomputed_score == pytest.approx(1 - 2.5 / 12)

    (clean,) = parse_response(
        json.dumps({"1": {"token_count": 10, "non_penalizable": [], "major": [],
                           "minor": [], "total_penalty": 0, "score": 1.0}}), 1
    )
    assert validate_judgment(clean).consistent

    (degenerate,) = parse_response(
        json.dumps({"1": {**WORKED_JUDGMENT, "token_count": 0}}), 1
    )
    with pytest.raises(ValueError):
        validate_judgment(degenerate)


def test_judge_corpus_end_to_end(tmp_path, hi_pack):
    counter: dict = {}
    config = JudgeConfig(
        endpoint="http://judge.test/v1/chat/completions",
        model="mock-judge",
        cache_dir=str(tmp_path / "cache"),
    )
    evals, report = judge_corpus(
        [WORKED_RECORD], load_template("hi"), config, hi_pack,
        transport=canned_transport(WORKED_RESPONSE, counter),
    )
    assert len(evals) == 1
    ev = evals[0]
    assert abs(ev.laser - 0.7917) < 5e-4
    assert ev.classifier_id == "mock-judge"
    assert ev.flags["consistent"] is True
    assert abs(ev.wer - 11 / 12) < 1e-9
    assert counter["calls"] == 1
    body = counter["bodies"][0]
    assert body["model"] == "mock-judge" and body["temperature"] == 0.0
    assert body["messages"][0]["role"] == "user"


def test_cache_determinism_and_zero_calls(tmp_path, hi_pack):
    counter: dict = {}
    config = JudgeConfig(
        endpoint="http://judge.test/v1",
        model="mock-judge",
        cache_dir=str(tmp_path / "cache"),
    )
    run1, rep1 = judge_corpus(
        [WORKED_RECORD], load_template("hi"), config, hi_pack,
        transport=canned_transport(WORKED_RESPONSE, counter),
    )
    run2, rep2 = judge_corpus(
        [WORKED_RECORD], load_template("hi"), config, hi_pack,
        transport=canned_transport(WORKED_RESPONSE, counter),
    )
    assert counter["calls"] == 1  # second run fully cache-served
    assert rep2["cache_hits"] == 1 and rep2["requests_made"] == 0
    assert dump_evaluations(run1) == dump_evaluations(run2)


def test_inconsistent_judgment_downgraded(tmp_path, hi_pack):
    bad = json.dumps({"1": {**WORKED_JUDGMENT, "score": 0.5}})
    config = JudgeConfig(endpoint="http://judge.test/v1", model="mock-judge",
                         cache_dir=str(tmp_path / "cache"))
    evals, report = judge_corpus(
        [WORKED_RECORD], load_template("hi"), config, hi_pack,
        transport=canned_transport(bad),
    )
    ev = evals[0]
    assert ev.flags["consistent"] is False
    assert ev.flags["reported_score"] == 0.5
    assert abs(ev.laser - 0.7917) < 5e-4  # recomputed score wins
    assert report["inconsistent_ids"] == ["a1"]


def test_malformed_batch_isolated(tmp_path, hi_pack):
    records = [
        Rec("s1", "hi", "ek do teen", "ek do char"),
        Rec("s2", "hi", "ek do panch", "ek do char"),
        Rec("s3", "hi", "ek do sat", "ek do char"),
    ]
    single = {
        "token_count": 3,
        "non_penalizable": [],
        "major": [{"ref": "teen", "hyp": "char", "reason": "substitution"}],
        "minor": [],
        "total_penalty": 1.0,
        "score": 0.6667,
    }

    def handler(request: httpx.Request) -> httpx.Response:
        prompt = json.loads(request.content)["messages"][0]["content"]
        # batch_size=1: the batch holding s2 answers with unparseable text
        if "original: ek do panch" in prompt:
            return httpx.Response(200, json={"choices": [{"message": {"content": "not json"}}]})
        return httpx.Response(200, json={"choices": [{"message": {"content": json.dumps({"1": single})}}]})

    config = JudgeConfig(endpoint="http://judge.test/v1", model="mock-judge",
                         batch_size=1, max_retries=0,
                         cache_dir=str(tmp_path / "cache"))
    evals, report = judge_corpus(records, load_template("hi"), config, hi_pack,
                                 transport=httpx.MockTransport(handler),
                                 sleep=lambda _t: None)
    assert len(evals) == 2
    assert report["failed"] and report["failed"][0]["pair_ids"] == ["s2"]
    assert {e.id for e in evals} == {"s1", "s3"}


def test_transport_failure_after_retries(tmp_path, hi_pack):
    attempts = {"n": 0}

    def handler(request: httpx.Request) -> httpx.Response:
        attempts["n"] += 1
        raise httpx.ConnectError("refused")

    config = JudgeConfig(endpoint="http://judge.test/v1", model="mock-judge",
                         max_retries=2, cache_dir=str(tmp_path / "cache"))
    evals, report = judge_corpus([WORKED_RECORD], load_template("hi"), config, hi_pack,
                                 transport=httpx.MockTransport(handler),
                                 sleep=lambda _t: None)
    assert evals == []
    assert attempts["n"] == 3  # initial try + 2 retries
    assert report["failed"][0]["error"] == "TransportError"


def test_conservation_warning(tmp_path, hi_pack):
    # more listed error pairs than aligned mismatches -> hallucination flag
    inflated = {
        "token_count": 3,
        "non_penalizable": [
            {"ref": f"w{i}", "hyp": f"v{i}", "reason": "x"} for i in range(4)
        ],
        "major": [], "minor": [], "total_penalty": 0.0, "score": 1.0,
    }
    config = JudgeConfig(endpoint="http://judge.test/v1", model="mock-judge",
                         cache_dir=str(tmp_path / "cache"))
    evals, report = judge_corpus(
        [Rec("h1", "hi", "ek do teen", "ek do char")],
        load_template("hi"), config, hi_pack,
        transport=canned_transport(json.dumps({"1": inflated})),
    )
    assert "hallucinated_pairs" in evals[0].flags
    assert report["conservation_warning_ids"] == ["h1"]


def test_cache_key_covers_model_and_prompt():
    assert ResponseCache.key("m1", "p") != ResponseCache.key("m2", "p")
    assert ResponseCache.key("m1", "p") != ResponseCache.key("m1", "q")
    assert ResponseCache.key("m1", "p") == ResponseCache.key("m1", "p")
