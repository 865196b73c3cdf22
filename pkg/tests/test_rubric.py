from __future__ import annotations

import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from laser_eval.align import levenshtein_align
from laser_eval.rubric import (
    DegenerateReferenceError,
    PenaltyClass,
    PenaltyLevel,
    PenaltyWeights,
    aggregate_corpus,
    dump_evaluations,
    evaluate_sentence,
    evaluation_from_record,
    evaluation_record,
    score_sentence,
)
from laser_eval.rules import RulesClassifier
from laser_eval.textnorm import tokenize

from conftest import EN_HYP, EN_REF, HI_HYP, HI_REF

MAJOR = PenaltyClass(PenaltyLevel.MAJOR, "substitution")
MINOR = PenaltyClass(PenaltyLevel.MINOR, "small-grammar")
NONPEN = PenaltyClass(PenaltyLevel.NON_PENALIZABLE, "colloquial")
IDENT = PenaltyClass(PenaltyLevel.IDENTICAL, "other")


def test_worked_example_score():
    b = score_sentence(12, [MAJOR, MAJOR, MINOR] + [NONPEN] * 7)
    assert b.total_penalty == 2.5
    assert abs(b.laser - 0.7917) < 5e-4
    assert round(b.laser, 4) == 0.7917


def test_nonpen_count_does_not_matter():
    b = score_sentence(12, [NONPEN] * 5 + [MINOR] + [MAJOR] * 2)
    assert b.total_penalty == 2.5 and abs(b.laser - 0.7917) < 5e-4


def test_clamping():
    b = score_sentence(2, [MAJOR] * 3)
    assert b.laser_raw == -0.5 and b.laser == 0.0


def test_degenerate_reference_rejected():
    with pytest.raises(DegenerateReferenceError):
        score_sentence(0, [MAJOR])


def test_weight_validation():
    with pytest.raises(ValueError):
        PenaltyWeights(minor=2.0, major=1.0)
    with pytest.raises(ValueError):
        PenaltyWeights(minor=-0.1)


def test_category_level_consistency():
    with pytest.raises(ValueError):
        PenaltyClass(PenaltyLevel.MINOR, "substitution")
    with pytest.raises(ValueError):
        PenaltyClass(PenaltyLevel.MAJOR, "not-a-category")


@settings(max_examples=100, deadline=None)
@given(
    st.integers(min_value=1, max_value=40),
    st.lists(st.sampled_from([0, 1, 2, 3]), max_size=12),
)
def test_monotonicity_properties(n, levels):
    classes = [PenaltyLevel(l) for l in levels]
    base = score_sentence(n, classes)
    plus_major = score_sentence(n, classes + [PenaltyLevel.MAJOR])
    plus_minor = score_sentence(n, classes + [PenaltyLevel.MINOR])
    plus_nonpen = score_sentence(n, classes + [PenaltyLevel.NON_PENALIZABLE, PenaltyLevel.IDENTICAL])
    assert plus_major.laser_raw == pytest.approx(base.laser_raw - 1.0 / n)
    assert plus_minor.laser_raw == pytest.approx(base.laser_raw - 0.5 / n)
    assert plus_nonpen.laser_raw == base.laser_raw
    assert 0.0 <= base.laser <= 1.0
    assert (base.laser == 1.0) == (base.total_penalty == 0.0)


@settings(max_examples=150, deadline=None)
@given(
    st.lists(st.sampled_from(["a", "b", "c", "d"]), min_size=1, max_size=6),
    st.lists(st.sampled_from(["a", "b", "c", "d"]), max_size=6),
)
def test_all_major_unit_weights_degenerates_to_wer(en_pack, r, h):
    # minor=major=1, every mismatch major, no merge: 1 - laser_raw == WER
    ref, hyp = tokenize(" ".join(r), en_pack), tokenize(" ".join(h), en_pack)
    a = levenshtein_align(ref, hyp)
    classes = [PenaltyLevel.MAJOR for p in a.pairs if p.is_mismatch]
    b = score_sentence(ref.n, classes, PenaltyWeights(minor=1.0, major=1.0))
    assert 1.0 - b.laser_raw == pytest.approx(a.distance / ref.n)


def test_evaluate_identical(en_pack):
    ev = evaluate_sentence("the arm", "The  arm. ", RulesClassifier(en_pack), en_pack)
    assert ev.laser == 1.0 and ev.wer == 0.0


def test_evaluate_join_scores_one(hi_pack):
    ev = evaluate_sentence(
        "bhajansangraha", "bhajan sangraha", RulesClassifier(hi_pack), hi_pack
    )
    assert ev.laser == 1.0
    assert ev.classified_pairs[0].op == "join"


def test_evaluate_worked_examples(hi_pack, en_pack):
    ev = evaluate_sentence(HI_REF, HI_HYP, RulesClassifier(hi_pack), hi_pack, sent_id="a1")
    assert ev.total_penalty == 2.5 and abs(ev.laser - 0.7917) < 5e-4
    counts = ev.level_counts()
    assert counts[1] == 7 and counts[2] == 1 and counts[3] == 2

    ev2 = evaluate_sentence(EN_REF, EN_HYP, RulesClassifier(en_pack), en_pack, sent_id="d1")
    assert ev2.total_penalty == 2.5 and abs(ev2.laser - 0.7917) < 5e-4
    assert abs(ev2.wer - 0.6667) < 5e-4
    counts2 = ev2.level_counts()
    assert counts2[1] == 5 and counts2[2] == 1 and counts2[3] == 2


def test_aggregate(hi_pack, en_pack):
    e1 = evaluate_sentence(HI_REF, HI_HYP, RulesClassifier(hi_pack), hi_pack, sent_id="a1")
    e2 = evaluate_sentence(EN_REF, EN_HYP, RulesClassifier(en_pack), en_pack, sent_id="d1")
    agg = aggregate_corpus([e1, e2])
    assert agg["count"] == 2
    assert abs(agg["mean_laser"] - 0.7917) < 5e-4
    assert agg["level_counts"][3] == 4
    with pytest.raises(ValueError):
        aggregate_corpus([])


def test_aggregate_simple_means(hi_pack):
    e1 = evaluate_sentence("ek do", "ek do", RulesClassifier(hi_pack), hi_pack, sent_id="x")
    assert aggregate_corpus([e1])["mean_laser"] == 1.0
    e2 = evaluate_sentence("ek do", "ek teen", RulesClassifier(hi_pack), hi_pack, sent_id="y")
    assert aggregate_corpus([e1, e2])["mean_laser"] == pytest.approx((1.0 + e2.laser) / 2)


def test_evaluation_record_roundtrip(en_pack):
    ev = evaluate_sentence(EN_REF, EN_HYP, RulesClassifier(en_pack), en_pack, sent_id="d1")
    rec = evaluation_record(ev)
    back = evaluation_from_record(json.loads(json.dumps(rec)))
    assert back.laser == ev.laser and back.total_penalty == ev.total_penalty
    assert [p.level for p in back.classified_pairs] == [
        p.level for p in ev.classified_pairs
    ]
    assert dump_evaluations([ev]) == dump_evaluations([back])
