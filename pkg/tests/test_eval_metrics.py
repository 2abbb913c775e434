import pytest
from hypothesis import given
from hypothesis import strategies as st

from pvlens.errors import DegenerateCounts, MissingAdjudication, UnpairedTerm
from pvlens.eval_metrics import (
    ConfusionCounts,
    FnVerdict,
    adjudicator_agreement,
    classify_user_added,
    fn_report,
    overall_agreement,
    score,
)
from pvlens.spl_parser import SectionCategory
from pvlens.term_store import SemanticTypeFilter


def test_score_overall_row():
    s = score(ConfusionCounts(tp=4580, fp=1152, fn=79))
    assert s.precision == pytest.approx(0.799, abs=0.0005)
    assert s.recall == pytest.approx(0.983, abs=0.0005)
    assert s.f1 == pytest.approx(0.882, abs=0.0005)


def test_score_adverse_event_row():
    s = score(ConfusionCounts(tp=4223, fp=887, fn=66))
    assert s.precision == pytest.approx(0.826, abs=0.0005)
    assert s.recall == pytest.approx(0.985, abs=0.0005)
    assert s.f1 == pytest.approx(0.899, abs=0.0005)


def test_score_perfect():
    s = score(ConfusionCounts(5, 0, 0))
    assert (s.precision, s.recall, s.f1) == (1.0, 1.0, 1.0)


def test_score_degenerate():
    with pytest.raises(DegenerateCounts):
        score(ConfusionCounts(0, 0, 5))


@given(
    st.integers(min_value=0, max_value=10_000),
    st.integers(min_value=0, max_value=10_000),
    st.integers(min_value=0, max_value=10_000),
)
def test_f1_is_harmonic_mean(tp, fp, fn):
    if tp + fp == 0 or tp + fn == 0:
        return
    s = score(ConfusionCounts(tp, fp, fn))
    assert abs(s.f1 * (s.precision + s.recall) - 2 * s.precision * s.recall) < 1e-12
    assert 0.0 <= s.precision <= 1.0 and 0.0 <= s.recall <= 1.0 and 0.0 <= s.f1 <= 1.0


# --- agreement ---


def pairs(concordant, discordant):
    out = {}
    for i in range(concordant):
        out[f"c{i}"] = ("include", "include")
    for i in range(discordant):
        out[f"d{i}"] = ("include", "exclude")
    return out


def test_overall_agreement_simple():
    assert overall_agreement(pairs(7, 3)) == 0.70


def test_overall_agreement_all_concordant():
    assert overall_agreement(pairs(10, 0)) == 1.0


def test_overall_agreement_fixture_77():
    assert overall_agreement(pairs(77, 23)) == 0.77


def test_overall_agreement_symmetric_and_permutation_invariant():
    p = pairs(7, 3)
    swapped = {k: (b, a) for k, (a, b) in p.items()}
    assert overall_agreement(p) == overall_agreement(swapped)
    reordered = dict(reversed(list(p.items())))
    assert overall_agreement(p) == overall_agreement(reordered)


def test_overall_agreement_unpaired():
    with pytest.raises(UnpairedTerm):
        overall_agreement({"t1": ("include",)})


def test_adjudicator_agreement_single_reviewer():
    rows = [("include", "include")] * 9 + [("include", "exclude")]
    proportions, median = adjudicator_agreement({"r1": rows})
    assert proportions == {"r1": 0.9}
    assert median == 0.9


def test_adjudicator_agreement_median_913():
    per_reviewer = {
        "r1": [("include", "include")] * 22 + [("include", "exclude")] * 3,  # 0.88
        "r2": [("include", "include")] * 913 + [("include", "exclude")] * 87,  # 0.913
        "r3": [("include", "include")] * 19 + [("include", "exclude")] * 1,  # 0.95
    }
    proportions, median = adjudicator_agreement(per_reviewer)
    assert sorted(proportions.values()) == [0.88, 0.913, 0.95]
    assert median == 0.913


def test_adjudicator_agreement_even_count_mean_of_middle_two():
    per_reviewer = {
        "r1": [("include", "include")] * 4,  # 1.0
        "r2": [("include", "exclude")] * 4,  # 0.0
        "r3": [("include", "include")] * 3 + [("include", "exclude")],  # 0.75
        "r4": [("include", "include")] + [("include", "exclude")] * 3,  # 0.25
    }
    _, median = adjudicator_agreement(per_reviewer)
    assert median == 0.5


def test_adjudicator_agreement_requires_reviewers():
    with pytest.raises(MissingAdjudication):
        adjudicator_agreement({})
    with pytest.raises(MissingAdjudication):
        adjudicator_agreement({"r1": [("include", None)]})


# --- user-added term classifier ---


def test_classifier_already_mapped(store, stopwords):
    verdict = classify_user_added(
        "cephalalgia", store, stopwords, SemanticTypeFilter(), extracted_pts={"P1"}
    )
    assert verdict is FnVerdict.ALREADY_SYNONYM_MAPPED


def test_classifier_invalid_semantic_type(store, stopwords):
    verdict = classify_user_added(
        "urine output", store, stopwords, SemanticTypeFilter(), extracted_pts=set()
    )
    assert verdict is FnVerdict.INVALID_SEMANTIC_TYPE


def test_classifier_stopword(store, stopwords):
    verdict = classify_user_added(
        "adverse reaction", store, stopwords, SemanticTypeFilter(), extracted_pts=set()
    )
    assert verdict is FnVerdict.STOPWORD_EXCLUDED


def test_classifier_unmappable(store, stopwords):
    verdict = classify_user_added(
        "glorp", store, stopwords, SemanticTypeFilter(), extracted_pts=set()
    )
    assert verdict is FnVerdict.UNMAPPABLE


def test_classifier_true_false_negative(store, stopwords):
    verdict = classify_user_added(
        "rash", store, stopwords, SemanticTypeFilter(), extracted_pts={"P1"}
    )
    assert verdict is FnVerdict.TRUE_FALSE_NEGATIVE


def test_classifier_check_order(store, stopwords):
    # mappability precedes the already-extracted check: an extracted PT with
    # an unmappable surface is still Unmappable
    assert (
        classify_user_added("zzz", store, stopwords, SemanticTypeFilter(), {"P1"})
        is FnVerdict.UNMAPPABLE
    )
    # already-extracted precedes stopwords
    assert (
        classify_user_added(
            "adverse reaction", store, stopwords, SemanticTypeFilter(), {"P5"}
        )
        is FnVerdict.ALREADY_SYNONYM_MAPPED
    )


# --- fn_report ---


def test_fn_report_paper_shape():
    classifications = (
        [(FnVerdict.TRUE_FALSE_NEGATIVE, SectionCategory.BOXED_WARNING)] * 3
        + [(FnVerdict.TRUE_FALSE_NEGATIVE, SectionCategory.INDICATION)] * 10
        + [(FnVerdict.TRUE_FALSE_NEGATIVE, SectionCategory.ADVERSE_EVENT)] * 66
        + [(FnVerdict.ALREADY_SYNONYM_MAPPED, SectionCategory.ADVERSE_EVENT)] * 12
        + [(FnVerdict.INVALID_SEMANTIC_TYPE, SectionCategory.ADVERSE_EVENT)] * 12
        + [(FnVerdict.STOPWORD_EXCLUDED, SectionCategory.ADVERSE_EVENT)] * 9
        + [(FnVerdict.UNMAPPABLE, SectionCategory.ADVERSE_EVENT)] * 900
    )
    report = fn_report(classifications)
    assert report.total == 1012
    assert report.verdict_counts[FnVerdict.TRUE_FALSE_NEGATIVE] == 79
    assert report.fn_by_category[SectionCategory.BOXED_WARNING] == 3
    assert report.fn_fraction == pytest.approx(0.078, abs=0.0005)


def test_fn_report_empty():
    report = fn_report([])
    assert report.total == 0
    assert report.fn_fraction == 0.0
    assert all(v == 0 for v in report.verdict_counts.values())


@given(
    st.lists(
        st.tuples(st.sampled_from(list(FnVerdict)), st.sampled_from(list(SectionCategory)))
    )
)
def test_fn_report_counts_sum_to_total(classifications):
    report = fn_report(classifications)
    assert sum(report.verdict_counts.values()) == report.total == len(classifications)
