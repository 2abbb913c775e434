"""Validation metrics: confusion scores, reviewer agreement, and the
three-criteria false-negative classifier for user-added terms."""

from __future__ import annotations

import enum
import statistics
from collections import Counter
from dataclasses import dataclass, field

from .errors import DegenerateCounts, MissingAdjudication, UnpairedTerm
from .spl_parser import SectionCategory
from .term_store import SemanticTypeFilter, StopwordList, TermStore


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    fn: int

    def __add__(self, other: "ConfusionCounts") -> "ConfusionCounts":
        return ConfusionCounts(self.tp + other.tp, self.fp + other.fp, self.fn + other.fn)


@dataclass(frozen=True)
class Scores:
    precision: float
    recall: float
    f1: float


def score(counts: ConfusionCounts) -> Scores:
    """Precision, recall and F1 (harmonic mean) from raw confusion counts."""
    if counts.tp + counts.fp == 0 or counts.tp + counts.fn == 0:
        raise DegenerateCounts(f"zero denominator in {counts}")
    precision = counts.tp / (counts.tp + counts.fp)
    recall = counts.tp / (counts.tp + counts.fn)
    f1 = 0.0 if precision + recall == 0 else 2 * precision * recall / (precision + recall)
    return Scores(precision=precision, recall=recall, f1=f1)


def overall_agreement(verdicts_by_term: dict[str, tuple[str, str]]) -> float:
    """Fraction of terms on which the two reviewers gave the same verdict."""
    if not verdicts_by_term:
        raise UnpairedTerm("no paired verdicts")
    concordant = 0
    for term_id, pair in verdicts_by_term.items():
        if len(pair) != 2:
            raise UnpairedTerm(f"term {term_id} has {len(pair)} verdicts, expected 2")
        concordant += pair[0] == pair[1]
    return concordant / len(verdicts_by_term)


def adjudicator_agreement(
    per_reviewer: dict[str, list[tuple[str, str]]],
) -> tuple[dict[str, float], float]:
    """Per-reviewer agreement with the adjudicated verdict, plus the median.

    Each value is a list of (reviewer_verdict, final_verdict) pairs.
    """
    if not per_reviewer:
        raise MissingAdjudication("no reviewers")
    proportions = {}
    for reviewer, pairs in per_reviewer.items():
        if not pairs:
            raise MissingAdjudication(f"reviewer {reviewer} has no adjudicated terms")
        if any(final is None for _v, final in pairs):
            raise MissingAdjudication(f"reviewer {reviewer} has unadjudicated terms")
        proportions[reviewer] = sum(v == final for v, final in pairs) / len(pairs)
    return proportions, statistics.median(proportions.values())


class FnVerdict(enum.Enum):
    TRUE_FALSE_NEGATIVE = "true_false_negative"
    ALREADY_SYNONYM_MAPPED = "already_synonym_mapped"
    INVALID_SEMANTIC_TYPE = "invalid_semantic_type"
    STOPWORD_EXCLUDED = "stopword_excluded"
    UNMAPPABLE = "unmappable"


def classify_user_added(
    text: str,
    store: TermStore,
    stopwords: StopwordList,
    semantic_filter: SemanticTypeFilter,
    extracted_pts: set[str],
) -> FnVerdict:
    """Classify a user-added term using the ordered three-criteria check.

    Order: mappable at all; already captured by an extracted synonym; valid
    semantic type; not a stopword; anything left is a true false negative.
    """
    codes = store.lookup_synonym(text)
    if not codes:
        return FnVerdict.UNMAPPABLE
    pts = {store.normalize_to_pt(code) for code in codes}
    if pts & extracted_pts:
        return FnVerdict.ALREADY_SYNONYM_MAPPED
    if not any(semantic_filter.admits(store.concepts[code]) for code in codes):
        return FnVerdict.INVALID_SEMANTIC_TYPE
    if text.lower().strip() in stopwords.entries:
        return FnVerdict.STOPWORD_EXCLUDED
    return FnVerdict.TRUE_FALSE_NEGATIVE


@dataclass(frozen=True)
class FnReport:
    total: int
    verdict_counts: dict[FnVerdict, int]
    fn_by_category: dict[SectionCategory, int]
    fn_fraction: float


def fn_report(
    classifications: list[tuple[FnVerdict, SectionCategory]],
) -> FnReport:
    """Summarize user-added-term classifications."""
    verdict_counts = Counter(v for v, _c in classifications)
    fn_by_category = Counter(
        c for v, c in classifications if v is FnVerdict.TRUE_FALSE_NEGATIVE
    )
    total = len(classifications)
    fn_total = verdict_counts.get(FnVerdict.TRUE_FALSE_NEGATIVE, 0)
    return FnReport(
        total=total,
        verdict_counts={v: verdict_counts.get(v, 0) for v in FnVerdict},
        fn_by_category={c: fn_by_category.get(c, 0) for c in SectionCategory},
        fn_fraction=fn_total / total if total else 0.0,
    )
