"""HTTP review workflow: two random reviewers per label, include/exclude
verdicts per extracted term, user-added terms, and adjudication of
discrepancies. Endpoints are documented in docs/formats.md."""

from __future__ import annotations

import datetime
import json
import random
import threading
from dataclasses import dataclass, field

from fastapi import Depends, FastAPI, Header, HTTPException, Response
from pydantic import BaseModel

from .errors import (
    AlreadyAdjudicated,
    AlreadySubmitted,
    IncompleteDecisions,
    PoolTooSmall,
)
from .eval_metrics import (
    ConfusionCounts,
    FnVerdict,
    adjudicator_agreement,
    classify_user_added,
    overall_agreement,
    score,
)
from .spl_parser import SectionCategory
from .term_store import SemanticTypeFilter, StopwordList, TermStore

INCLUDE = "include"
EXCLUDE = "exclude"
ACCEPT = "accept"
REJECT = "reject"


@dataclass(frozen=True)
class StudyTerm:
    term_id: str
    concept_code: str
    pt_code: str
    surface: str
    span: tuple[int, int]
    category: SectionCategory


@dataclass(frozen=True)
class StudyLabel:
    set_id: str
    sections: dict[SectionCategory, str]
    terms: tuple[StudyTerm, ...]


@dataclass
class ReviewAssignment:
    set_id: str
    reviewer_id: str
    status: str = "pending"  # pending | submitted
    decisions: dict[str, str] = field(default_factory=dict)
    submitted_at: str | None = None


@dataclass
class UserAddedTerm:
    user_term_id: str
    set_id: str
    category: SectionCategory
    text: str
    proposed_by: str
    verdict: str | None = None  # accept | reject
    classification: FnVerdict | None = None


@dataclass
class AdjudicationItem:
    item_id: str
    set_id: str
    term_id: str
    reviewer_verdicts: dict[str, str]
    final_verdict: str | None = None


def assign_reviewers(set_id: str, reviewer_pool: list[str], rng_seed) -> tuple[
    ReviewAssignment, ReviewAssignment
]:
    """Sample two distinct reviewers uniformly; deterministic under a seed."""
    if len(reviewer_pool) < 2:
        raise PoolTooSmall(f"pool has {len(reviewer_pool)} reviewers, need 2")
    rng = rng_seed if isinstance(rng_seed, random.Random) else random.Random(rng_seed)
    first, second = rng.sample(list(reviewer_pool), 2)
    return ReviewAssignment(set_id, first), ReviewAssignment(set_id, second)


class ReviewService:
    """In-memory study state; all mutation under one lock."""

    def __init__(
        self,
        labels: list[StudyLabel],
        reviewers: list[str],
        adjudicator: str,
        seed: int,
        store: TermStore | None = None,
        stopwords: StopwordList | None = None,
        semantic_filter: SemanticTypeFilter | None = None,
        tokens: dict[str, str] | None = None,
    ):
        if len(reviewers) < 2:
            raise PoolTooSmall("need at least two reviewers")
        self._lock = threading.Lock()
        self.labels = {lab.set_id: lab for lab in labels}
        self.reviewers = list(reviewers)
        self.adjudicator = adjudicator
        self.store = store
        self.stopwords = stopwords or StopwordList()
        self.semantic_filter = semantic_filter or SemanticTypeFilter()
        # token -> principal; defaults make fixtures terse
        self.tokens = tokens or {
            f"tok-{p}": p for p in [*reviewers, adjudicator]
        }
        rng = random.Random(seed)
        self.assignments: dict[str, list[ReviewAssignment]] = {}
        for set_id in sorted(self.labels):
            pair = assign_reviewers(set_id, self.reviewers, rng)
            self.assignments[set_id] = list(pair)
        self.user_terms: dict[str, UserAddedTerm] = {}
        self.adjudication: dict[str, AdjudicationItem] = {}
        self._uid = 0

    # --- helpers ---

    def principal(self, token: str) -> str | None:
        return self.tokens.get(token)

    def _next_id(self, prefix: str) -> str:
        self._uid += 1
        return f"{prefix}-{self._uid:04d}"

    def _label_user_terms(self, set_id: str) -> list[UserAddedTerm]:
        return [t for t in self.user_terms.values() if t.set_id == set_id]

    def _label_items(self, set_id: str) -> list[AdjudicationItem]:
        return [i for i in self.adjudication.values() if i.set_id == set_id]

    def both_submitted(self, set_id: str) -> bool:
        return all(a.status == "submitted" for a in self.assignments[set_id])

    def label_closed(self, set_id: str) -> bool:
        if not self.both_submitted(set_id):
            return False
        if any(i.final_verdict is None for i in self._label_items(set_id)):
            return False
        return all(t.verdict is not None for t in self._label_user_terms(set_id))

    # --- workflow operations ---

    def next_label(self, reviewer_id: str) -> str | None:
        with self._lock:
            for set_id in sorted(self.assignments):
                for a in self.assignments[set_id]:
                    if a.reviewer_id == reviewer_id and a.status == "pending":
                        return set_id
        return None

    def submit_review(
        self,
        set_id: str,
        reviewer_id: str,
        decisions: dict[str, str],
        user_added: list[tuple[str, SectionCategory]] = (),
    ) -> dict:
        with self._lock:
            label = self.labels[set_id]
            assignment = next(
                (a for a in self.assignments[set_id] if a.reviewer_id == reviewer_id),
                None,
            )
            if assignment is None:
                raise KeyError(f"{reviewer_id} holds no assignment for {set_id}")
            if assignment.status == "submitted":
                raise AlreadySubmitted(f"{reviewer_id} already submitted {set_id}")
            term_ids = {t.term_id for t in label.terms}
            missing = term_ids - set(decisions)
            if missing:
                raise IncompleteDecisions(missing)
            unknown = set(decisions) - term_ids
            if unknown:
                raise IncompleteDecisions(unknown)
            for verdict in decisions.values():
                if verdict not in (INCLUDE, EXCLUDE):
                    raise ValueError(f"bad verdict {verdict!r}")
            assignment.decisions = dict(decisions)
            assignment.status = "submitted"
            assignment.submitted_at = datetime.datetime.utcnow().isoformat()
            for text, category in user_added:
                self._add_user_term(set_id, category, text, reviewer_id)
            created = []
            if self.both_submitted(set_id):
                created = self._create_adjudication_items(set_id)
            return {
                "set_id": set_id,
                "reviewer_id": reviewer_id,
                "adjudication_items_created": len(created),
            }

    def _add_user_term(self, set_id, category, text, reviewer_id) -> UserAddedTerm:
        if not text.strip():
            raise ValueError("user-added term text is empty")
        term = UserAddedTerm(
            user_term_id=self._next_id("u"),
            set_id=set_id,
            category=category,
            text=text.strip(),
            proposed_by=reviewer_id,
        )
        self.user_terms[term.user_term_id] = term
        return term

    def add_user_term(self, set_id, category, text, reviewer_id) -> UserAddedTerm:
        with self._lock:
            if set_id not in self.labels:
                raise KeyError(set_id)
            return self._add_user_term(set_id, category, text, reviewer_id)

    def _create_adjudication_items(self, set_id: str) -> list[AdjudicationItem]:
        a, b = self.assignments[set_id]
        created = []
        for term in self.labels[set_id].terms:
            va, vb = a.decisions[term.term_id], b.decisions[term.term_id]
            if va != vb:
                item = AdjudicationItem(
                    item_id=self._next_id("d"),
                    set_id=set_id,
                    term_id=term.term_id,
                    reviewer_verdicts={a.reviewer_id: va, b.reviewer_id: vb},
                )
                self.adjudication[item.item_id] = item
                created.append(item)
        return created

    def adjudicate(self, item_id: str, final_verdict: str):
        with self._lock:
            item = self.adjudication[item_id]
            if item.final_verdict is not None:
                raise AlreadyAdjudicated(item_id)
            if final_verdict not in (INCLUDE, EXCLUDE):
                raise ValueError(f"bad verdict {final_verdict!r}")
            item.final_verdict = final_verdict

    def adjudicate_user_term(self, user_term_id: str, verdict: str):
        with self._lock:
            term = self.user_terms[user_term_id]
            if term.verdict is not None:
                raise AlreadyAdjudicated(user_term_id)
            if verdict not in (ACCEPT, REJECT):
                raise ValueError(f"bad verdict {verdict!r}")
            term.verdict = verdict
            if verdict == ACCEPT and self.store is not None:
                extracted = {
                    t.pt_code
                    for t in self.labels[term.set_id].terms
                    if t.category is term.category
                }
                term.classification = classify_user_added(
                    term.text, self.store, self.stopwords, self.semantic_filter, extracted
                )

    # --- derived views ---

    def final_verdicts(self, set_id: str) -> dict[str, str] | None:
        """term_id -> final verdict for a label with both reviews in."""
        if not self.both_submitted(set_id):
            return None
        a, b = self.assignments[set_id]
        adjudicated = {
            i.term_id: i.final_verdict for i in self._label_items(set_id)
        }
        out = {}
        for term in self.labels[set_id].terms:
            va, vb = a.decisions[term.term_id], b.decisions[term.term_id]
            out[term.term_id] = va if va == vb else adjudicated.get(term.term_id)
        return out

    def confusion(self) -> dict[SectionCategory, ConfusionCounts]:
        """Confusion contributions of every closed label."""
        out = {c: ConfusionCounts(0, 0, 0) for c in SectionCategory}
        for set_id, label in self.labels.items():
            if not self.label_closed(set_id):
                continue
            finals = self.final_verdicts(set_id)
            for term in label.terms:
                if finals[term.term_id] == INCLUDE:
                    out[term.category] += ConfusionCounts(1, 0, 0)
                else:
                    out[term.category] += ConfusionCounts(0, 1, 0)
            for uterm in self._label_user_terms(set_id):
                if (
                    uterm.verdict == ACCEPT
                    and uterm.classification is FnVerdict.TRUE_FALSE_NEGATIVE
                ):
                    out[uterm.category] += ConfusionCounts(0, 0, 1)
        return out

    def agreement_inputs(self):
        pairs: dict[str, tuple[str, str]] = {}
        per_reviewer: dict[str, list[tuple[str, str]]] = {}
        for set_id, label in self.labels.items():
            if not self.both_submitted(set_id):
                continue
            a, b = self.assignments[set_id]
            finals = self.final_verdicts(set_id)
            for term in label.terms:
                key = f"{set_id}:{term.term_id}"
                pairs[key] = (a.decisions[term.term_id], b.decisions[term.term_id])
                final = finals[term.term_id]
                if final is not None:
                    for assignment in (a, b):
                        per_reviewer.setdefault(assignment.reviewer_id, []).append(
                            (assignment.decisions[term.term_id], final)
                        )
        return pairs, per_reviewer

    def export_decisions(self) -> str:
        """Deterministic JSON-lines export of every decision and user term."""
        rows = []
        for set_id in sorted(self.labels):
            label = self.labels[set_id]
            finals = self.final_verdicts(set_id) or {}
            for term in label.terms:
                for assignment in self.assignments[set_id]:
                    if assignment.status != "submitted":
                        continue
                    rows.append(
                        {
                            "type": "decision",
                            "set_id": set_id,
                            "term_id": term.term_id,
                            "category": term.category.value,
                            "pt_code": term.pt_code,
                            "reviewer_id": assignment.reviewer_id,
                            "verdict": assignment.decisions[term.term_id],
                            "final_verdict": finals.get(term.term_id),
                        }
                    )
        for user_term_id in sorted(self.user_terms):
            t = self.user_terms[user_term_id]
            rows.append(
                {
                    "type": "user_term",
                    "set_id": t.set_id,
                    "user_term_id": t.user_term_id,
                    "category": t.category.value,
                    "text": t.text,
                    "proposed_by": t.proposed_by,
                    "verdict": t.verdict,
                    "classification": t.classification.value if t.classification else None,
                }
            )
        return "".join(json.dumps(r, sort_keys=True) + "\n" for r in rows)


def parse_export(text: str):
    """Split an export back into decision rows and user-term rows."""
    decisions, user_terms = [], []
    for line in text.splitlines():
        if not line.strip():
            continue
        row = json.loads(line)
        (decisions if row["type"] == "decision" else user_terms).append(row)
    return decisions, user_terms


def agreement_from_export(text: str):
    """Recompute the two agreement statistics from an export file."""
    decisions, _ = parse_export(text)
    pairs: dict[str, list[str]] = {}
    per_reviewer: dict[str, list[tuple[str, str]]] = {}
    for row in decisions:
        key = f"{row['set_id']}:{row['term_id']}"
        pairs.setdefault(key, []).append(row["verdict"])
        if row["final_verdict"] is not None:
            per_reviewer.setdefault(row["reviewer_id"], []).append(
                (row["verdict"], row["final_verdict"])
            )
    paired = {k: tuple(v) for k, v in pairs.items()}
    overall = overall_agreement(paired)
    _, median = adjudicator_agreement(per_reviewer)
    return overall, median


# --- HTTP layer ---


class ReviewBody(BaseModel):
    decisions: dict[str, str]
    user_terms: list[dict] = []


class VerdictBody(BaseModel):
    verdict: str


class UserTermBody(BaseModel):
    category: str
    text: str


def build_app(service: ReviewService) -> FastAPI:
    app = FastAPI(title="pvlens review service")

    def auth(authorization: str = Header(default="")) -> str:
        if not authorization.startswith("Bearer "):
            raise HTTPException(401, "missing bearer token")
        principal = service.principal(authorization.removeprefix("Bearer "))
        if principal is None:
            raise HTTPException(401, "unknown token")
        return principal

    def label_payload(set_id: str) -> dict:
        label = service.labels[set_id]
        return {
            "set_id": set_id,
            "closed": service.label_closed(set_id),
            "sections": {c.value: t for c, t in label.sections.items()},
            "terms": [
                {
                    "term_id": t.term_id,
                    "concept_code": t.concept_code,
                    "pt_code": t.pt_code,
                    "surface": t.surface,
                    "span": list(t.span),
                    "category": t.category.value,
                }
                for t in label.terms
            ],
        }

    @app.get("/labels/next")
    def labels_next(principal: str = Depends(auth)):
        set_id = service.next_label(principal)
        if set_id is None:
            return Response(status_code=204)
        return label_payload(set_id)

    @app.get("/labels/{set_id}")
    def get_label(set_id: str, principal: str = Depends(auth)):
        if set_id not in service.labels:
            raise HTTPException(404, "unknown label")
        return label_payload(set_id)

    @app.post("/labels/{set_id}/review")
    def post_review(set_id: str, body: ReviewBody, principal: str = Depends(auth)):
        if set_id not in service.labels:
            raise HTTPException(404, "unknown label")
        user_added = [
            (t["text"], SectionCategory(t["category"])) for t in body.user_terms
        ]
        try:
            return service.submit_review(set_id, principal, body.decisions, user_added)
        except AlreadySubmitted as exc:
            raise HTTPException(409, str(exc)) from exc
        except IncompleteDecisions as exc:
            raise HTTPException(
                422,
                detail={"error": "incomplete_decisions", "term_ids": exc.missing_term_ids},
            ) from exc
        except KeyError as exc:
            raise HTTPException(403, str(exc)) from exc
        except ValueError as exc:
            raise HTTPException(422, str(exc)) from exc

    @app.post("/labels/{set_id}/user-terms")
    def post_user_term(set_id: str, body: UserTermBody, principal: str = Depends(auth)):
        if set_id not in service.labels:
            raise HTTPException(404, "unknown label")
        try:
            term = service.add_user_term(
                set_id, SectionCategory(body.category), body.text, principal
            )
        except ValueError as exc:
            raise HTTPException(422, str(exc)) from exc
        return {"user_term_id": term.user_term_id}

    @app.get("/adjudication/queue")
    def adjudication_queue(principal: str = Depends(auth)):
        if principal != service.adjudicator:
            raise HTTPException(403, "adjudicator only")
        items = [
            {
                "item_id": i.item_id,
                "set_id": i.set_id,
                "term_id": i.term_id,
                "reviewer_verdicts": i.reviewer_verdicts,
                "final_verdict": i.final_verdict,
            }
            for i in sorted(service.adjudication.values(), key=lambda i: i.item_id)
        ]
        user_terms = [
            {
                "user_term_id": t.user_term_id,
                "set_id": t.set_id,
                "category": t.category.value,
                "text": t.text,
                "proposed_by": t.proposed_by,
                "verdict": t.verdict,
            }
            for t in sorted(service.user_terms.values(), key=lambda t: t.user_term_id)
        ]
        return {"items": items, "user_terms": user_terms}

    @app.post("/adjudication/{item_id}")
    def post_adjudication(item_id: str, body: VerdictBody, principal: str = Depends(auth)):
        if principal != service.adjudicator:
            raise HTTPException(403, "adjudicator only")
        try:
            if item_id in service.adjudication:
                service.adjudicate(item_id, body.verdict)
                set_id = service.adjudication[item_id].set_id
            elif item_id in service.user_terms:
                service.adjudicate_user_term(item_id, body.verdict)
                set_id = service.user_terms[item_id].set_id
            else:
                raise HTTPException(404, "unknown adjudication item")
        except AlreadyAdjudicated as exc:
            raise HTTPException(409, str(exc)) from exc
        except ValueError as exc:
            raise HTTPException(422, str(exc)) from exc
        return {"item_id": item_id, "label_closed": service.label_closed(set_id)}

    @app.get("/metrics")
    def metrics(principal: str = Depends(auth)):
        confusion = service.confusion()
        out = {"categories": {}, "agreement": {}}
        overall = ConfusionCounts(0, 0, 0)
        for category, counts in confusion.items():
            overall += counts
            entry = {"tp": counts.tp, "fp": counts.fp, "fn": counts.fn}
            if counts.tp + counts.fp and counts.tp + counts.fn:
                s = score(counts)
                entry.update(precision=s.precision, recall=s.recall, f1=s.f1)
            out["categories"][category.value] = entry
        out["overall"] = {"tp": overall.tp, "fp": overall.fp, "fn": overall.fn}
        if overall.tp + overall.fp and overall.tp + overall.fn:
            s = score(overall)
            out["overall"].update(precision=s.precision, recall=s.recall, f1=s.f1)
        pairs, per_reviewer = service.agreement_inputs()
        if pairs:
            out["agreement"]["overall"] = overall_agreement(pairs)
        if per_reviewer and all(
            f is not None for rows in per_reviewer.values() for _v, f in rows
        ):
            proportions, median = adjudicator_agreement(per_reviewer)
            out["agreement"]["per_reviewer"] = proportions
            out["agreement"]["adjudicator_median"] = median
        return out

    @app.get("/export/decisions")
    def export_decisions(principal: str = Depends(auth)):
        return Response(
            content=service.export_decisions(), media_type="application/jsonl"
        )

    return app
