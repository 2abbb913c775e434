"""Small built-in study fixture for running the review service locally."""

from __future__ import annotations

import tempfile

from .review_service import ReviewService, StudyLabel, StudyTerm
from .spl_parser import SectionCategory
from .term_store import load_stopwords, load_terminology

_CONCEPTS = """\
P1|MedDRA|PT|Headache|
P2|MedDRA|PT|Severe headache|
P3|MedDRA|PT|Rash|
P4|MedDRA|PT|Urine output|
P5|MedDRA|PT|Adverse reaction|
L1|MedDRA|LLT|Head pain|P1
"""

_SYNONYMS = """\
P1|cephalalgia
P3|skin rash
P5|adverse reaction
"""

_SEMTYPES = """\
P1|T047
P2|T047
P3|T184
P4|T081
P5|T047
L1|T047
"""

_STOPWORDS = "adverse reaction\nthe\n"


def demo_store():
    """Load the embedded demo terminology."""
    d = tempfile.mkdtemp(prefix="pvlens-demo-")
    files = {
        "concepts.psv": _CONCEPTS,
        "synonyms.psv": _SYNONYMS,
        "semtypes.psv": _SEMTYPES,
        "mthspl.psv": "G1|S1|Drugone\n",
        "ndc_map.psv": "00001000101|R1|N1\n",
        "stopwords.txt": _STOPWORDS,
    }
    for name, content in files.items():
        with open(f"{d}/{name}", "w", encoding="utf-8") as fh:
            fh.write(content)
    return load_terminology(d), load_stopwords(f"{d}/stopwords.txt")


def demo_label(set_id="G1", n_terms=10) -> StudyLabel:
    """One label whose section text carries n_terms highlightable spans."""
    ae = SectionCategory.ADVERSE_EVENT
    surfaces = [f"event{i:02d}" for i in range(n_terms)]
    text = "patients reported " + " and ".join(surfaces) + " during treatment."
    terms = []
    offset = len("patients reported ")
    for i, surface in enumerate(surfaces):
        start = text.index(surface, offset)
        terms.append(
            StudyTerm(
                term_id=f"t{i:02d}",
                concept_code=f"P{i:02d}",
                pt_code=f"P{i:02d}",
                surface=surface,
                span=(start, start + len(surface)),
                category=ae,
            )
        )
        offset = start + len(surface)
    return StudyLabel(set_id=set_id, sections={ae: text}, terms=tuple(terms))


def demo_service(seed: int = 4, reviewers=("r1", "r2", "r3")) -> ReviewService:
    store, stopwords = demo_store()
    return ReviewService(
        labels=[demo_label()],
        reviewers=list(reviewers),
        adjudicator="adj",
        seed=seed,
        store=store,
        stopwords=stopwords,
    )
