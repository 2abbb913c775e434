import pytest

from pvlens.term_store import (
    Concept,
    ConceptLevel,
    Terminology,
    TermStore,
    load_stopwords,
    load_terminology,
)


def make_store(concepts, mthspl=(), ndc_map=()):
    """Assemble an in-memory TermStore from Concept values (test helper)."""
    by_code = {c.code: c for c in concepts}
    synonym_index = {}
    for code in sorted(by_code):
        c = by_code[code]
        if c.terminology is not Terminology.MEDDRA:
            continue
        for syn in c.synonyms:
            synonym_index.setdefault(syn.lower(), []).append(code)
    mthspl_map = {}
    substance_sets = {}
    substance_names = {}
    for set_id, sub, name in mthspl:
        mthspl_map.setdefault(set_id, []).append((sub, name))
        substance_sets.setdefault(sub, set()).add(set_id)
        substance_names[sub] = name
    return TermStore(
        concepts=by_code,
        synonym_index={k: tuple(v) for k, v in synonym_index.items()},
        mthspl={k: tuple(v) for k, v in mthspl_map.items()},
        substance_set_ids={k: frozenset(v) for k, v in substance_sets.items()},
        substance_names=substance_names,
        ndc_map=dict(ndc_map),
        counts={},
        fingerprint=repr(sorted(synonym_index.items())),
    )


def pt(code, name, synonyms=(), semtypes=("T047",)):
    return Concept(
        code=code,
        terminology=Terminology.MEDDRA,
        level=ConceptLevel.PT,
        preferred_name=name,
        synonyms=frozenset({name, *synonyms}),
        semantic_types=frozenset(semtypes),
    )


def llt(code, name, parent, synonyms=(), semtypes=("T047",)):
    return Concept(
        code=code,
        terminology=Terminology.MEDDRA,
        level=ConceptLevel.LLT,
        preferred_name=name,
        synonyms=frozenset({name, *synonyms}),
        semantic_types=frozenset(semtypes),
        pt_parent=parent,
    )

CONCEPTS = """\
P1|MedDRA|PT|Headache|
P2|MedDRA|PT|Severe headache|
P3|MedDRA|PT|Rash|
P4|MedDRA|PT|Urine output|
P5|MedDRA|PT|Adverse reaction|
L1|MedDRA|LLT|Head pain|P1
L2|MedDRA|LLT|Skin eruption|P3
L3|MedDRA|LLT|Morbilliform rash|P3
R1|RxNorm|NA|drugone|
R2|RxNorm|NA|drugtwo|
N1|SNOMED|NA|drugone substance|
N2|SNOMED|NA|drugtwo substance|
"""

SYNONYMS = """\
P1|cephalalgia
P1|headache
P3|skin rash
P5|adverse reaction
"""

SEMTYPES = """\
P1|T047
P2|T047
P3|T184
P4|T081
P5|T047
L1|T047
L2|T184
L3|T184
"""

MTHSPL = """\
G1|S1|Drugone
G2|S1|Drugone
G3|S2|Drugtwo
"""

NDC_MAP = """\
00001000101|R1|N1
00002000202|R2|
"""

STOPWORDS = """\
# generic phrases excluded from matching
adverse reaction
the
"""


def write_terminology(directory):
    directory.mkdir(parents=True, exist_ok=True)
    (directory / "concepts.psv").write_text(CONCEPTS)
    (directory / "synonyms.psv").write_text(SYNONYMS)
    (directory / "semtypes.psv").write_text(SEMTYPES)
    (directory / "mthspl.psv").write_text(MTHSPL)
    (directory / "ndc_map.psv").write_text(NDC_MAP)
    (directory / "stopwords.txt").write_text(STOPWORDS)
    return directory


@pytest.fixture(scope="session")
def term_dir(tmp_path_factory):
    return write_terminology(tmp_path_factory.mktemp("terms") / "fixture")


@pytest.fixture(scope="session")
def store(term_dir):
    return load_terminology(term_dir)


@pytest.fixture(scope="session")
def stopwords(term_dir):
    return load_stopwords(term_dir / "stopwords.txt")
