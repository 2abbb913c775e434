"""Terminology ingestion: concepts, synonyms, semantic types, crosswalks.

The input directory holds pipe-delimited files (formats in docs/formats.md):
concepts.psv, synonyms.psv, semtypes.psv, mthspl.psv, ndc_map.psv and an
optional stopwords.txt.
"""

from __future__ import annotations

import enum
import hashlib
import os
from dataclasses import dataclass, field

from .errors import DanglingLlt, MalformedRow, MissingFile, UnknownCode
from .ident_map import normalize_ndc


class Terminology(enum.Enum):
    MEDDRA = "MedDRA"
    RXNORM = "RxNorm"
    SNOMED = "SNOMED"


class ConceptLevel(enum.Enum):
    PT = "PT"
    LLT = "LLT"
    NA = "NA"


# Allow-list of finding/disease/sign-or-symptom style semantic types.
# Quantitative concepts (T081) are deliberately outside it.
DEFAULT_SEMANTIC_TYPES = frozenset(
    {"T033", "T046", "T047", "T048", "T184", "T191"}
)


@dataclass(frozen=True)
class Concept:
    code: str
    terminology: Terminology
    level: ConceptLevel
    preferred_name: str
    synonyms: frozenset[str]
    semantic_types: frozenset[str]
    pt_parent: str | None = None


@dataclass(frozen=True)
class StopwordList:
    entries: frozenset[str] = frozenset()

    def __contains__(self, phrase: str) -> bool:
        return phrase.lower().strip() in self.entries


@dataclass(frozen=True)
class SemanticTypeFilter:
    allowed: frozenset[str] = DEFAULT_SEMANTIC_TYPES

    def admits(self, concept: Concept) -> bool:
        return bool(self.allowed & concept.semantic_types)


@dataclass(frozen=True)
class TermStore:
    concepts: dict[str, Concept]
    synonym_index: dict[str, tuple[str, ...]]  # lowercased synonym -> MedDRA codes
    mthspl: dict[str, tuple[tuple[str, str], ...]]  # set_id -> (substance_id, name)
    substance_set_ids: dict[str, frozenset[str]]
    substance_names: dict[str, str]
    ndc_map: dict[str, tuple[str | None, str | None]]
    counts: dict[str, int]
    fingerprint: str

    def normalize_to_pt(self, code: str) -> str:
        concept = self.concepts.get(code)
        if concept is None:
            raise UnknownCode(code)
        if concept.level is ConceptLevel.LLT:
            return concept.pt_parent
        return concept.code

    def lookup_synonym(self, text: str) -> tuple[str, ...]:
        return self.synonym_index.get(text.lower().strip(), ())

    def meddra_synonyms(self) -> dict[str, tuple[str, ...]]:
        return self.synonym_index


def _read_psv(path, n_cols, min_cols=None):
    if not os.path.exists(path):
        raise MissingFile(str(path))
    min_cols = min_cols if min_cols is not None else n_cols
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            cols = line.split("|")
            if not (min_cols <= len(cols) <= n_cols):
                raise MalformedRow(path, line_no, f"expected {n_cols} columns, got {len(cols)}")
            cols += [""] * (n_cols - len(cols))
            rows.append((line_no, cols))
    return rows


def load_terminology(directory) -> TermStore:
    """Load every terminology file in ``directory`` into an immutable store."""
    directory = os.fspath(directory)
    concept_rows = _read_psv(os.path.join(directory, "concepts.psv"), 5, min_cols=4)
    synonym_rows = _read_psv(os.path.join(directory, "synonyms.psv"), 2)
    semtype_rows = _read_psv(os.path.join(directory, "semtypes.psv"), 2)
    mthspl_rows = _read_psv(os.path.join(directory, "mthspl.psv"), 3)
    ndc_rows = _read_psv(os.path.join(directory, "ndc_map.psv"), 3, min_cols=1)

    path = os.path.join(directory, "concepts.psv")
    raw: dict[str, dict] = {}
    for line_no, (code, term, level, name, parent) in concept_rows:
        code = code.strip()
        if not code:
            raise MalformedRow(path, line_no, "empty code")
        if code in raw:
            raise MalformedRow(path, line_no, f"duplicate code {code}")
        try:
            terminology = Terminology(term)
            lvl = ConceptLevel(level)
        except ValueError as exc:
            raise MalformedRow(path, line_no, str(exc)) from None
        if (lvl is not ConceptLevel.NA) != (terminology is Terminology.MEDDRA):
            raise MalformedRow(path, line_no, f"level {level} invalid for {term}")
        if lvl is ConceptLevel.LLT and not parent.strip():
            raise MalformedRow(path, line_no, f"LLT {code} has no pt_parent")
        raw[code] = {
            "terminology": terminology,
            "level": lvl,
            "name": name.strip(),
            "parent": parent.strip() or None,
            "synonyms": {name.strip()},
            "semtypes": set(),
        }

    spath = os.path.join(directory, "synonyms.psv")
    for line_no, (code, synonym) in synonym_rows:
        if code not in raw:
            raise MalformedRow(spath, line_no, f"unknown code {code}")
        raw[code]["synonyms"].add(synonym.strip())

    tpath = os.path.join(directory, "semtypes.psv")
    for line_no, (code, semtype) in semtype_rows:
        if code not in raw:
            raise MalformedRow(tpath, line_no, f"unknown code {code}")
        raw[code]["semtypes"].add(semtype.strip())

    for code, info in raw.items():
        if info["level"] is ConceptLevel.LLT:
            parent = raw.get(info["parent"])
            if parent is None or parent["level"] is not ConceptLevel.PT:
                raise DanglingLlt(f"LLT {code} references missing PT {info['parent']}")

    concepts = {
        code: Concept(
            code=code,
            terminology=info["terminology"],
            level=info["level"],
            preferred_name=info["name"],
            synonyms=frozenset(info["synonyms"]),
            semantic_types=frozenset(info["semtypes"]),
            pt_parent=info["parent"],
        )
        for code, info in raw.items()
    }

    synonym_index: dict[str, list[str]] = {}
    for code in sorted(concepts):
        concept = concepts[code]
        if concept.terminology is not Terminology.MEDDRA:
            continue
        for synonym in concept.synonyms:
            synonym_index.setdefault(synonym.lower(), []).append(code)

    mpath = os.path.join(directory, "mthspl.psv")
    mthspl: dict[str, list[tuple[str, str]]] = {}
    substance_sets: dict[str, set[str]] = {}
    substance_names: dict[str, str] = {}
    for line_no, (set_id, substance_id, name) in mthspl_rows:
        set_id, substance_id, name = set_id.strip(), substance_id.strip(), name.strip()
        if not set_id or not substance_id:
            raise MalformedRow(mpath, line_no, "empty set_id or substance_id")
        mthspl.setdefault(set_id, []).append((substance_id, name))
        substance_sets.setdefault(substance_id, set()).add(set_id)
        substance_names[substance_id] = name

    npath = os.path.join(directory, "ndc_map.psv")
    ndc_map: dict[str, tuple[str | None, str | None]] = {}
    for line_no, (ndc, rx, sn) in ndc_rows:
        try:
            key = normalize_ndc(ndc)
        except Exception as exc:
            raise MalformedRow(npath, line_no, str(exc)) from None
        ndc_map[key] = (rx.strip() or None, sn.strip() or None)

    counts = {
        "meddra_pt": sum(1 for c in concepts.values() if c.level is ConceptLevel.PT),
        "meddra_llt": sum(1 for c in concepts.values() if c.level is ConceptLevel.LLT),
        "rxnorm": sum(
            1 for c in concepts.values() if c.terminology is Terminology.RXNORM
        ),
        "snomed": sum(
            1 for c in concepts.values() if c.terminology is Terminology.SNOMED
        ),
        "synonyms": sum(len(v) for v in synonym_index.values()),
        "mthspl": len(mthspl_rows),
        "ndc": len(ndc_map),
    }

    digest = hashlib.sha256()
    for synonym in sorted(synonym_index):
        digest.update(synonym.encode())
        for code in synonym_index[synonym]:
            digest.update(b"|" + code.encode())
        digest.update(b"\n")

    return TermStore(
        concepts=concepts,
        synonym_index={k: tuple(v) for k, v in synonym_index.items()},
        mthspl={k: tuple(v) for k, v in mthspl.items()},
        substance_set_ids={k: frozenset(v) for k, v in substance_sets.items()},
        substance_names=substance_names,
        ndc_map=ndc_map,
        counts=counts,
        fingerprint=digest.hexdigest(),
    )


def load_stopwords(path) -> StopwordList:
    """Read one stopword entry per line; ``#`` comments and blanks skipped."""
    if not os.path.exists(path):
        raise MissingFile(str(path))
    entries = set()
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            entries.add(line.lower())
    return StopwordList(entries=frozenset(entries))


def load_semantic_filter(path) -> SemanticTypeFilter:
    """Read one allowed semantic-type code per line."""
    if not os.path.exists(path):
        raise MissingFile(str(path))
    allowed = set()
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            allowed.add(line)
    return SemanticTypeFilter(allowed=frozenset(allowed))
