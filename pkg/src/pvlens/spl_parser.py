"""Parser for the SPL-subset XML label format.

The input schema is documented in docs/formats.md: a ``<label>`` root with
``set-id``, ``version`` and ``effective-date`` attributes, an optional
``<ndc-list>``, and ``<section code="...">`` elements whose nested content
flattens to plain text.
"""

from __future__ import annotations

import datetime
import enum
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field

from .errors import DuplicateSection, MalformedXml, MissingSetId
from .ident_map import normalize_ndc

_WS = re.compile(r"\s+")
_ENCODING_DECL = re.compile(rb"<\?xml[^>]*encoding\s*=\s*['\"]([^'\"]+)['\"]")


class SectionCategory(enum.Enum):
    INDICATION = "indication"
    ADVERSE_EVENT = "adverse_event"
    BOXED_WARNING = "boxed_warning"


# Default LOINC-style section codes: indications & usage, adverse reactions,
# boxed warning.
DEFAULT_SECTION_MAP = {
    "34067-9": SectionCategory.INDICATION,
    "34084-4": SectionCategory.ADVERSE_EVENT,
    "34066-1": SectionCategory.BOXED_WARNING,
}


@dataclass(frozen=True)
class LabelSection:
    category: SectionCategory
    source_code: str
    text: str


@dataclass(frozen=True)
class SplDocument:
    set_id: str
    doc_version: int
    effective_date: datetime.date
    ndc_codes: frozenset[str]
    sections: tuple[LabelSection, ...]

    def section(self, category: SectionCategory) -> LabelSection | None:
        for s in self.sections:
            if s.category is category:
                return s
        return None


def _collapse(s: str) -> str:
    return _WS.sub(" ", s).strip()


def strip_markup(elem: ET.Element) -> str:
    """Flatten an element to plain text.

    Descendant text nodes concatenate in document order; list items are
    joined with "; " and table cells with single spaces; all other runs of
    whitespace collapse to one space.
    """
    return _collapse(_render(elem))


def _render(elem: ET.Element) -> str:
    if elem.tag == "list":
        items = [_collapse(_render(c)) for c in elem if c.tag == "item"]
        return "; ".join(i for i in items if i)
    if elem.tag == "table":
        rows = []
        for row in elem:
            cells = [_collapse(_render(c)) for c in row]
            rows.append(" ".join(c for c in cells if c))
        return " ".join(r for r in rows if r)
    parts = [elem.text or ""]
    for child in elem:
        parts.append(_render(child))
        parts.append(child.tail or "")
    return "".join(parts)


def parse_spl(
    xml_bytes: bytes,
    section_map: dict[str, SectionCategory] | None = None,
) -> SplDocument:
    """Parse one label document.

    Sections whose code is absent from ``section_map`` are ignored; sections
    that flatten to empty text are dropped. Two sections mapping to the same
    category signal a corrupt label.
    """
    if section_map is None:
        section_map = DEFAULT_SECTION_MAP

    m = _ENCODING_DECL.search(xml_bytes[:200])
    if m and m.group(1).lower().replace(b"_", b"-") not in (b"utf-8", b"utf8"):
        raise MalformedXml(f"unsupported encoding {m.group(1)!r}; labels must be UTF-8")
    try:
        root = ET.fromstring(xml_bytes)
    except ET.ParseError as exc:
        raise MalformedXml(str(exc)) from exc

    set_id = (root.get("set-id") or "").strip()
    if not set_id:
        raise MissingSetId("label has no set-id attribute")

    try:
        version = int(root.get("version", ""))
        if version < 1:
            raise ValueError
    except ValueError:
        raise MalformedXml(f"bad version attribute {root.get('version')!r}") from None

    try:
        effective = datetime.date.fromisoformat(root.get("effective-date", ""))
    except ValueError:
        raise MalformedXml(
            f"bad effective-date attribute {root.get('effective-date')!r}"
        ) from None

    ndc_codes = set()
    for ndc_el in root.iter("ndc"):
        ndc_codes.add(normalize_ndc((ndc_el.text or "").strip()))

    sections: list[LabelSection] = []
    seen: set[SectionCategory] = set()
    for sec in root.iter("section"):
        code = (sec.get("code") or "").strip()
        category = section_map.get(code)
        if category is None:
            continue
        if category in seen:
            raise DuplicateSection(f"two sections map to {category.value}")
        seen.add(category)
        text = strip_markup(sec)
        if text:
            sections.append(LabelSection(category=category, source_code=code, text=text))

    return SplDocument(
        set_id=set_id,
        doc_version=version,
        effective_date=effective,
        ndc_codes=frozenset(ndc_codes),
        sections=tuple(sections),
    )


def load_section_map(path) -> dict[str, SectionCategory]:
    """Read a two-column ``code<TAB>category`` file."""
    table: dict[str, SectionCategory] = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            code, _, cat = line.partition("\t")
            table[code.strip()] = SectionCategory(cat.strip())
    return table


def newest_versions(docs: list[SplDocument]) -> list[SplDocument]:
    """Keep only the highest doc_version per set_id."""
    best: dict[str, SplDocument] = {}
    for doc in docs:
        cur = best.get(doc.set_id)
        if cur is None or doc.doc_version > cur.doc_version:
            best[doc.set_id] = doc
    return [best[k] for k in sorted(best)]
