"""Label-to-substance and NDC-to-code resolution."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import MalformedNdc, UnmappedLabel


@dataclass(frozen=True)
class SubstanceRecord:
    substance_id: str
    substance_name: str
    rxnorm_code: str | None = None
    snomed_code: str | None = None
    set_ids: frozenset[str] = field(default_factory=frozenset)
    ndc_codes: frozenset[str] = field(default_factory=frozenset)


def normalize_ndc(raw: str) -> str:
    """Normalize an NDC to the 11-digit hyphenless 5-4-2 form.

    Hyphenated input must have three segments no wider than 5-4-2; each is
    zero-padded. Hyphenless input must already be 11 digits.
    """
    raw = raw.strip()
    if "-" in raw:
        segments = raw.split("-")
        if len(segments) != 3:
            raise MalformedNdc(f"{raw!r}: expected 3 hyphenated segments")
        widths = (5, 4, 2)
        out = []
        for seg, width in zip(segments, widths):
            if not seg.isdigit() or len(seg) > width:
                raise MalformedNdc(f"{raw!r}: segment {seg!r} does not fit {width} digits")
            out.append(seg.zfill(width))
        return "".join(out)
    if len(raw) == 11 and raw.isdigit():
        return raw
    raise MalformedNdc(f"{raw!r}: expected 11 digits or a 3-segment hyphenated code")


def resolve_substance(set_id: str, store) -> list[SubstanceRecord]:
    """Join a label set_id to its substance rows.

    Combination products map one set_id to several substances; one record per
    substance is returned, each aggregating every set_id known for it.
    """
    rows = store.mthspl.get(set_id)
    if not rows:
        raise UnmappedLabel(f"set_id {set_id!r} absent from mthspl")
    records = []
    for substance_id, name in rows:
        records.append(
            SubstanceRecord(
                substance_id=substance_id,
                substance_name=name,
                set_ids=frozenset(store.substance_set_ids.get(substance_id, {set_id})),
            )
        )
    return records


def resolve_ndc(ndc: str, store) -> tuple[str | None, str | None]:
    """Look up the RxNorm and SNOMED codes for a normalized NDC."""
    ndc = normalize_ndc(ndc)
    return store.ndc_map.get(ndc, (None, None))
