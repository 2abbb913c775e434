"""Safety-related labeling change ingestion and event date stamping."""

from __future__ import annotations

import datetime
import json
import os
from dataclasses import dataclass, replace

from .errors import MalformedRecord, MissingFile
from .spl_parser import SectionCategory


@dataclass(frozen=True)
class SrlcRecord:
    set_id: str
    category: SectionCategory
    change_date: datetime.date
    pt_code: str | None = None
    description: str = ""


def load_srlc(path) -> list[SrlcRecord]:
    """Parse a JSON-lines SrLC file; invalid lines abort with their number."""
    if not os.path.exists(path):
        raise MissingFile(str(path))
    records = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                record = SrlcRecord(
                    set_id=obj["set_id"],
                    category=SectionCategory(obj["category"]),
                    change_date=datetime.date.fromisoformat(obj["change_date"]),
                    pt_code=obj.get("pt_code"),
                    description=obj.get("description", ""),
                )
            except (json.JSONDecodeError, KeyError, ValueError, TypeError) as exc:
                raise MalformedRecord(line_no, str(exc)) from None
            records.append(record)
    return records


def apply_srlc(events, records: list[SrlcRecord]):
    """Stamp events with the earliest matching change date.

    A record matches an event on (set_id, category) against the event's
    provenance, and on pt_code when the record carries one; records without a
    pt_code broadcast to every PT in that label section. Only srlc_date
    changes; events are never added or removed.
    """
    stamped = []
    for event in events:
        best = event.srlc_date
        prov_set_ids = {set_id for set_id, _version, _span in event.provenance}
        for record in records:
            if record.set_id not in prov_set_ids:
                continue
            if record.category is not event.category:
                continue
            if record.pt_code is not None and record.pt_code != event.pt_code:
                continue
            if best is None or record.change_date < best:
                best = record.change_date
        stamped.append(event if best == event.srlc_date else replace(event, srlc_date=best))
    return stamped
