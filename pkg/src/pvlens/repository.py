"""Durable labeled-event repository with idempotent cross-run merges.

Storage is a single SQLite file; schema in docs/formats.md. The contract is
single-writer / multi-reader: merges are serialized, exports only read.
"""

from __future__ import annotations

import csv
import datetime
import io
import json
import sqlite3
from dataclasses import dataclass, field

from .errors import StorageFailure
from .spl_parser import SectionCategory

Provenance = tuple[str, int, tuple[int, int]]  # (set_id, doc_version, span)


@dataclass(frozen=True)
class LabeledEvent:
    substance_id: str
    pt_code: str
    category: SectionCategory
    provenance: tuple[Provenance, ...]
    substance_name: str = ""
    first_seen_date: datetime.date | None = None
    last_seen_date: datetime.date | None = None
    srlc_date: datetime.date | None = None

    @property
    def key(self) -> tuple[str, str, str]:
        return (self.substance_id, self.pt_code, self.category.value)


@dataclass(frozen=True)
class MergeReport:
    inserted: int
    updated: int
    not_reconfirmed: int
    not_reconfirmed_keys: tuple[tuple[str, str, str], ...] = ()


_SCHEMA = """
CREATE TABLE IF NOT EXISTS events (
    substance_id TEXT NOT NULL,
    pt_code TEXT NOT NULL,
    category TEXT NOT NULL,
    substance_name TEXT NOT NULL DEFAULT '',
    first_seen_date TEXT NOT NULL,
    last_seen_date TEXT NOT NULL,
    srlc_date TEXT,
    PRIMARY KEY (substance_id, pt_code, category)
);
CREATE TABLE IF NOT EXISTS provenance (
    substance_id TEXT NOT NULL,
    pt_code TEXT NOT NULL,
    category TEXT NOT NULL,
    set_id TEXT NOT NULL,
    doc_version INTEGER NOT NULL,
    span_start INTEGER NOT NULL,
    span_end INTEGER NOT NULL,
    UNIQUE (substance_id, pt_code, category, set_id, doc_version, span_start, span_end)
);
"""

CSV_HEADER = [
    "substance_id",
    "substance_name",
    "pt_code",
    "category",
    "first_seen_date",
    "last_seen_date",
    "srlc_date",
]


class EventRepository:
    def __init__(self, path):
        self.path = str(path)
        try:
            self._conn = sqlite3.connect(self.path)
            self._conn.executescript(_SCHEMA)
            self._conn.commit()
        except sqlite3.Error as exc:
            raise StorageFailure(f"cannot open repository {self.path}: {exc}") from exc

    def close(self):
        self._conn.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc_info):
        self.close()

    def merge_run(self, run_events: list[LabeledEvent], run_date: datetime.date) -> MergeReport:
        """Merge one pipeline run.

        New keys are inserted with first_seen = last_seen = run_date; known
        keys have last_seen advanced and provenance appended (deduplicated).
        Events already stored but absent from the run are never deleted; they
        are flagged not_reconfirmed in the report.
        """
        keys = [e.key for e in run_events]
        if len(set(keys)) != len(keys):
            raise StorageFailure("run_events not deduplicated on (substance, pt, category)")
        run_iso = run_date.isoformat()
        cur = self._conn.cursor()
        try:
            existing = {
                (s, p, c): (first, srlc)
                for s, p, c, first, srlc in cur.execute(
                    "SELECT substance_id, pt_code, category, first_seen_date, srlc_date FROM events"
                )
            }
            inserted = updated = 0
            for event in run_events:
                srlc_iso = event.srlc_date.isoformat() if event.srlc_date else None
                if event.key in existing:
                    prior_srlc = existing[event.key][1]
                    if srlc_iso is None:
                        srlc_iso = prior_srlc
                    elif prior_srlc is not None:
                        srlc_iso = min(srlc_iso, prior_srlc)
                    cur.execute(
                        "UPDATE events SET last_seen_date = ?, srlc_date = ?, substance_name = ?"
                        " WHERE substance_id = ? AND pt_code = ? AND category = ?",
                        (run_iso, srlc_iso, event.substance_name, *event.key),
                    )
                    updated += 1
                else:
                    cur.execute(
                        "INSERT INTO events VALUES (?, ?, ?, ?, ?, ?, ?)",
                        (*event.key, event.substance_name, run_iso, run_iso, srlc_iso),
                    )
                    inserted += 1
                for set_id, doc_version, (start, end) in event.provenance:
                    cur.execute(
                        "INSERT OR IGNORE INTO provenance VALUES (?, ?, ?, ?, ?, ?, ?)",
                        (*event.key, set_id, doc_version, start, end),
                    )
            missing = sorted(set(existing) - set(keys))
            self._conn.commit()
        except sqlite3.Error as exc:
            self._conn.rollback()
            raise StorageFailure(str(exc)) from exc
        return MergeReport(
            inserted=inserted,
            updated=updated,
            not_reconfirmed=len(missing),
            not_reconfirmed_keys=tuple(missing),
        )

    def all_events(self) -> list[LabeledEvent]:
        cur = self._conn.cursor()
        prov: dict[tuple, list[Provenance]] = {}
        for s, p, c, set_id, ver, start, end in cur.execute(
            "SELECT * FROM provenance ORDER BY set_id, doc_version, span_start, span_end"
        ):
            prov.setdefault((s, p, c), []).append((set_id, ver, (start, end)))
        events = []
        for s, p, c, name, first, last, srlc in cur.execute(
            "SELECT * FROM events ORDER BY substance_id, category, pt_code"
        ):
            events.append(
                LabeledEvent(
                    substance_id=s,
                    pt_code=p,
                    category=SectionCategory(c),
                    substance_name=name,
                    first_seen_date=datetime.date.fromisoformat(first),
                    last_seen_date=datetime.date.fromisoformat(last),
                    srlc_date=datetime.date.fromisoformat(srlc) if srlc else None,
                    provenance=tuple(prov.get((s, p, c), ())),
                )
            )
        return events

    def export(self, fmt: str) -> str:
        """Render the repository deterministically as csv or jsonl text."""
        events = self.all_events()  # already sorted (substance, category, pt)
        if fmt == "csv":
            buf = io.StringIO()
            writer = csv.writer(buf, lineterminator="\n")
            writer.writerow(CSV_HEADER)
            for e in events:
                writer.writerow(
                    [
                        e.substance_id,
                        e.substance_name,
                        e.pt_code,
                        e.category.value,
                        e.first_seen_date.isoformat(),
                        e.last_seen_date.isoformat(),
                        e.srlc_date.isoformat() if e.srlc_date else "",
                    ]
                )
            return buf.getvalue()
        if fmt == "jsonl":
            lines = []
            for e in events:
                lines.append(
                    json.dumps(
                        {
                            "substance_id": e.substance_id,
                            "substance_name": e.substance_name,
                            "pt_code": e.pt_code,
                            "category": e.category.value,
                            "first_seen_date": e.first_seen_date.isoformat(),
                            "last_seen_date": e.last_seen_date.isoformat(),
                            "srlc_date": e.srlc_date.isoformat() if e.srlc_date else None,
                            "provenance": [
                                {
                                    "set_id": set_id,
                                    "doc_version": ver,
                                    "span": [start, end],
                                }
                                for set_id, ver, (start, end) in e.provenance
                            ],
                        },
                        sort_keys=True,
                    )
                )
            return "".join(line + "\n" for line in lines)
        raise ValueError(f"unknown export format {fmt!r}")

    def export_to(self, path, fmt: str):
        text = self.export(fmt)
        try:
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise StorageFailure(str(exc)) from exc


def import_jsonl(repo: EventRepository, text: str, run_date: datetime.date | None = None):
    """Rebuild repository content from a jsonl export (round-trip support)."""
    cur = repo._conn.cursor()
    for line in text.splitlines():
        if not line.strip():
            continue
        obj = json.loads(line)
        cur.execute(
            "INSERT OR REPLACE INTO events VALUES (?, ?, ?, ?, ?, ?, ?)",
            (
                obj["substance_id"],
                obj["pt_code"],
                obj["category"],
                obj["substance_name"],
                obj["first_seen_date"],
                obj["last_seen_date"],
                obj["srlc_date"],
            ),
        )
        for p in obj["provenance"]:
            cur.execute(
                "INSERT OR IGNORE INTO provenance VALUES (?, ?, ?, ?, ?, ?, ?)",
                (
                    obj["substance_id"],
                    obj["pt_code"],
                    obj["category"],
                    p["set_id"],
                    p["doc_version"],
                    p["span"][0],
                    p["span"][1],
                ),
            )
    repo._conn.commit()
