"""Batch orchestration: parse, map, extract, stamp and merge a directory of
labels with a worker pool. Output is independent of worker count and input
ordering."""

from __future__ import annotations

import datetime
import glob
import multiprocessing
import os
import time
from dataclasses import dataclass, field

from .errors import PvlensError, UnmappedLabel
from .ident_map import resolve_ndc, resolve_substance
from .matcher import build_automaton, distinct_events, extract_terms
from .repository import EventRepository, LabeledEvent, MergeReport
from .spl_parser import (
    DEFAULT_SECTION_MAP,
    SectionCategory,
    load_section_map,
    parse_spl,
)
from .srlc_tracker import apply_srlc, load_srlc
from .term_store import (
    SemanticTypeFilter,
    StopwordList,
    load_semantic_filter,
    load_stopwords,
    load_terminology,
)


@dataclass(frozen=True)
class RunConfig:
    input_dir: str
    terminology_dir: str
    repo_path: str
    srlc_file: str | None = None
    worker_count: int = 1
    stopword_file: str | None = None
    semtype_file: str | None = None
    section_map_file: str | None = None
    run_date: datetime.date | None = None


@dataclass
class RunReport:
    labels_processed: int = 0
    labels_skipped: dict[str, str] = field(default_factory=dict)  # file -> reason
    distinct_substances: int = 0
    distinct_pts: int = 0
    unmapped_labels: int = 0
    merge: MergeReport | None = None
    wall_time_s: float = 0.0

    @property
    def skipped_count(self) -> int:
        return len(self.labels_skipped)

    def as_dict(self) -> dict:
        return {
            "labels_processed": self.labels_processed,
            "labels_skipped": dict(sorted(self.labels_skipped.items())),
            "distinct_substances": self.distinct_substances,
            "distinct_pts": self.distinct_pts,
            "unmapped_labels": self.unmapped_labels,
            "merge": None
            if self.merge is None
            else {
                "inserted": self.merge.inserted,
                "updated": self.merge.updated,
                "not_reconfirmed": self.merge.not_reconfirmed,
            },
            "wall_time_s": round(self.wall_time_s, 3),
        }


@dataclass(frozen=True)
class LabelResult:
    path: str
    set_id: str = ""
    doc_version: int = 0
    # (substance_id, substance_name, pt_code, category_value, span)
    rows: tuple[tuple[str, str, str, str, tuple[int, int]], ...] = ()
    skip_reason: str | None = None


# Shared read-only state, inherited by forked workers.
_WORKER_STATE: dict = {}


def _process_label(path: str) -> LabelResult:
    state = _WORKER_STATE
    try:
        with open(path, "rb") as fh:
            doc = parse_spl(fh.read(), state["section_map"])
    except PvlensError as exc:
        return LabelResult(path=path, skip_reason=type(exc).__name__)
    try:
        substances = resolve_substance(doc.set_id, state["store"])
    except UnmappedLabel:
        return LabelResult(
            path=path,
            set_id=doc.set_id,
            doc_version=doc.doc_version,
            skip_reason="UnmappedLabel",
        )
    for ndc in doc.ndc_codes:
        resolve_ndc(ndc, state["store"])  # crosswalk validation only
    rows = []
    for section in doc.sections:
        matches = extract_terms(
            section,
            state["automaton"],
            state["store"],
            state["stopwords"],
            state["semantic_filter"],
        )
        for (pt_code, category), span_matches in sorted(
            distinct_events(matches).items(), key=lambda kv: (kv[0][0], kv[0][1].value)
        ):
            for substance in substances:
                for m in span_matches:
                    rows.append(
                        (
                            substance.substance_id,
                            substance.substance_name,
                            pt_code,
                            category.value,
                            m.span,
                        )
                    )
    return LabelResult(
        path=path, set_id=doc.set_id, doc_version=doc.doc_version, rows=tuple(rows)
    )


def run_pipeline(config: RunConfig) -> RunReport:
    """Run steps 1-6 over every ``*.xml`` file in the input directory."""
    started = time.monotonic()
    report = RunReport()

    store = load_terminology(config.terminology_dir)
    automaton = build_automaton(store)
    stopwords = (
        load_stopwords(config.stopword_file) if config.stopword_file else StopwordList()
    )
    semantic_filter = (
        load_semantic_filter(config.semtype_file)
        if config.semtype_file
        else SemanticTypeFilter()
    )
    section_map = (
        load_section_map(config.section_map_file)
        if config.section_map_file
        else DEFAULT_SECTION_MAP
    )

    paths = sorted(glob.glob(os.path.join(config.input_dir, "*.xml")))

    global _WORKER_STATE
    _WORKER_STATE = {
        "store": store,
        "automaton": automaton,
        "stopwords": stopwords,
        "semantic_filter": semantic_filter,
        "section_map": section_map,
    }
    try:
        if config.worker_count > 1 and len(paths) > 1:
            ctx = multiprocessing.get_context("fork")
            with ctx.Pool(config.worker_count) as pool:
                results = pool.map(_process_label, paths, chunksize=8)
        else:
            results = [_process_label(p) for p in paths]
    finally:
        _WORKER_STATE = {}

    # Only the newest version of each set_id proceeds.
    newest: dict[str, LabelResult] = {}
    for res in results:
        if res.skip_reason is not None and not res.set_id:
            report.labels_skipped[os.path.basename(res.path)] = res.skip_reason
            continue
        cur = newest.get(res.set_id)
        if cur is None or res.doc_version > cur.doc_version:
            if cur is not None:
                report.labels_skipped[os.path.basename(cur.path)] = "SupersededVersion"
            newest[res.set_id] = res
        else:
            report.labels_skipped[os.path.basename(res.path)] = "SupersededVersion"

    grouped: dict[tuple[str, str, str], dict] = {}
    for res in newest.values():
        if res.skip_reason is not None:
            report.labels_skipped[os.path.basename(res.path)] = res.skip_reason
            if res.skip_reason == "UnmappedLabel":
                report.unmapped_labels += 1
            continue
        report.labels_processed += 1
        for substance_id, name, pt_code, category, span in res.rows:
            entry = grouped.setdefault(
                (substance_id, pt_code, category),
                {"name": name, "provenance": set()},
            )
            entry["provenance"].add((res.set_id, res.doc_version, span))

    events = [
        LabeledEvent(
            substance_id=substance_id,
            pt_code=pt_code,
            category=SectionCategory(category),
            substance_name=info["name"],
            provenance=tuple(sorted(info["provenance"])),
        )
        for (substance_id, pt_code, category), info in sorted(grouped.items())
    ]

    if config.srlc_file:
        events = apply_srlc(events, load_srlc(config.srlc_file))

    repo = EventRepository(config.repo_path)
    try:
        run_date = config.run_date or datetime.date.today()
        report.merge = repo.merge_run(events, run_date)
    finally:
        repo.close()

    report.distinct_substances = len({e.substance_id for e in events})
    report.distinct_pts = len({e.pt_code for e in events})
    report.wall_time_s = time.monotonic() - started
    return report


@dataclass(frozen=True)
class BenchReport:
    label_count: int
    worker_count: int
    wall_time_s: float

    @property
    def labels_per_second(self) -> float:
        return self.label_count / self.wall_time_s if self.wall_time_s else float("inf")


def benchmark(work_dir, count: int, workers: int, seed: int = 0) -> BenchReport:
    """Generate a seeded synthetic corpus and time an end-to-end run."""
    from .synth import make_dataset

    term_dir = os.path.join(work_dir, "terms")
    label_dir = os.path.join(work_dir, "labels")
    make_dataset(term_dir, label_dir, count, seed=seed)
    config = RunConfig(
        input_dir=label_dir,
        terminology_dir=term_dir,
        repo_path=os.path.join(work_dir, "bench.db"),
        worker_count=workers,
        stopword_file=os.path.join(term_dir, "stopwords.txt"),
        run_date=datetime.date(2025, 1, 1),
    )
    started = time.monotonic()
    run_pipeline(config)
    elapsed = time.monotonic() - started
    return BenchReport(label_count=count, worker_count=workers, wall_time_s=elapsed)
