import datetime

import pytest

from pvlens.errors import StorageFailure
from pvlens.repository import EventRepository, LabeledEvent, import_jsonl
from pvlens.spl_parser import SectionCategory

RUN_DATE = datetime.date(2025, 1, 15)
LATER = datetime.date(2025, 2, 1)


def event(sub="S1", pt="P1", category=SectionCategory.ADVERSE_EVENT, spans=((0, 4),), srlc=None):
    return LabeledEvent(
        substance_id=sub,
        pt_code=pt,
        category=category,
        substance_name="Drugone",
        provenance=tuple(("G1", 1, span) for span in spans),
        srlc_date=srlc,
    )


@pytest.fixture
def repo(tmp_path):
    with EventRepository(tmp_path / "events.db") as r:
        yield r


def three_events():
    return [event(pt="P1"), event(pt="P2"), event(pt="P3", category=SectionCategory.INDICATION)]


def test_insert_into_empty(repo):
    report = repo.merge_run(three_events(), RUN_DATE)
    assert (report.inserted, report.updated, report.not_reconfirmed) == (3, 0, 0)
    stored = repo.all_events()
    assert len(stored) == 3
    assert all(e.first_seen_date == e.last_seen_date == RUN_DATE for e in stored)


def test_merge_same_run_twice(repo):
    repo.merge_run(three_events(), RUN_DATE)
    before = repo.export("jsonl")
    report = repo.merge_run(three_events(), RUN_DATE)
    assert (report.inserted, report.updated, report.not_reconfirmed) == (0, 3, 0)
    assert repo.export("jsonl") == before  # content-idempotent


def test_missing_event_flagged_not_deleted(repo):
    repo.merge_run(three_events(), RUN_DATE)
    report = repo.merge_run(three_events()[:2], LATER)
    assert (report.inserted, report.updated, report.not_reconfirmed) == (0, 2, 1)
    # oracle: set difference over keys
    assert report.not_reconfirmed_keys == (("S1", "P3", "indication"),)
    assert len(repo.all_events()) == 3  # monotone key set


def test_last_seen_advances_first_seen_stable(repo):
    repo.merge_run([event()], RUN_DATE)
    repo.merge_run([event()], LATER)
    stored = repo.all_events()[0]
    assert stored.first_seen_date == RUN_DATE
    assert stored.last_seen_date == LATER


def test_provenance_appended_and_deduplicated(repo):
    repo.merge_run([event(spans=[(0, 4)])], RUN_DATE)
    repo.merge_run([event(spans=[(0, 4), (9, 13)])], LATER)
    stored = repo.all_events()[0]
    assert stored.provenance == (("G1", 1, (0, 4)), ("G1", 1, (9, 13)))


def test_earliest_srlc_date_kept(repo):
    repo.merge_run([event(srlc=datetime.date(2023, 5, 1))], RUN_DATE)
    repo.merge_run([event(srlc=datetime.date(2022, 1, 1))], LATER)
    assert repo.all_events()[0].srlc_date == datetime.date(2022, 1, 1)
    repo.merge_run([event(srlc=None)], LATER)
    assert repo.all_events()[0].srlc_date == datetime.date(2022, 1, 1)


def test_duplicate_run_keys_rejected(repo):
    with pytest.raises(StorageFailure):
        repo.merge_run([event(), event()], RUN_DATE)


def test_export_csv_sorted(repo):
    repo.merge_run([event(sub="S2"), event(sub="S1")], RUN_DATE)
    lines = repo.export("csv").splitlines()
    assert lines[0].startswith("substance_id,substance_name,pt_code,category")
    assert len(lines) == 3
    assert lines[1].startswith("S1,") and lines[2].startswith("S2,")


def test_export_empty_csv(repo):
    assert repo.export("csv").splitlines() == [
        "substance_id,substance_name,pt_code,category,first_seen_date,last_seen_date,srlc_date"
    ]


def test_export_deterministic(repo):
    repo.merge_run(three_events(), RUN_DATE)
    assert repo.export("csv") == repo.export("csv")
    assert repo.export("jsonl") == repo.export("jsonl")


def test_jsonl_round_trip(repo, tmp_path):
    repo.merge_run(three_events(), RUN_DATE)
    exported = repo.export("jsonl")
    with EventRepository(tmp_path / "copy.db") as copy:
        import_jsonl(copy, exported)
        assert copy.export("jsonl") == exported
        assert copy.export("csv") == repo.export("csv")
