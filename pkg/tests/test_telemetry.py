from __future__ import annotations

import json

import pytest

from styleloop import richtext
from styleloop.errors import UnknownEventType, UnknownSession
from styleloop.model import (
    ContextProfile,
    Document,
    EventType,
    Highlight,
    Polarity,
    Settings,
    StyleHistoryEntry,
    default_style,
)
from styleloop.telemetry import (
    EventLog,
    Snapshot,
    SNAPSHOT_SCHEMA_VERSION,
    load_events,
    load_snapshot,
    save_snapshot,
)

from conftest import FakeClock


def make_log() -> EventLog:
    log = EventLog(clock=FakeClock())
    log.register_session("s1")
    return log


def emit(log: EventLog, type: EventType, session_id: str = "s1", **payload) -> None:
    log.append_event(session_id=session_id, type=type, payload=payload)


def test_sequence_numbers_are_dense_and_increasing() -> None:
    log = make_log()
    for _ in range(3):
        emit(log, EventType.PAGE_VIEW, page="home")
    seqs = [r.seq for r in log.replay()]
    assert seqs == [1, 2, 3]


def test_replay_returns_all_records_in_order() -> None:
    log = make_log()
    for i in range(5):
        emit(log, EventType.PAGE_VIEW, page="home", i=i)
    records = log.replay(0)
    assert len(records) == 5
    assert [r.payload["i"] for r in records] == [0, 1, 2, 3, 4]
    assert [r.seq for r in log.replay(4)] == [4, 5]


def test_unknown_event_type_rejected() -> None:
    log = make_log()
    with pytest.raises(UnknownEventType):
        log.append_event(session_id="s1", type="not_a_type", payload={})  # type: ignore[arg-type]


def test_timestamps_never_decrease() -> None:
    class JitterClock:
        def __init__(self) -> None:
            self.values = iter([10.0, 9.0, 12.0])

        def __call__(self) -> float:
            return next(self.values)

    log = EventLog(clock=JitterClock())
    for _ in range(3):
        emit(log, EventType.PAGE_VIEW, page="home")
    stamps = [r.timestamp for r in log.replay()]
    assert stamps == sorted(stamps)


def test_empty_session_counts_are_all_zero() -> None:
    log = make_log()
    counts = log.summarize_counts("s1")
    assert set(counts["events"].values()) == {0}
    assert counts["page_views"] == {}
    assert counts["task_span"] is None


def test_unknown_session_rejected() -> None:
    log = make_log()
    with pytest.raises(UnknownSession):
        log.summarize_counts("ghost")


def test_counts_by_style_update_source_match_hand_built_log() -> None:
    log = make_log()
    # hand-built: 2 automatic updates, 1 direct edit, 1 manual request
    emit(log, EventType.STYLE_UPDATE_AUTOMATIC)
    emit(log, EventType.STYLE_UPDATE_AUTOMATIC)
    emit(log, EventType.STYLE_UPDATE_DIRECT_EDIT)
    emit(log, EventType.STYLE_UPDATE_MANUAL_REQUEST)
    emit(log, EventType.LIKE_ADDED)
    counts = log.summarize_counts("s1")["events"]
    assert counts["style_update_automatic"] == 2
    assert counts["style_update_direct_edit"] == 1
    assert counts["style_update_manual_request"] == 1
    assert counts["like_added"] == 1
    assert counts["dislike_added"] == 0


def test_page_views_counted_per_page() -> None:
    log = make_log()
    emit(log, EventType.PAGE_VIEW, page="style")
    emit(log, EventType.PAGE_VIEW, page="style")
    emit(log, EventType.PAGE_VIEW, page="likes")
    counts = log.summarize_counts("s1")
    assert counts["page_views"] == {"style": 2, "likes": 1}


def test_halves_split_midpoint_goes_to_second_half() -> None:
    # span 11..21, midpoint 16; events at 11 (first), 16 (second), 21 (second)
    class StepClock:
        def __init__(self) -> None:
            self.values = iter([11.0, 16.0, 21.0])

        def __call__(self) -> float:
            return next(self.values)

    log = EventLog(clock=StepClock())
    emit(log, EventType.LIKE_ADDED)
    emit(log, EventType.DISLIKE_ADDED)
    emit(log, EventType.LIKE_ADDED)
    halves = log.summarize_counts("s1", split="halves")["halves"]
    assert halves["first"]["events"]["like_added"] == 1
    assert halves["first"]["events"]["dislike_added"] == 0
    assert halves["second"]["events"]["dislike_added"] == 1
    assert halves["second"]["events"]["like_added"] == 1


def test_halves_counts_sum_to_totals() -> None:
    log = make_log()
    for event_type in (EventType.LIKE_ADDED, EventType.REWRITE, EventType.PAGE_VIEW):
        for _ in range(3):
            emit(log, event_type, **({"page": "home"} if event_type is EventType.PAGE_VIEW else {}))
    summary = log.summarize_counts("s1", split="halves")
    for name, total in summary["events"].items():
        split_sum = (
            summary["halves"]["first"]["events"][name]
            + summary["halves"]["second"]["events"][name]
        )
        assert split_sum == total


def test_timeline_lanes_partition_events() -> None:
    log = make_log()
    emit(log, EventType.REWRITE)
    emit(log, EventType.LIKE_ADDED)
    emit(log, EventType.REWRITE)
    timeline = log.export_timeline("s1")
    total = sum(len(events) for events in timeline.lanes.values())
    assert total == 3
    assert len(timeline.lanes["rewrite"]) == 2
    assert len(timeline.lanes["like_added"]) == 1


def test_timeline_orders_lanes_chronologically() -> None:
    log = make_log()
    emit(log, EventType.REWRITE)
    emit(log, EventType.LIKE_ADDED)
    timeline = log.export_timeline("s1")
    rewrite_ts = timeline.lanes["rewrite"][0][0]
    like_ts = timeline.lanes["like_added"][0][0]
    assert rewrite_ts < like_ts
    assert timeline.task_span == (rewrite_ts, like_ts)


def test_timeline_export_is_stable() -> None:
    log = make_log()
    emit(log, EventType.REWRITE)
    emit(log, EventType.LIKE_ADDED)
    assert log.export_timeline("s1").to_dict() == log.export_timeline("s1").to_dict()


def test_timeline_dsv_has_one_row_per_event() -> None:
    log = make_log()
    emit(log, EventType.REWRITE)
    emit(log, EventType.PAGE_VIEW, page="style")
    dsv = log.timeline_dsv("s1")
    lines = dsv.strip().split("\n")
    assert lines[0] == "session_id\tlane\tseq\ttimestamp\tpayload"
    assert len(lines) == 3
    assert lines[1].split("\t")[1] == "rewrite"


def test_log_file_is_append_only_jsonl(tmp_path) -> None:
    path = tmp_path / "events.jsonl"
    log = EventLog(clock=FakeClock(), path=path)
    emit(log, EventType.PAGE_VIEW, page="home")
    emit(log, EventType.LIKE_ADDED)
    loaded = load_events(path)
    assert [r.type for r in loaded] == [EventType.PAGE_VIEW, EventType.LIKE_ADDED]
    assert [r.seq for r in loaded] == [1, 2]


def test_snapshot_round_trips_through_disk(tmp_path) -> None:
    doc = Document(id="d1", title="T", body=richtext.from_plain("hello\nworld"), created_at=1.0)
    highlight = Highlight(
        id="h1",
        document_id="d1",
        excerpt="hello",
        anchor=(0, 5),
        polarity=Polarity.LIKE,
        reason=None,
        active=True,
        anchor_status=None,
        created_at=2.0,
    )
    snapshot = Snapshot(
        schema_version=SNAPSHOT_SCHEMA_VERSION,
        session_id="s1",
        documents=[doc],
        style_history=[StyleHistoryEntry(seq=1, profile=default_style(), comparison=None)],
        highlights=[highlight],
        context=ContextProfile(body=richtext.from_plain("ctx")),
        settings=Settings(),
        exported_at=3.0,
    )
    path = tmp_path / "snapshot.json"
    save_snapshot(path, snapshot)
    loaded = load_snapshot(path)
    assert loaded == snapshot
    # canonical textual form on disk
    data = json.loads(path.read_text())
    assert data["schema_version"] == SNAPSHOT_SCHEMA_VERSION
    assert data["documents"][0]["id"] == "d1"
