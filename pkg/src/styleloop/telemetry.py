"""Append-only event log, session analytics, and snapshot persistence.

The log is the source of truth: folding it over an empty state reproduces the
snapshot (see workspace.replay_state). Analytics mirror the shape of session
instrumentation: per-type counts with optional first/second-half splits, and
lane-structured timelines for plotting.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Mapping, Optional

from .errors import InvalidRequest, UnknownEventType, UnknownSession
from .model import (
    ContextProfile,
    Document,
    EventRecord,
    EventType,
    Highlight,
    Settings,
    StyleHistoryEntry,
)

SNAPSHOT_SCHEMA_VERSION = 1


class EventLog:
    """Strictly ordered, append-only record of every mutation.

    Sequence numbers are dense and 1-based; timestamps never decrease. With a
    ``path`` the log also appends one JSON line per event, never rewriting.
    """

    def __init__(self, clock: Callable[[], float] = time.time, path: str | Path | None = None):
        self.clock = clock
        self.path = Path(path) if path else None
        self._records: list[EventRecord] = []
        self._sessions: set[str] = set()

    def register_session(self, session_id: str) -> None:
        self._sessions.add(session_id)

    def append_event(
        self, *, session_id: str, type: EventType, payload: Mapping[str, Any]
    ) -> EventRecord:
        if not isinstance(type, EventType):
            try:
                type = EventType(type)
            except ValueError:
                raise UnknownEventType(str(type)) from None
        timestamp = self.clock()
        if self._records and timestamp < self._records[-1].timestamp:
            timestamp = self._records[-1].timestamp
        record = EventRecord(
            seq=len(self._records) + 1,
            timestamp=timestamp,
            session_id=session_id,
            type=type,
            payload=dict(payload),
        )
        self._records.append(record)
        self._sessions.add(session_id)
        if self.path is not None:
            with self.path.open("a", encoding="utf-8") as fh:
                fh.write(json.dumps(record.to_dict(), ensure_ascii=False) + "\n")
        return record

    def append(self, record: EventRecord) -> int:
        appended = self.append_event(
            session_id=record.session_id, type=record.type, payload=record.payload
        )
        return appended.seq

    def replay(self, from_seq: int = 0) -> list[EventRecord]:
        return [r for r in self._records if r.seq >= from_seq]

    def __len__(self) -> int:
        return len(self._records)

    def _session_records(self, session_id: str) -> list[EventRecord]:
        if session_id not in self._sessions:
            raise UnknownSession(session_id)
        return [r for r in self._records if r.session_id == session_id]

    def task_span(self, session_id: str) -> Optional[tuple[float, float]]:
        records = self._session_records(session_id)
        if not records:
            return None
        return records[0].timestamp, records[-1].timestamp

    def summarize_counts(self, session_id: str, split: Optional[str] = None) -> dict[str, Any]:
        """Per-type counts for a session, optionally split at the temporal
        midpoint of the task span. An event exactly at the midpoint counts in
        the second half."""
        if split not in (None, "halves"):
            raise InvalidRequest(f"unsupported split: {split!r}")
        records = self._session_records(session_id)
        result: dict[str, Any] = {
            "session_id": session_id,
            "events": _count_by_type(records),
            "page_views": _count_page_views(records),
            "task_span": list(self.task_span(session_id) or ()) or None,
        }
        if split == "halves":
            span = self.task_span(session_id)
            if span is None:
                first: list[EventRecord] = []
                second: list[EventRecord] = []
            else:
                midpoint = (span[0] + span[1]) / 2
                first = [r for r in records if r.timestamp < midpoint]
                second = [r for r in records if r.timestamp >= midpoint]
            result["halves"] = {
                "first": {"events": _count_by_type(first), "page_views": _count_page_views(first)},
                "second": {"events": _count_by_type(second), "page_views": _count_page_views(second)},
            }
        return result

    def export_timeline(self, session_id: str) -> "TimelineExport":
        records = self._session_records(session_id)
        lanes: dict[str, list[tuple[float, dict[str, Any]]]] = {t.value: [] for t in EventType}
        for record in records:
            lanes[record.type.value].append((record.timestamp, dict(record.payload)))
        return TimelineExport(
            session_id=session_id,
            lanes={lane: events for lane, events in lanes.items() if events},
            task_span=self.task_span(session_id),
        )

    def timeline_dsv(self, session_id: str) -> str:
        """Tab-separated timeline rows for external plotting tools."""
        records = self._session_records(session_id)
        lines = ["session_id\tlane\tseq\ttimestamp\tpayload"]
        for record in records:
            payload = json.dumps(dict(record.payload), sort_keys=True, ensure_ascii=False)
            lines.append(
                f"{record.session_id}\t{record.type.value}\t{record.seq}\t{record.timestamp}\t{payload}"
            )
        return "\n".join(lines) + "\n"


def _count_by_type(records: list[EventRecord]) -> dict[str, int]:
    counts = {t.value: 0 for t in EventType}
    for record in records:
        counts[record.type.value] += 1
    return counts


def _count_page_views(records: list[EventRecord]) -> dict[str, int]:
    views: dict[str, int] = {}
    for record in records:
        if record.type is EventType.PAGE_VIEW:
            page = str(record.payload.get("page", "unknown"))
            views[page] = views.get(page, 0) + 1
    return views


@dataclass(frozen=True)
class TimelineExport:
    session_id: str
    lanes: Mapping[str, list[tuple[float, dict[str, Any]]]]
    task_span: Optional[tuple[float, float]]

    def to_dict(self) -> dict[str, Any]:
        return {
            "session_id": self.session_id,
            "lanes": {
                lane: [[ts, payload] for ts, payload in events]
                for lane, events in self.lanes.items()
            },
            "task_span": list(self.task_span) if self.task_span else None,
        }


@dataclass(frozen=True)
class Snapshot:
    schema_version: int
    session_id: str
    documents: list[Document]
    style_history: list[StyleHistoryEntry]
    highlights: list[Highlight]
    context: ContextProfile
    settings: Settings
    exported_at: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "schema_version": self.schema_version,
            "session_id": self.session_id,
            "documents": [d.to_dict() for d in self.documents],
            "style_history": [e.to_dict() for e in self.style_history],
            "highlights": [h.to_dict() for h in self.highlights],
            "context": self.context.to_dict(),
            "settings": self.settings.to_dict(),
            "exported_at": self.exported_at,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "Snapshot":
        return cls(
            schema_version=int(data["schema_version"]),
            session_id=data["session_id"],
            documents=[Document.from_dict(d) for d in data["documents"]],
            style_history=[StyleHistoryEntry.from_dict(e) for e in data["style_history"]],
            highlights=[Highlight.from_dict(h) for h in data["highlights"]],
            context=ContextProfile.from_dict(data["context"]),
            settings=Settings.from_dict(data["settings"]),
            exported_at=float(data["exported_at"]),
        )


def save_snapshot(path: str | Path, snapshot: Snapshot) -> None:
    Path(path).write_text(
        json.dumps(snapshot.to_dict(), sort_keys=True, ensure_ascii=False, indent=2),
        encoding="utf-8",
    )


def load_snapshot(path: str | Path) -> Snapshot:
    return Snapshot.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def load_events(path: str | Path) -> list[EventRecord]:
    records = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.strip():
            records.append(EventRecord.from_dict(json.loads(line)))
    return records
