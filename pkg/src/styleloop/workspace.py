"""Single-writer application state tying all modules together.

Every mutation funnels through one re-entrant lock, so commits, counters, and
anchors stay consistent. The workspace also knows how to fold its own event
log back into state (event-sourcing soundness) and how to save/load full
snapshots.
"""

from __future__ import annotations

import threading
import time
import uuid
from dataclasses import dataclass, field
from typing import Any, Callable, Optional

from . import richtext
from .engine import StyleEngine
from .errors import InvalidRequest, UnknownDocument
from .feedback import FeedbackLedger, reanchor_highlight
from .gateway import LlmGateway, MockProvider
from .generation import GenerationService
from .model import (
    ContextProfile,
    Document,
    EventRecord,
    EventType,
    Generation,
    Highlight,
    PAGES,
    Polarity,
    Settings,
    StyleHistoryEntry,
    StyleProfile,
    UpdateOutcome,
)
from .telemetry import EventLog, Snapshot, SNAPSHOT_SCHEMA_VERSION, TimelineExport


class Workspace:
    def __init__(
        self,
        gateway: LlmGateway | None = None,
        *,
        session_id: str | None = None,
        settings: Settings | None = None,
        clock: Callable[[], float] = time.time,
        id_factory: Callable[[], str] | None = None,
        log_path: str | None = None,
        window_chars: int = 2000,
    ):
        self._lock = threading.RLock()
        self.clock = clock
        self.id_factory = id_factory or (lambda: uuid.uuid4().hex)
        self.session_id = session_id or f"session-{uuid.uuid4().hex[:12]}"
        self.settings = settings or Settings()
        self.gateway = gateway or LlmGateway(MockProvider())
        self.events = EventLog(clock=clock, path=log_path)
        self.events.register_session(self.session_id)
        self.documents: dict[str, Document] = {}
        self.context = ContextProfile()
        self.ledger = FeedbackLedger(
            self.gateway,
            self.documents,
            self.events,
            self.session_id,
            clock=clock,
            id_factory=self.id_factory,
        )
        self.engine = StyleEngine(
            self.gateway,
            self.settings,
            self.documents,
            self.events,
            self.session_id,
            summaries=self.ledger.summary_pair,
            clock=clock,
            id_factory=self.id_factory,
        )
        self.generations = GenerationService(
            self.gateway,
            self.documents,
            self.engine,
            context_provider=lambda: richtext.plain_text(self.context.body),
            events=self.events,
            session_id=self.session_id,
            after_insert=self._after_insert,
            window_chars=window_chars,
            clock=clock,
            id_factory=self.id_factory,
        )

    # --- documents ---

    def create_document(self, title: str, body: richtext.RichText | None = None) -> Document:
        with self._lock:
            now = self.clock()
            doc = Document(
                id=self.id_factory(),
                title=title,
                body=body or richtext.RichText(),
                created_at=now,
                updated_at=now,
            )
            self.documents[doc.id] = doc
            self.events.append_event(
                session_id=self.session_id,
                type=EventType.DOCUMENT_CREATED,
                payload={"document": doc.to_dict()},
            )
            return doc

    def get_document(self, document_id: str) -> Document:
        with self._lock:
            doc = self.documents.get(document_id)
            if doc is None:
                raise UnknownDocument(document_id)
            return doc

    def list_documents(self) -> list[Document]:
        with self._lock:
            return list(self.documents.values())

    def update_document(
        self,
        document_id: str,
        *,
        body: richtext.RichText | None = None,
        title: str | None = None,
    ) -> Document:
        """Apply a new body/title; the typed-character delta is derived here
        (server side) from consecutive versions, then counted toward the
        automatic-analysis window."""
        with self._lock:
            doc = self.get_document(document_id)
            old_plain = doc.plain_text()
            if title is not None:
                doc.title = title
            if body is not None:
                doc.body = body
            doc.updated_at = self.clock()
            self.events.append_event(
                session_id=self.session_id,
                type=EventType.DOCUMENT_EDITED,
                payload={
                    "document_id": doc.id,
                    "title": doc.title,
                    "body": richtext.serialize(doc.body),
                },
            )
            delta = richtext.inserted_chars(old_plain, doc.plain_text()) if body is not None else 0
            if body is not None:
                self.ledger.reanchor(document_id)
            trigger = self.engine.register_edit(document_id, delta)
            if trigger is not None:
                self.engine.run_analysis(trigger.document_id, trigger.cause)
            return doc

    def _after_insert(self, document_id: str, output_length: int) -> None:
        self.ledger.reanchor(document_id)
        trigger = self.engine.register_edit(document_id, output_length)
        if trigger is not None:
            self.engine.run_analysis(trigger.document_id, trigger.cause)

    # --- style ---

    def current_style(self) -> StyleProfile:
        with self._lock:
            return self.engine.current

    def style_history(self) -> list[StyleHistoryEntry]:
        with self._lock:
            return self.engine.history()

    def edit_style(self, description) -> StyleProfile:
        with self._lock:
            return self.engine.edit_style_directly(description)

    def force_refresh(self, document_id: str) -> UpdateOutcome:
        with self._lock:
            return self.engine.force_refresh(document_id)

    def revert_style(self, entry_id: str) -> StyleProfile:
        with self._lock:
            return self.engine.revert_style(entry_id)

    def set_locks(
        self,
        global_style_lock: Optional[bool] = None,
        document_id: Optional[str] = None,
        track_style: Optional[bool] = None,
    ) -> Settings:
        with self._lock:
            return self.engine.set_locks(global_style_lock, document_id, track_style)

    # --- context ---

    def get_context(self) -> ContextProfile:
        with self._lock:
            return self.context

    def set_context(self, body: richtext.RichText) -> ContextProfile:
        with self._lock:
            self.context.body = body
            self.events.append_event(
                session_id=self.session_id,
                type=EventType.CONTEXT_EDITED,
                payload={"body": richtext.serialize(body)},
            )
            return self.context

    # --- highlights ---

    def add_highlight(
        self,
        document_id: str,
        start: int,
        end: int,
        polarity: Polarity,
        reason: Optional[str] = None,
    ) -> Highlight:
        with self._lock:
            return self.ledger.add_highlight(document_id, start, end, polarity, reason)

    def add_manual_highlight(
        self, polarity: Polarity, excerpt: str, reason: Optional[str] = None
    ) -> Highlight:
        with self._lock:
            return self.ledger.add_manual_highlight(polarity, excerpt, reason)

    def set_highlight_active(self, highlight_id: str, active: bool) -> Highlight:
        with self._lock:
            return self.ledger.set_active(highlight_id, active)

    def delete_highlight(self, highlight_id: str) -> None:
        with self._lock:
            self.ledger.delete_highlight(highlight_id)

    def list_highlights(self) -> list[Highlight]:
        with self._lock:
            return self.ledger.list()

    def feedback_summaries(self):
        with self._lock:
            return self.ledger.summarize_active()

    # --- generations ---

    def rewrite(self, document_id: str, start: int, end: int) -> Generation:
        with self._lock:
            return self.generations.rewrite(document_id, start, end)

    def apply_prompt(self, document_id: str, start: int, end: int, instruction: str) -> Generation:
        with self._lock:
            return self.generations.apply_prompt(document_id, start, end, instruction)

    def continue_text(self, document_id: str, insertion_point: int) -> Generation:
        with self._lock:
            return self.generations.continue_text(document_id, insertion_point)

    def inline_prompt(self, document_id: str, insertion_point: int, instruction: str) -> Generation:
        with self._lock:
            return self.generations.inline_prompt(document_id, insertion_point, instruction)

    def resolve_generation(self, generation_id: str, action: str) -> Generation:
        with self._lock:
            return self.generations.resolve(generation_id, action)

    # --- telemetry and settings ---

    def page_view(self, page: str) -> EventRecord:
        with self._lock:
            if page not in PAGES:
                raise InvalidRequest(f"unknown page: {page!r} (expected one of {PAGES})")
            return self.events.append_event(
                session_id=self.session_id, type=EventType.PAGE_VIEW, payload={"page": page}
            )

    def update_settings(
        self,
        analysis_interval_n: Optional[int] = None,
        update_threshold: Optional[int] = None,
        feedback_mode: Optional[bool] = None,
    ) -> Settings:
        with self._lock:
            changes: dict[str, Any] = {}
            if analysis_interval_n is not None:
                self.settings.analysis_interval_n = int(analysis_interval_n)
                changes["analysis_interval_n"] = self.settings.analysis_interval_n
            if update_threshold is not None:
                self.settings.update_threshold = int(update_threshold)
                changes["update_threshold"] = self.settings.update_threshold
            if feedback_mode is not None:
                self.settings.feedback_mode = bool(feedback_mode)
                changes["feedback_mode"] = self.settings.feedback_mode
            self.settings.validate()
            self.events.append_event(
                session_id=self.session_id, type=EventType.SETTINGS_CHANGED, payload=changes
            )
            return self.settings

    def counts(self, split: Optional[str] = None) -> dict[str, Any]:
        with self._lock:
            return self.events.summarize_counts(self.session_id, split=split)

    def timeline(self) -> TimelineExport:
        with self._lock:
            return self.events.export_timeline(self.session_id)

    # --- persistence ---

    def snapshot(self) -> Snapshot:
        with self._lock:
            return Snapshot(
                schema_version=SNAPSHOT_SCHEMA_VERSION,
                session_id=self.session_id,
                documents=list(self.documents.values()),
                style_history=list(reversed(self.engine.history())),
                highlights=self.ledger.list(),
                context=self.context,
                settings=self.settings,
                exported_at=self.clock(),
            )

    def restore(self, snapshot: Snapshot) -> None:
        """Load a snapshot into this workspace, replacing current state."""
        with self._lock:
            if snapshot.schema_version != SNAPSHOT_SCHEMA_VERSION:
                raise InvalidRequest(f"unsupported snapshot schema {snapshot.schema_version}")
            self.documents.clear()
            for doc in snapshot.documents:
                self.documents[doc.id] = doc
            self.engine._history = list(snapshot.style_history)
            self.ledger._highlights = {h.id: h for h in snapshot.highlights}
            self.ledger._order = [h.id for h in snapshot.highlights]
            self.ledger._dirty = True
            self.context = snapshot.context
            self.settings.global_style_lock = snapshot.settings.global_style_lock
            self.settings.feedback_mode = snapshot.settings.feedback_mode
            self.settings.analysis_interval_n = snapshot.settings.analysis_interval_n
            self.settings.update_threshold = snapshot.settings.update_threshold


@dataclass
class ReplayedState:
    """State reconstructed by folding an event log over nothing."""

    documents: dict[str, Document] = field(default_factory=dict)
    style_history: list[StyleHistoryEntry] = field(default_factory=list)
    highlights: dict[str, Highlight] = field(default_factory=dict)
    highlight_order: list[str] = field(default_factory=list)
    context: ContextProfile = field(default_factory=ContextProfile)
    settings: Settings = field(default_factory=Settings)

    def highlight_list(self) -> list[Highlight]:
        return [self.highlights[hid] for hid in self.highlight_order]


_STYLE_EVENTS = {
    EventType.STYLE_UPDATE_AUTOMATIC,
    EventType.STYLE_UPDATE_MANUAL_REQUEST,
    EventType.STYLE_UPDATE_DIRECT_EDIT,
    EventType.STYLE_REVERT,
}


def replay_state(records: list[EventRecord]) -> ReplayedState:
    """Fold recorded facts into state without re-running any module logic.

    Style commits and highlight events carry their full payloads; document
    bodies come from edit payloads and insert splices, with highlight anchors
    recomputed the same way the live path does.
    """
    state = ReplayedState()
    state.style_history.append(
        StyleHistoryEntry(seq=1, profile=_default_head(), comparison=None)
    )
    for record in records:
        payload = record.payload
        if record.type is EventType.DOCUMENT_CREATED:
            doc = Document.from_dict(payload["document"])
            state.documents[doc.id] = doc
        elif record.type is EventType.DOCUMENT_EDITED:
            doc = state.documents[payload["document_id"]]
            doc.title = payload["title"]
            doc.body = richtext.parse(payload["body"])
            _reanchor_all(state, doc)
        elif record.type is EventType.GENERATION_INSERTED:
            doc = state.documents[payload["document_id"]]
            doc.body = richtext.splice(
                doc.body,
                int(payload["target_start"]),
                int(payload["target_end"]),
                payload["output"],
            )
            _reanchor_all(state, doc)
        elif record.type in _STYLE_EVENTS:
            entry = StyleHistoryEntry.from_dict(
                {
                    "seq": payload["history_seq"],
                    "profile": payload["profile"],
                    "comparison": payload["comparison"],
                }
            )
            state.style_history.append(entry)
        elif record.type in (EventType.LIKE_ADDED, EventType.DISLIKE_ADDED):
            highlight = Highlight.from_dict(payload["highlight"])
            state.highlights[highlight.id] = highlight
            state.highlight_order.append(highlight.id)
        elif record.type is EventType.HIGHLIGHT_TOGGLED:
            state.highlights[payload["highlight_id"]].active = bool(payload["active"])
        elif record.type is EventType.HIGHLIGHT_DELETED:
            state.highlights.pop(payload["highlight_id"], None)
            if payload["highlight_id"] in state.highlight_order:
                state.highlight_order.remove(payload["highlight_id"])
        elif record.type is EventType.CONTEXT_EDITED:
            state.context.body = richtext.parse(payload["body"])
        elif record.type is EventType.SETTINGS_CHANGED:
            if "global_style_lock" in payload:
                state.settings.global_style_lock = bool(payload["global_style_lock"])
            if "feedback_mode" in payload:
                state.settings.feedback_mode = bool(payload["feedback_mode"])
            if "analysis_interval_n" in payload:
                state.settings.analysis_interval_n = int(payload["analysis_interval_n"])
            if "update_threshold" in payload:
                state.settings.update_threshold = int(payload["update_threshold"])
            if "document_id" in payload:
                doc = state.documents.get(payload["document_id"])
                if doc is not None:
                    doc.track_style = bool(payload["track_style"])
    return state


def _default_head() -> StyleProfile:
    from .model import default_style

    return default_style()


def _reanchor_all(state: ReplayedState, doc: Document) -> None:
    plain = doc.plain_text()
    for highlight in state.highlight_list():
        if highlight.document_id == doc.id:
            reanchor_highlight(plain, highlight)
