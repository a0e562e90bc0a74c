"""The style state machine.

One committed profile at a time; candidates computed from the document plus
feedback summaries; a difference-rating gate decides whether a candidate
replaces the committed profile. History is append-only and reverts commit new
entries. All commits run through a single writer.
"""

from __future__ import annotations

import logging
import time
import uuid
from typing import Callable, Mapping, Optional

from . import richtext
from .errors import StaleCandidate, UnknownDocument, UnknownHistoryEntry, InvalidRequest
from .gateway import LlmGateway
from .model import (
    AnalysisTrigger,
    CandidateUpdate,
    Document,
    EventType,
    Settings,
    StyleComparison,
    StyleDescription,
    StyleHistoryEntry,
    StyleProfile,
    StyleSource,
    TriggerCause,
    UpdateOutcome,
    UpdateOutcomeKind,
    default_style,
    style_description_from_text,
    validate_style_description,
)
from .errors import MalformedProviderOutput, MissingSection, EmptySection

logger = logging.getLogger(__name__)

_CAUSE_TO_SOURCE = {
    TriggerCause.AUTOMATIC_COUNTER: StyleSource.AUTOMATIC,
    TriggerCause.MANUAL_REFRESH: StyleSource.MANUAL_REFRESH,
}

_SOURCE_TO_EVENT = {
    StyleSource.AUTOMATIC: EventType.STYLE_UPDATE_AUTOMATIC,
    StyleSource.MANUAL_REFRESH: EventType.STYLE_UPDATE_MANUAL_REQUEST,
    StyleSource.MANUAL_EDIT: EventType.STYLE_UPDATE_DIRECT_EDIT,
    StyleSource.REVERT: EventType.STYLE_REVERT,
}


class StyleEngine:
    def __init__(
        self,
        gateway: LlmGateway,
        settings: Settings,
        documents: dict[str, Document],
        events,  # EventLog; typed loosely to avoid an import cycle
        session_id: str,
        summaries: Callable[[], tuple[str, str]] = lambda: ("", ""),
        clock: Callable[[], float] = time.time,
        id_factory: Callable[[], str] = lambda: uuid.uuid4().hex,
    ):
        self.gateway = gateway
        self.settings = settings
        self.documents = documents
        self.events = events
        self.session_id = session_id
        self.summaries = summaries
        self.clock = clock
        self.id_factory = id_factory
        self._history: list[StyleHistoryEntry] = [
            StyleHistoryEntry(seq=1, profile=default_style(), comparison=None)
        ]
        self._in_flight: set[str] = set()
        self._pending: set[str] = set()

    # --- introspection ---

    @property
    def current(self) -> StyleProfile:
        return self._history[-1].profile

    def history(self) -> list[StyleHistoryEntry]:
        """All committed entries, newest first."""
        return list(reversed(self._history))

    def entry_by_id(self, entry_id: str) -> StyleHistoryEntry:
        for entry in self._history:
            if entry.profile.id == entry_id:
                return entry
        raise UnknownHistoryEntry(entry_id)

    # --- counter discipline and locks ---

    def _doc(self, document_id: str) -> Document:
        doc = self.documents.get(document_id)
        if doc is None:
            raise UnknownDocument(document_id)
        return doc

    def _automatic_allowed(self, doc: Document) -> bool:
        return (
            doc.chars_since_analysis >= self.settings.analysis_interval_n
            and not self.settings.global_style_lock
            and doc.track_style
        )

    def register_edit(self, document_id: str, inserted_char_count: int) -> Optional[AnalysisTrigger]:
        """Accumulate typed characters; hand back a trigger when a window fills.

        The counter resets exactly when an analysis is dispatched, i.e. when a
        trigger is returned here or released by finish_analysis. While an
        analysis is in flight further window crossings coalesce into a single
        pending trigger.
        """
        doc = self._doc(document_id)
        if inserted_char_count < 0:
            raise InvalidRequest("inserted_char_count must be non-negative")
        doc.chars_since_analysis += inserted_char_count
        if not self._automatic_allowed(doc):
            return None
        if document_id in self._in_flight:
            self._pending.add(document_id)
            return None
        doc.chars_since_analysis = 0
        return AnalysisTrigger(document_id=document_id, cause=TriggerCause.AUTOMATIC_COUNTER)

    def begin_analysis(self, document_id: str) -> None:
        if document_id in self._in_flight:
            raise RuntimeError(f"analysis already in flight for document {document_id}")
        self._in_flight.add(document_id)

    def finish_analysis(self, document_id: str) -> Optional[AnalysisTrigger]:
        self._in_flight.discard(document_id)
        if document_id not in self._pending:
            return None
        self._pending.discard(document_id)
        doc = self._doc(document_id)
        if not self._automatic_allowed(doc):
            return None
        doc.chars_since_analysis = 0
        return AnalysisTrigger(document_id=document_id, cause=TriggerCause.AUTOMATIC_COUNTER)

    def set_locks(
        self,
        global_style_lock: Optional[bool] = None,
        document_id: Optional[str] = None,
        track_style: Optional[bool] = None,
    ) -> Settings:
        if (document_id is None) != (track_style is None):
            raise InvalidRequest("document_id and track_style must be supplied together")
        changes: dict[str, object] = {}
        if global_style_lock is not None:
            self.settings.global_style_lock = bool(global_style_lock)
            changes["global_style_lock"] = self.settings.global_style_lock
        if document_id is not None:
            doc = self._doc(document_id)
            doc.track_style = bool(track_style)
            changes["document_id"] = document_id
            changes["track_style"] = doc.track_style
        self.events.append_event(
            session_id=self.session_id, type=EventType.SETTINGS_CHANGED, payload=changes
        )
        return self.settings

    # --- the update pipeline ---

    def compute_candidate(
        self,
        document_body: richtext.RichText,
        current_style: StyleProfile,
        like_summary: str,
        dislike_summary: str,
    ) -> CandidateUpdate:
        """Ask the provider for a fresh description plus a rated comparison."""
        raw = self.gateway.extract_style(
            document=richtext.plain_text(document_body),
            style=current_style.description.as_text(),
            like_summary=like_summary,
            dislike_summary=dislike_summary,
        )
        try:
            description = style_description_from_text(raw)
        except (MissingSection, EmptySection) as exc:
            raise MalformedProviderOutput(f"style extraction output unparseable: {exc}") from exc
        rating, comparison_text = self.gateway.compare_styles(
            current_style.description.as_text(), description.as_text()
        )
        new_profile = StyleProfile(
            id=self.id_factory(),
            summary="",
            description=description,
            source=StyleSource.AUTOMATIC,
            created_at=self.clock(),
            summary_generated_at=0.0,
        )
        comparison = StyleComparison(
            old_style_id=current_style.id,
            new_style_id=new_profile.id,
            comparison_text=comparison_text,
            difference_rating=rating,
        )
        return CandidateUpdate(new_style=new_profile, comparison=comparison)

    def _commit(
        self,
        description: StyleDescription,
        source: StyleSource,
        comparison: StyleComparison,
        profile_id: str,
        extra_payload: Optional[Mapping[str, object]] = None,
    ) -> StyleProfile:
        commit_ts = self.clock()
        summary = self.gateway.summarize_style(description.as_text())[:280]
        summary_ts = max(self.clock(), commit_ts)
        profile = StyleProfile(
            id=profile_id,
            summary=summary,
            description=description,
            source=source,
            created_at=commit_ts,
            summary_generated_at=summary_ts,
        )
        entry = StyleHistoryEntry(
            seq=self._history[-1].seq + 1, profile=profile, comparison=comparison
        )
        self._history.append(entry)
        payload: dict[str, object] = {
            "history_seq": entry.seq,
            "profile": profile.to_dict(),
            "comparison": comparison.to_dict(),
        }
        if extra_payload:
            payload.update(extra_payload)
        self.events.append_event(
            session_id=self.session_id, type=_SOURCE_TO_EVENT[source], payload=payload
        )
        return profile

    def commit_if_significant(
        self,
        candidate: CandidateUpdate,
        source: StyleSource,
        document_id: Optional[str] = None,
    ) -> UpdateOutcome:
        """Threshold-gated commit; the gate filters model noise, not user intent."""
        if candidate.comparison.old_style_id != self.current.id:
            raise StaleCandidate(candidate.comparison.old_style_id, self.current.id)
        if source not in (StyleSource.AUTOMATIC, StyleSource.MANUAL_REFRESH):
            raise InvalidRequest(f"gated commits accept automatic/manual_refresh, got {source}")
        extra = {"document_id": document_id} if document_id else {}
        if candidate.comparison.difference_rating > self.settings.update_threshold:
            profile = self._commit(
                candidate.new_style.description,
                source,
                candidate.comparison,
                profile_id=candidate.new_style.id,
                extra_payload=extra,
            )
            return UpdateOutcome(
                kind=UpdateOutcomeKind.COMMITTED,
                committed_style=profile,
                comparison=candidate.comparison,
            )
        self.events.append_event(
            session_id=self.session_id,
            type=EventType.STYLE_NO_UPDATE,
            payload={
                "difference_rating": candidate.comparison.difference_rating,
                "source": source.value,
                **extra,
            },
        )
        return UpdateOutcome(
            kind=UpdateOutcomeKind.NO_UPDATE_NEEDED,
            committed_style=None,
            comparison=candidate.comparison,
        )

    def run_analysis(self, document_id: str, cause: TriggerCause) -> UpdateOutcome:
        """One full analysis pass for a document (single-flight per document)."""
        doc = self._doc(document_id)
        self.begin_analysis(document_id)
        try:
            like_summary, dislike_summary = self.summaries()
            candidate = self.compute_candidate(doc.body, self.current, like_summary, dislike_summary)
            outcome = self.commit_if_significant(
                candidate, _CAUSE_TO_SOURCE[cause], document_id=document_id
            )
        finally:
            pending = self.finish_analysis(document_id)
        if pending is not None:
            follow_up = self.run_analysis(pending.document_id, pending.cause)
            logger.debug("coalesced analysis for %s: %s", document_id, follow_up.kind)
        return outcome

    def force_refresh(self, document_id: str) -> UpdateOutcome:
        """User-requested analysis: skips the counter and overrides locks, but
        keeps the same significance gate as automatic updates."""
        doc = self._doc(document_id)
        doc.chars_since_analysis = 0  # dispatching an analysis resets the window
        return self.run_analysis(document_id, TriggerCause.MANUAL_REFRESH)

    def edit_style_directly(self, new_description) -> StyleProfile:
        """Commit a user-authored description with no gate; user edits are
        authoritative. A comparison is still computed and kept in history."""
        if isinstance(new_description, StyleDescription):
            description = new_description
        else:
            description = validate_style_description(new_description)
        rating, comparison_text = self.gateway.compare_styles(
            self.current.description.as_text(), description.as_text()
        )
        profile_id = self.id_factory()
        comparison = StyleComparison(
            old_style_id=self.current.id,
            new_style_id=profile_id,
            comparison_text=comparison_text,
            difference_rating=rating,
        )
        return self._commit(description, StyleSource.MANUAL_EDIT, comparison, profile_id)

    def revert_style(self, entry_id: str) -> StyleProfile:
        """Commit a new entry carrying a past entry's description verbatim."""
        target = self.entry_by_id(entry_id)
        rating, comparison_text = self.gateway.compare_styles(
            self.current.description.as_text(), target.profile.description.as_text()
        )
        profile_id = self.id_factory()
        comparison = StyleComparison(
            old_style_id=self.current.id,
            new_style_id=profile_id,
            comparison_text=comparison_text,
            difference_rating=rating,
        )
        return self._commit(
            target.profile.description,
            StyleSource.REVERT,
            comparison,
            profile_id,
            extra_payload={"reverted_to": entry_id},
        )
