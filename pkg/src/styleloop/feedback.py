"""Like/dislike highlights and the summaries that feed style updates.

Highlights are a persistent collection, not live spans: when a document
changes, anchored highlights are re-located by searching for their exact
excerpt, and spans whose text disappeared (or became ambiguous) are kept as
orphans. Only active highlights feed the summaries.
"""

from __future__ import annotations

import time
import uuid
from typing import Callable, Optional

from .errors import (
    EmptyExcerpt,
    EmptyRange,
    OutOfBounds,
    UnknownDocument,
    UnknownHighlight,
)
from .gateway import LlmGateway
from .model import (
    AnchorStatus,
    Document,
    EventType,
    FeedbackSummary,
    Highlight,
    Polarity,
)


def reanchor_highlight(plain: str, highlight: Highlight) -> AnchorStatus:
    """Re-locate one anchored highlight against updated plain text.

    Exact-excerpt search: a unique match updates the offsets; no match or an
    ambiguous match conservatively orphans. Never touches excerpt, polarity,
    reason, or the active flag.
    """
    matches: list[int] = []
    start = plain.find(highlight.excerpt)
    while start != -1 and len(matches) < 2:
        matches.append(start)
        start = plain.find(highlight.excerpt, start + 1)
    if len(matches) == 1:
        new_anchor = (matches[0], matches[0] + len(highlight.excerpt))
        status = AnchorStatus.ANCHORED if new_anchor == highlight.anchor else AnchorStatus.MOVED
        highlight.anchor = new_anchor
    else:
        status = AnchorStatus.ORPHANED
    highlight.anchor_status = status
    return status


class FeedbackLedger:
    def __init__(
        self,
        gateway: LlmGateway,
        documents: dict[str, Document],
        events,  # EventLog
        session_id: str,
        clock: Callable[[], float] = time.time,
        id_factory: Callable[[], str] = lambda: uuid.uuid4().hex,
    ):
        self.gateway = gateway
        self.documents = documents
        self.events = events
        self.session_id = session_id
        self.clock = clock
        self.id_factory = id_factory
        self._highlights: dict[str, Highlight] = {}
        self._order: list[str] = []
        self._cache: Optional[FeedbackSummary] = None
        self._dirty = True

    def _doc(self, document_id: str) -> Document:
        doc = self.documents.get(document_id)
        if doc is None:
            raise UnknownDocument(document_id)
        return doc

    def _store(self, highlight: Highlight) -> Highlight:
        self._highlights[highlight.id] = highlight
        self._order.append(highlight.id)
        self._dirty = True
        event_type = (
            EventType.LIKE_ADDED if highlight.polarity is Polarity.LIKE else EventType.DISLIKE_ADDED
        )
        self.events.append_event(
            session_id=self.session_id, type=event_type, payload={"highlight": highlight.to_dict()}
        )
        return highlight

    def add_highlight(
        self,
        document_id: str,
        start: int,
        end: int,
        polarity: Polarity,
        reason: Optional[str] = None,
    ) -> Highlight:
        doc = self._doc(document_id)
        plain = doc.plain_text()
        if start >= end:
            raise EmptyRange(f"selection [{start}, {end}) is empty")
        if start < 0 or end > len(plain):
            raise OutOfBounds(f"selection [{start}, {end}) outside document of length {len(plain)}")
        return self._store(
            Highlight(
                id=self.id_factory(),
                document_id=document_id,
                excerpt=plain[start:end],
                anchor=(start, end),
                polarity=polarity,
                reason=reason,
                active=True,
                anchor_status=AnchorStatus.ANCHORED,
                created_at=self.clock(),
            )
        )

    def add_manual_highlight(
        self, polarity: Polarity, excerpt: str, reason: Optional[str] = None
    ) -> Highlight:
        if not excerpt:
            raise EmptyExcerpt()
        return self._store(
            Highlight(
                id=self.id_factory(),
                document_id=None,
                excerpt=excerpt,
                anchor=None,
                polarity=polarity,
                reason=reason,
                active=True,
                anchor_status=None,
                created_at=self.clock(),
            )
        )

    def get(self, highlight_id: str) -> Highlight:
        highlight = self._highlights.get(highlight_id)
        if highlight is None:
            raise UnknownHighlight(highlight_id)
        return highlight

    def list(self) -> list[Highlight]:
        return [self._highlights[hid] for hid in self._order]

    def set_active(self, highlight_id: str, active: bool) -> Highlight:
        highlight = self.get(highlight_id)
        highlight.active = bool(active)
        self._dirty = True
        self.events.append_event(
            session_id=self.session_id,
            type=EventType.HIGHLIGHT_TOGGLED,
            payload={"highlight_id": highlight_id, "active": highlight.active},
        )
        return highlight

    def delete_highlight(self, highlight_id: str) -> None:
        self.get(highlight_id)
        del self._highlights[highlight_id]
        self._order.remove(highlight_id)
        self._dirty = True
        self.events.append_event(
            session_id=self.session_id,
            type=EventType.HIGHLIGHT_DELETED,
            payload={"highlight_id": highlight_id},
        )

    def summarize_active(self) -> FeedbackSummary:
        """Summaries over active highlights; cached until the ledger changes.

        Empty polarities produce empty summary text without a provider call.
        """
        if not self._dirty and self._cache is not None:
            return self._cache
        active = [h for h in self.list() if h.active]
        summaries: dict[Polarity, str] = {}
        for polarity in (Polarity.LIKE, Polarity.DISLIKE):
            chosen = [h for h in active if h.polarity is polarity]
            if not chosen:
                summaries[polarity] = ""
                continue
            items = [{"excerpt": h.excerpt, "reason": h.reason} for h in chosen]
            summaries[polarity] = self.gateway.summarize_feedback(polarity.value, items)
        self._cache = FeedbackSummary(
            like_summary=summaries[Polarity.LIKE],
            dislike_summary=summaries[Polarity.DISLIKE],
            computed_over=tuple(h.id for h in active),
            computed_at=self.clock(),
        )
        self._dirty = False
        return self._cache

    def summary_pair(self) -> tuple[str, str]:
        summary = self.summarize_active()
        return summary.like_summary, summary.dislike_summary

    def reanchor(self, document_id: str) -> list[tuple[str, AnchorStatus]]:
        """Re-anchor every highlight of a document after its body changed."""
        doc = self._doc(document_id)
        plain = doc.plain_text()
        results: list[tuple[str, AnchorStatus]] = []
        for highlight in self.list():
            if highlight.document_id != document_id:
                continue
            results.append((highlight.id, reanchor_highlight(plain, highlight)))
        return results
