"""Domain types shared by every module: documents, style profiles, highlights,
generations, settings, and the closed event taxonomy.

Pure values and pure functions only; no I/O happens here.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Mapping, Optional

from . import richtext
from .errors import EmptySection, InvalidRequest, MissingSection
from .richtext import Heading, Paragraph, RichText, Span

STYLE_SUMMARY_MAX_CHARS = 280

SECTION_KEYS = ("tone", "voice", "word_choice", "sentence_structure", "paragraph_structure")

SECTION_LABELS = {
    "tone": "Tone",
    "voice": "Voice",
    "word_choice": "Word Choice",
    "sentence_structure": "Sentence Structure",
    "paragraph_structure": "Paragraph Structure",
}

_LABEL_TO_KEY = {label.lower(): key for key, label in SECTION_LABELS.items()}


class StyleSource(str, Enum):
    DEFAULT = "default"
    AUTOMATIC = "automatic"
    MANUAL_EDIT = "manual_edit"
    MANUAL_REFRESH = "manual_refresh"
    REVERT = "revert"


class Polarity(str, Enum):
    LIKE = "like"
    DISLIKE = "dislike"


class AnchorStatus(str, Enum):
    ANCHORED = "anchored"
    MOVED = "moved"
    ORPHANED = "orphaned"


class GenerationKind(str, Enum):
    REWRITE = "rewrite"
    APPLY_PROMPT = "apply_prompt"
    CONTINUE = "continue"
    INLINE_PROMPT = "inline_prompt"


class GenerationStatus(str, Enum):
    OFFERED = "offered"
    INSERTED = "inserted"
    DISCARDED = "discarded"
    SUPERSEDED = "superseded"


class TriggerCause(str, Enum):
    AUTOMATIC_COUNTER = "automatic_counter"
    MANUAL_REFRESH = "manual_refresh"


class UpdateOutcomeKind(str, Enum):
    COMMITTED = "committed"
    NO_UPDATE_NEEDED = "no_update_needed"


class EventType(str, Enum):
    """Closed event taxonomy; the log rejects anything else.

    Includes the interaction events reported in session analytics plus the
    structural events (document/context/settings changes) that make the log
    replayable into a full state snapshot.
    """

    STYLE_UPDATE_AUTOMATIC = "style_update_automatic"
    STYLE_UPDATE_MANUAL_REQUEST = "style_update_manual_request"
    STYLE_UPDATE_DIRECT_EDIT = "style_update_direct_edit"
    STYLE_REVERT = "style_revert"
    STYLE_NO_UPDATE = "style_no_update"
    LIKE_ADDED = "like_added"
    DISLIKE_ADDED = "dislike_added"
    HIGHLIGHT_TOGGLED = "highlight_toggled"
    HIGHLIGHT_DELETED = "highlight_deleted"
    PAGE_VIEW = "page_view"
    REWRITE = "rewrite"
    APPLY_PROMPT = "apply_prompt"
    CONTINUE = "continue"
    INLINE_PROMPT = "inline_prompt"
    GENERATION_INSERTED = "generation_inserted"
    GENERATION_DISCARDED = "generation_discarded"
    GENERATION_REGENERATED = "generation_regenerated"
    CONTEXT_EDITED = "context_edited"
    DOCUMENT_CREATED = "document_created"
    DOCUMENT_EDITED = "document_edited"
    SETTINGS_CHANGED = "settings_changed"


PAGES = ("home", "style", "context", "history", "likes")


@dataclass(frozen=True)
class StyleDescription:
    """A writing style along five fixed dimensions."""

    tone: str
    voice: str
    word_choice: str
    sentence_structure: str
    paragraph_structure: str

    def section(self, key: str) -> str:
        return getattr(self, key)

    def as_text(self) -> str:
        """Canonical plain rendering: one "Label: content" line per section."""
        return "\n".join(f"{SECTION_LABELS[key]}: {self.section(key)}" for key in SECTION_KEYS)

    def as_rich_text(self) -> RichText:
        blocks: list[richtext.Block] = []
        for key in SECTION_KEYS:
            blocks.append(Heading(level=2, spans=(Span(SECTION_LABELS[key]),)))
            for line in self.section(key).split("\n"):
                blocks.append(Paragraph((Span(line),)) if line else Paragraph())
        return RichText(tuple(blocks))

    def to_dict(self) -> dict[str, str]:
        return {key: self.section(key) for key in SECTION_KEYS}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "StyleDescription":
        values: dict[str, str] = {}
        for key in SECTION_KEYS:
            raw = data.get(key)
            if raw is None:
                raise MissingSection(key)
            if not isinstance(raw, str):
                raise InvalidRequest(f"section {key!r} must be text")
            if not raw.strip():
                raise EmptySection(key)
            values[key] = raw
        return cls(**values)


def _section_label_of(line: str) -> tuple[str, str] | None:
    head, sep, rest = line.partition(":")
    if sep and head.strip().lower() in _LABEL_TO_KEY:
        return _LABEL_TO_KEY[head.strip().lower()], rest.strip()
    return None


def parse_style_sections(body: RichText) -> StyleDescription:
    """Extract the five labeled sections from a rich-text description.

    Sections may be introduced either by a heading whose text is the section
    label or by a "Label: content" paragraph. Order is normalized; every
    section must be present and non-empty.
    """
    sections: dict[str, list[str]] = {}
    current: str | None = None
    for row_text in richtext.plain_text(body).split("\n"):
        stripped = row_text.strip()
        bare = stripped.rstrip(":").strip().lower()
        if bare in _LABEL_TO_KEY:
            current = _LABEL_TO_KEY[bare]
            sections.setdefault(current, [])
            continue
        labeled = _section_label_of(stripped)
        if labeled is not None:
            current, content = labeled
            sections.setdefault(current, [])
            if content:
                sections[current].append(content)
            continue
        if current is not None and stripped:
            sections[current].append(stripped)
    values: dict[str, str] = {}
    for key in SECTION_KEYS:
        if key not in sections:
            raise MissingSection(key)
        content = "\n".join(sections[key])
        if not content.strip():
            raise EmptySection(key)
        values[key] = content
    return StyleDescription(**values)


def validate_style_description(body: RichText) -> StyleDescription:
    return parse_style_sections(body)


def style_description_from_text(text: str) -> StyleDescription:
    return parse_style_sections(richtext.from_plain(text))


@dataclass(frozen=True)
class StyleProfile:
    id: str
    summary: str
    description: StyleDescription
    source: StyleSource
    created_at: float
    summary_generated_at: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "summary": self.summary,
            "description": self.description.to_dict(),
            "source": self.source.value,
            "created_at": self.created_at,
            "summary_generated_at": self.summary_generated_at,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "StyleProfile":
        return cls(
            id=data["id"],
            summary=data["summary"],
            description=StyleDescription.from_dict(data["description"]),
            source=StyleSource(data["source"]),
            created_at=float(data["created_at"]),
            summary_generated_at=float(data["summary_generated_at"]),
        )


DEFAULT_STYLE_SUMMARY = "General-purpose neutral style"

_DEFAULT_DESCRIPTION = StyleDescription(
    tone="Neutral and approachable; neither formal nor casual.",
    voice="Clear third-person voice with an even, impersonal register.",
    word_choice="Plain, widely understood vocabulary with few idioms.",
    sentence_structure="Medium-length declarative sentences with simple clauses.",
    paragraph_structure="Short paragraphs of two to four sentences, one idea each.",
)


def default_style() -> StyleProfile:
    """The built-in generic profile used before any user signal exists."""
    return StyleProfile(
        id="style-default",
        summary=DEFAULT_STYLE_SUMMARY,
        description=_DEFAULT_DESCRIPTION,
        source=StyleSource.DEFAULT,
        created_at=0.0,
        summary_generated_at=0.0,
    )


@dataclass(frozen=True)
class StyleComparison:
    old_style_id: str
    new_style_id: str
    comparison_text: str
    difference_rating: int

    def __post_init__(self) -> None:
        if not isinstance(self.difference_rating, int) or isinstance(self.difference_rating, bool):
            raise InvalidRequest("difference_rating must be an integer")
        if not 0 <= self.difference_rating <= 10:
            raise InvalidRequest(f"difference_rating {self.difference_rating} outside [0, 10]")

    def to_dict(self) -> dict[str, Any]:
        return {
            "old_style_id": self.old_style_id,
            "new_style_id": self.new_style_id,
            "comparison_text": self.comparison_text,
            "difference_rating": self.difference_rating,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "StyleComparison":
        return cls(
            old_style_id=data["old_style_id"],
            new_style_id=data["new_style_id"],
            comparison_text=data["comparison_text"],
            difference_rating=int(data["difference_rating"]),
        )


@dataclass(frozen=True)
class StyleHistoryEntry:
    seq: int
    profile: StyleProfile
    comparison: Optional[StyleComparison]

    def to_dict(self) -> dict[str, Any]:
        return {
            "seq": self.seq,
            "profile": self.profile.to_dict(),
            "comparison": self.comparison.to_dict() if self.comparison else None,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "StyleHistoryEntry":
        comparison = data.get("comparison")
        return cls(
            seq=int(data["seq"]),
            profile=StyleProfile.from_dict(data["profile"]),
            comparison=StyleComparison.from_dict(comparison) if comparison else None,
        )


@dataclass
class Document:
    id: str
    title: str
    body: RichText
    track_style: bool = True
    chars_since_analysis: int = 0
    created_at: float = 0.0
    updated_at: float = 0.0

    def plain_text(self) -> str:
        return richtext.plain_text(self.body)

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "title": self.title,
            "body": richtext.serialize(self.body),
            "track_style": self.track_style,
            "chars_since_analysis": self.chars_since_analysis,
            "created_at": self.created_at,
            "updated_at": self.updated_at,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "Document":
        return cls(
            id=data["id"],
            title=data["title"],
            body=richtext.parse(data["body"]),
            track_style=bool(data.get("track_style", True)),
            chars_since_analysis=int(data.get("chars_since_analysis", 0)),
            created_at=float(data.get("created_at", 0.0)),
            updated_at=float(data.get("updated_at", 0.0)),
        )


@dataclass
class Highlight:
    id: str
    document_id: Optional[str]
    excerpt: str
    anchor: Optional[tuple[int, int]]
    polarity: Polarity
    reason: Optional[str]
    active: bool
    anchor_status: Optional[AnchorStatus]
    created_at: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "document_id": self.document_id,
            "excerpt": self.excerpt,
            "anchor": list(self.anchor) if self.anchor else None,
            "polarity": self.polarity.value,
            "reason": self.reason,
            "active": self.active,
            "anchor_status": self.anchor_status.value if self.anchor_status else None,
            "created_at": self.created_at,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "Highlight":
        anchor = data.get("anchor")
        status = data.get("anchor_status")
        return cls(
            id=data["id"],
            document_id=data.get("document_id"),
            excerpt=data["excerpt"],
            anchor=(int(anchor[0]), int(anchor[1])) if anchor else None,
            polarity=Polarity(data["polarity"]),
            reason=data.get("reason"),
            active=bool(data.get("active", True)),
            anchor_status=AnchorStatus(status) if status else None,
            created_at=float(data.get("created_at", 0.0)),
        )


@dataclass
class ContextProfile:
    """Free-form grounding text; no schema is imposed on the content."""

    body: RichText = field(default_factory=RichText)

    def to_dict(self) -> dict[str, Any]:
        return {"body": richtext.serialize(self.body)}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "ContextProfile":
        return cls(body=richtext.parse(data["body"]))


@dataclass
class Generation:
    id: str
    lineage_id: str
    kind: GenerationKind
    document_id: str
    target_start: int
    target_end: int
    instruction: Optional[str]
    output: str
    status: GenerationStatus
    attempt: int
    created_at: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "lineage_id": self.lineage_id,
            "kind": self.kind.value,
            "document_id": self.document_id,
            "target_start": self.target_start,
            "target_end": self.target_end,
            "instruction": self.instruction,
            "output": self.output,
            "status": self.status.value,
            "attempt": self.attempt,
            "created_at": self.created_at,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "Generation":
        return cls(
            id=data["id"],
            lineage_id=data["lineage_id"],
            kind=GenerationKind(data["kind"]),
            document_id=data["document_id"],
            target_start=int(data["target_start"]),
            target_end=int(data["target_end"]),
            instruction=data.get("instruction"),
            output=data["output"],
            status=GenerationStatus(data["status"]),
            attempt=int(data["attempt"]),
            created_at=float(data.get("created_at", 0.0)),
        )


@dataclass
class Settings:
    global_style_lock: bool = False
    feedback_mode: bool = False
    analysis_interval_n: int = 100
    update_threshold: int = 3

    def __post_init__(self) -> None:
        self.validate()

    def validate(self) -> None:
        if self.analysis_interval_n < 1:
            raise InvalidRequest("analysis_interval_n must be a positive integer")
        if not 0 <= self.update_threshold <= 10:
            raise InvalidRequest("update_threshold must be in [0, 10]")

    def to_dict(self) -> dict[str, Any]:
        return {
            "global_style_lock": self.global_style_lock,
            "feedback_mode": self.feedback_mode,
            "analysis_interval_n": self.analysis_interval_n,
            "update_threshold": self.update_threshold,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "Settings":
        return cls(
            global_style_lock=bool(data.get("global_style_lock", False)),
            feedback_mode=bool(data.get("feedback_mode", False)),
            analysis_interval_n=int(data.get("analysis_interval_n", 100)),
            update_threshold=int(data.get("update_threshold", 3)),
        )


@dataclass(frozen=True)
class EventRecord:
    seq: int
    timestamp: float
    session_id: str
    type: EventType
    payload: Mapping[str, Any]

    def to_dict(self) -> dict[str, Any]:
        return {
            "seq": self.seq,
            "timestamp": self.timestamp,
            "session_id": self.session_id,
            "type": self.type.value,
            "payload": dict(self.payload),
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "EventRecord":
        return cls(
            seq=int(data["seq"]),
            timestamp=float(data["timestamp"]),
            session_id=data["session_id"],
            type=EventType(data["type"]),
            payload=dict(data.get("payload", {})),
        )


@dataclass(frozen=True)
class FeedbackSummary:
    like_summary: str
    dislike_summary: str
    computed_over: tuple[str, ...]
    computed_at: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "like_summary": self.like_summary,
            "dislike_summary": self.dislike_summary,
            "computed_over": list(self.computed_over),
            "computed_at": self.computed_at,
        }


@dataclass(frozen=True)
class AnalysisTrigger:
    document_id: str
    cause: TriggerCause


@dataclass(frozen=True)
class CandidateUpdate:
    new_style: StyleProfile
    comparison: StyleComparison


@dataclass(frozen=True)
class UpdateOutcome:
    kind: UpdateOutcomeKind
    committed_style: Optional[StyleProfile]
    comparison: StyleComparison

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind.value,
            "committed_style": self.committed_style.to_dict() if self.committed_style else None,
            "comparison": self.comparison.to_dict(),
        }


@dataclass(frozen=True)
class PromptBundle:
    """Everything a generation prompt is rendered from.

    ``context_body`` is present exactly for the document-continuation kinds;
    refinement kinds (rewrite, apply-prompt) are conditioned on style alone.
    """

    kind: GenerationKind
    style_description: str
    context_body: Optional[str]
    document_excerpt: str
    instruction: Optional[str]

    def __post_init__(self) -> None:
        wants_context = self.kind in (GenerationKind.CONTINUE, GenerationKind.INLINE_PROMPT)
        if wants_context != (self.context_body is not None):
            raise InvalidRequest(f"context_body presence does not match kind {self.kind.value}")
        wants_instruction = self.kind in (GenerationKind.APPLY_PROMPT, GenerationKind.INLINE_PROMPT)
        if wants_instruction != (self.instruction is not None):
            raise InvalidRequest(f"instruction presence does not match kind {self.kind.value}")
