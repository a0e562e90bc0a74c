"""Shared error hierarchy.

Every error carries a machine-readable ``kind`` (its class name) so the HTTP
layer can map module errors onto stable (status, kind) pairs.
"""

from __future__ import annotations


class StyleLoopError(Exception):
    """Base class for all domain errors."""

    @property
    def kind(self) -> str:
        return type(self).__name__


class NotFoundError(StyleLoopError):
    """Unknown resource identifiers (404-class)."""


class ValidationError(StyleLoopError):
    """Rejected input (400-class)."""


class ConflictError(StyleLoopError):
    """State raced or already settled (409-class)."""


class ProviderError(StyleLoopError):
    """Completion-provider trouble (502-class)."""


class UnknownDocument(NotFoundError):
    def __init__(self, document_id: str):
        super().__init__(f"unknown document: {document_id}")
        self.document_id = document_id


class UnknownHighlight(NotFoundError):
    def __init__(self, highlight_id: str):
        super().__init__(f"unknown highlight: {highlight_id}")
        self.highlight_id = highlight_id


class UnknownGeneration(NotFoundError):
    def __init__(self, generation_id: str):
        super().__init__(f"unknown generation: {generation_id}")
        self.generation_id = generation_id


class UnknownHistoryEntry(NotFoundError):
    def __init__(self, entry_id: str):
        super().__init__(f"unknown style history entry: {entry_id}")
        self.entry_id = entry_id


class UnknownSession(NotFoundError):
    def __init__(self, session_id: str):
        super().__init__(f"unknown session: {session_id}")
        self.session_id = session_id


class MissingSection(ValidationError):
    def __init__(self, section: str):
        super().__init__(f"style description is missing the {section!r} section")
        self.section = section


class EmptySection(ValidationError):
    def __init__(self, section: str):
        super().__init__(f"style description section {section!r} is empty")
        self.section = section


class EmptyRange(ValidationError):
    def __init__(self, message: str = "selection range is empty"):
        super().__init__(message)


class OutOfBounds(ValidationError):
    def __init__(self, message: str):
        super().__init__(message)


class EmptyExcerpt(ValidationError):
    def __init__(self) -> None:
        super().__init__("highlight excerpt must be non-empty")


class EmptyInstruction(ValidationError):
    def __init__(self) -> None:
        super().__init__("instruction must be non-empty")


class UnknownEventType(ValidationError):
    def __init__(self, value: str):
        super().__init__(f"unknown event type: {value}")
        self.value = value


class InvalidRequest(ValidationError):
    """Catch-all for structurally invalid arguments."""


class MissingBinding(ValidationError):
    def __init__(self, name: str):
        super().__init__(f"template placeholder {name!r} has no binding")
        self.name = name


class UnusedBinding(ValidationError):
    def __init__(self, name: str):
        super().__init__(f"binding {name!r} does not match any template placeholder")
        self.name = name


class StaleCandidate(ConflictError):
    def __init__(self, expected: str, actual: str):
        super().__init__(
            f"candidate was computed against profile {expected}, "
            f"but the committed profile is now {actual}"
        )
        self.expected = expected
        self.actual = actual


class AlreadyResolved(ConflictError):
    def __init__(self, generation_id: str, status: str):
        super().__init__(f"generation {generation_id} is already {status}")
        self.generation_id = generation_id
        self.status = status


class ProviderFailure(ProviderError):
    def __init__(self, message: str, attempts: int = 1):
        super().__init__(message)
        self.attempts = attempts


class ProviderTimeout(ProviderError):
    """A single completion attempt timed out; retried by the gateway."""


class TransientProviderError(ProviderError):
    """A retryable provider hiccup (rate limit, 5xx, connection reset)."""


class MalformedProviderOutput(ProviderError):
    def __init__(self, message: str):
        super().__init__(message)
