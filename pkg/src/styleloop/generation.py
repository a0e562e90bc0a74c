"""The four text-generation features and the offer lifecycle.

Rewrite and apply-prompt refine a selection under the committed style alone;
continue and inline-prompt create new text conditioned on style, the context
profile, and a trailing document window. A generation never touches the
document until the user explicitly inserts it; regeneration supersedes the
old offer and re-renders against current state.
"""

from __future__ import annotations

import time
import uuid
from typing import Callable, Optional

from . import richtext
from .errors import (
    AlreadyResolved,
    EmptyInstruction,
    EmptyRange,
    InvalidRequest,
    OutOfBounds,
    UnknownDocument,
    UnknownGeneration,
)
from .gateway import LlmGateway, TemplateId
from .model import (
    Document,
    EventType,
    Generation,
    GenerationKind,
    GenerationStatus,
    PromptBundle,
)

_REQUEST_EVENT = {
    GenerationKind.REWRITE: EventType.REWRITE,
    GenerationKind.APPLY_PROMPT: EventType.APPLY_PROMPT,
    GenerationKind.CONTINUE: EventType.CONTINUE,
    GenerationKind.INLINE_PROMPT: EventType.INLINE_PROMPT,
}

_TEMPLATE_FOR_KIND = {
    GenerationKind.REWRITE: TemplateId.REWRITE,
    GenerationKind.APPLY_PROMPT: TemplateId.APPLY,
    GenerationKind.CONTINUE: TemplateId.CONTINUE,
    GenerationKind.INLINE_PROMPT: TemplateId.INLINE,
}

RESOLVE_ACTIONS = ("insert", "regenerate", "discard")


class GenerationService:
    def __init__(
        self,
        gateway: LlmGateway,
        documents: dict[str, Document],
        engine,  # StyleEngine
        context_provider: Callable[[], str],
        events,  # EventLog
        session_id: str,
        after_insert: Callable[[str, int], None] = lambda document_id, length: None,
        window_chars: int = 2000,
        clock: Callable[[], float] = time.time,
        id_factory: Callable[[], str] = lambda: uuid.uuid4().hex,
    ):
        self.gateway = gateway
        self.documents = documents
        self.engine = engine
        self.context_provider = context_provider
        self.events = events
        self.session_id = session_id
        self.after_insert = after_insert
        self.window_chars = window_chars
        self.clock = clock
        self.id_factory = id_factory
        self._generations: dict[str, Generation] = {}
        self._order: list[str] = []
        self._bundles: dict[str, PromptBundle] = {}

    def _doc(self, document_id: str) -> Document:
        doc = self.documents.get(document_id)
        if doc is None:
            raise UnknownDocument(document_id)
        return doc

    def _bundle(
        self,
        kind: GenerationKind,
        doc: Document,
        start: int,
        end: int,
        instruction: Optional[str],
    ) -> PromptBundle:
        plain = doc.plain_text()
        if kind in (GenerationKind.REWRITE, GenerationKind.APPLY_PROMPT):
            if start >= end:
                raise EmptyRange(f"selection [{start}, {end}) is empty")
            if start < 0 or end > len(plain):
                raise OutOfBounds(
                    f"selection [{start}, {end}) outside document of length {len(plain)}"
                )
            excerpt = plain[start:end]
            context = None
        else:
            if not 0 <= start <= len(plain):
                raise OutOfBounds(
                    f"insertion point {start} outside document of length {len(plain)}"
                )
            excerpt = plain[max(0, start - self.window_chars) : start]
            context = self.context_provider()
        return PromptBundle(
            kind=kind,
            style_description=self.engine.current.description.as_text(),
            context_body=context,
            document_excerpt=excerpt,
            instruction=instruction,
        )

    def _render_bindings(self, bundle: PromptBundle) -> dict[str, str]:
        if bundle.kind is GenerationKind.REWRITE:
            return {"style": bundle.style_description, "selection": bundle.document_excerpt}
        if bundle.kind is GenerationKind.APPLY_PROMPT:
            return {
                "style": bundle.style_description,
                "selection": bundle.document_excerpt,
                "instruction": bundle.instruction or "",
            }
        bindings = {
            "style": bundle.style_description,
            "context": bundle.context_body or "",
            "window": bundle.document_excerpt,
        }
        if bundle.kind is GenerationKind.INLINE_PROMPT:
            bindings["instruction"] = bundle.instruction or ""
        return bindings

    def _offer(
        self,
        kind: GenerationKind,
        document_id: str,
        start: int,
        end: int,
        instruction: Optional[str],
        attempt: int = 1,
        lineage_id: Optional[str] = None,
    ) -> Generation:
        doc = self._doc(document_id)
        bundle = self._bundle(kind, doc, start, end, instruction)
        output = self.gateway.generate(_TEMPLATE_FOR_KIND[kind], self._render_bindings(bundle))
        generation_id = self.id_factory()
        generation = Generation(
            id=generation_id,
            lineage_id=lineage_id or generation_id,
            kind=kind,
            document_id=document_id,
            target_start=start,
            target_end=end,
            instruction=instruction,
            output=output,
            status=GenerationStatus.OFFERED,
            attempt=attempt,
            created_at=self.clock(),
        )
        self._generations[generation.id] = generation
        self._order.append(generation.id)
        self._bundles[generation.id] = bundle
        return generation

    def _request(
        self,
        kind: GenerationKind,
        document_id: str,
        start: int,
        end: int,
        instruction: Optional[str],
    ) -> Generation:
        generation = self._offer(kind, document_id, start, end, instruction)
        self.events.append_event(
            session_id=self.session_id,
            type=_REQUEST_EVENT[kind],
            payload={
                "generation": generation.to_dict(),
                "style_id": self.engine.current.id,
                "context_included": self._bundles[generation.id].context_body is not None,
            },
        )
        return generation

    def rewrite(self, document_id: str, start: int, end: int) -> Generation:
        return self._request(GenerationKind.REWRITE, document_id, start, end, None)

    def apply_prompt(self, document_id: str, start: int, end: int, instruction: str) -> Generation:
        if not instruction or not instruction.strip():
            raise EmptyInstruction()
        return self._request(GenerationKind.APPLY_PROMPT, document_id, start, end, instruction)

    def continue_text(self, document_id: str, insertion_point: int) -> Generation:
        return self._request(
            GenerationKind.CONTINUE, document_id, insertion_point, insertion_point, None
        )

    def inline_prompt(self, document_id: str, insertion_point: int, instruction: str) -> Generation:
        if not instruction or not instruction.strip():
            raise EmptyInstruction()
        return self._request(
            GenerationKind.INLINE_PROMPT, document_id, insertion_point, insertion_point, instruction
        )

    def get(self, generation_id: str) -> Generation:
        generation = self._generations.get(generation_id)
        if generation is None:
            raise UnknownGeneration(generation_id)
        return generation

    def list(self) -> list[Generation]:
        return [self._generations[gid] for gid in self._order]

    def bundle_for(self, generation_id: str) -> PromptBundle:
        self.get(generation_id)
        return self._bundles[generation_id]

    def resolve(self, generation_id: str, action: str) -> Generation:
        """Settle an offer. Only insert mutates the document, by splicing the
        output over the recorded target; regenerate supersedes and re-renders."""
        generation = self.get(generation_id)
        if generation.status is not GenerationStatus.OFFERED:
            raise AlreadyResolved(generation_id, generation.status.value)
        if action == "insert":
            doc = self._doc(generation.document_id)
            doc.body = richtext.splice(
                doc.body, generation.target_start, generation.target_end, generation.output
            )
            doc.updated_at = self.clock()
            generation.status = GenerationStatus.INSERTED
            self.events.append_event(
                session_id=self.session_id,
                type=EventType.GENERATION_INSERTED,
                payload={
                    "generation_id": generation.id,
                    "document_id": generation.document_id,
                    "kind": generation.kind.value,
                    "target_start": generation.target_start,
                    "target_end": generation.target_end,
                    "output": generation.output,
                    "attempt": generation.attempt,
                    "lineage_id": generation.lineage_id,
                },
            )
            self.after_insert(generation.document_id, len(generation.output))
            return generation
        if action == "discard":
            generation.status = GenerationStatus.DISCARDED
            self.events.append_event(
                session_id=self.session_id,
                type=EventType.GENERATION_DISCARDED,
                payload={"generation_id": generation.id, "document_id": generation.document_id},
            )
            return generation
        if action == "regenerate":
            generation.status = GenerationStatus.SUPERSEDED
            replacement = self._offer(
                generation.kind,
                generation.document_id,
                generation.target_start,
                generation.target_end,
                generation.instruction,
                attempt=generation.attempt + 1,
                lineage_id=generation.lineage_id,
            )
            self.events.append_event(
                session_id=self.session_id,
                type=EventType.GENERATION_REGENERATED,
                payload={
                    "superseded_id": generation.id,
                    "generation": replacement.to_dict(),
                    "style_id": self.engine.current.id,
                },
            )
            return replacement
        raise InvalidRequest(f"unknown resolve action: {action!r}")
