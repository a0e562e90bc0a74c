"""REST boundary: every module operation behind a resource-oriented endpoint.

Bodies use the canonical JSON serialization; rich-text fields also accept a
plain string for convenience (converted to one paragraph per line). Module
errors map onto stable (status, kind) pairs.
"""

from __future__ import annotations

from typing import Any, Optional, Union

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, PlainTextResponse
from pydantic import BaseModel

from . import richtext
from .errors import (
    ConflictError,
    InvalidRequest,
    NotFoundError,
    ProviderError,
    StyleLoopError,
    ValidationError,
)
from .model import (
    Polarity,
    StyleDescription,
    style_description_from_text,
)
from .workspace import Workspace

_STATUS_FOR = (
    (NotFoundError, 404),
    (ConflictError, 409),
    (ValidationError, 400),
    (ProviderError, 502),
)


def _status_of(error: StyleLoopError) -> int:
    for base, status in _STATUS_FOR:
        if isinstance(error, base):
            return status
    return 500


def _body_of(data: Union[dict, str, None]) -> Optional[richtext.RichText]:
    if data is None:
        return None
    if isinstance(data, str):
        return richtext.from_plain(data)
    return richtext.parse(data)


def _description_of(data: Union[dict, str]) -> StyleDescription:
    if isinstance(data, str):
        return style_description_from_text(data)
    if isinstance(data, dict) and "blocks" in data:
        from .model import validate_style_description

        return validate_style_description(richtext.parse(data))
    return StyleDescription.from_dict(data)


class DocumentCreate(BaseModel):
    title: str = "Untitled"
    body: Union[dict, str, None] = None


class DocumentUpdate(BaseModel):
    title: Optional[str] = None
    body: Union[dict, str, None] = None


class StylePut(BaseModel):
    description: Union[dict, str]


class RefreshPost(BaseModel):
    document_id: str


class LocksPut(BaseModel):
    global_style_lock: Optional[bool] = None
    document_id: Optional[str] = None
    track_style: Optional[bool] = None


class ContextPut(BaseModel):
    body: Union[dict, str]


class HighlightPost(BaseModel):
    polarity: str
    document_id: Optional[str] = None
    start: Optional[int] = None
    end: Optional[int] = None
    excerpt: Optional[str] = None
    reason: Optional[str] = None


class HighlightPatch(BaseModel):
    active: bool


class RangeGenerationPost(BaseModel):
    document_id: str
    start: int
    end: int
    instruction: Optional[str] = None


class PointGenerationPost(BaseModel):
    document_id: str
    point: int
    instruction: Optional[str] = None


class ResolvePost(BaseModel):
    action: str


class SettingsPut(BaseModel):
    analysis_interval_n: Optional[int] = None
    update_threshold: Optional[int] = None
    feedback_mode: Optional[bool] = None


class PageViewPost(BaseModel):
    page: str


def _doc_out(doc) -> dict[str, Any]:
    return doc.to_dict()


def create_app(workspace: Workspace) -> FastAPI:
    app = FastAPI(title="styleloop", version="0.1.0")
    app.state.workspace = workspace

    @app.exception_handler(StyleLoopError)
    async def _domain_error(request: Request, exc: StyleLoopError) -> JSONResponse:
        return JSONResponse(
            status_code=_status_of(exc),
            content={"error": {"kind": exc.kind, "message": str(exc)}},
        )

    # --- documents ---

    @app.post("/documents")
    def create_document(body: DocumentCreate) -> dict[str, Any]:
        doc = workspace.create_document(body.title, _body_of(body.body))
        return _doc_out(doc)

    @app.get("/documents")
    def list_documents() -> list[dict[str, Any]]:
        return [_doc_out(d) for d in workspace.list_documents()]

    @app.get("/documents/{document_id}")
    def get_document(document_id: str) -> dict[str, Any]:
        return _doc_out(workspace.get_document(document_id))

    @app.put("/documents/{document_id}")
    def update_document(document_id: str, body: DocumentUpdate) -> dict[str, Any]:
        doc = workspace.update_document(document_id, body=_body_of(body.body), title=body.title)
        return _doc_out(doc)

    # --- style ---

    @app.get("/style")
    def get_style() -> dict[str, Any]:
        profile = workspace.current_style()
        return {"profile": profile.to_dict(), "summary": profile.summary}

    @app.put("/style")
    def put_style(body: StylePut) -> dict[str, Any]:
        profile = workspace.edit_style(_description_of(body.description))
        return {"profile": profile.to_dict()}

    @app.post("/style/refresh")
    def refresh_style(body: RefreshPost) -> dict[str, Any]:
        return workspace.force_refresh(body.document_id).to_dict()

    @app.get("/style/history")
    def style_history() -> dict[str, Any]:
        return {"entries": [e.to_dict() for e in workspace.style_history()]}

    @app.post("/style/revert/{entry_id}")
    def revert_style(entry_id: str) -> dict[str, Any]:
        return {"profile": workspace.revert_style(entry_id).to_dict()}

    @app.put("/style/locks")
    def put_locks(body: LocksPut) -> dict[str, Any]:
        settings = workspace.set_locks(body.global_style_lock, body.document_id, body.track_style)
        return settings.to_dict()

    # --- context ---

    @app.get("/context")
    def get_context() -> dict[str, Any]:
        return workspace.get_context().to_dict()

    @app.put("/context")
    def put_context(body: ContextPut) -> dict[str, Any]:
        return workspace.set_context(_body_of(body.body)).to_dict()

    # --- highlights ---

    @app.post("/highlights")
    def post_highlight(body: HighlightPost) -> dict[str, Any]:
        try:
            polarity = Polarity(body.polarity)
        except ValueError:
            raise InvalidRequest(f"polarity must be like or dislike, got {body.polarity!r}")
        if body.document_id is not None:
            if body.start is None or body.end is None:
                raise InvalidRequest("range highlights require start and end")
            highlight = workspace.add_highlight(
                body.document_id, body.start, body.end, polarity, body.reason
            )
        else:
            highlight = workspace.add_manual_highlight(polarity, body.excerpt or "", body.reason)
        return highlight.to_dict()

    @app.get("/highlights")
    def list_highlights() -> list[dict[str, Any]]:
        return [h.to_dict() for h in workspace.list_highlights()]

    @app.patch("/highlights/{highlight_id}")
    def patch_highlight(highlight_id: str, body: HighlightPatch) -> dict[str, Any]:
        return workspace.set_highlight_active(highlight_id, body.active).to_dict()

    @app.delete("/highlights/{highlight_id}")
    def delete_highlight(highlight_id: str) -> dict[str, Any]:
        workspace.delete_highlight(highlight_id)
        return {"deleted": highlight_id}

    @app.get("/highlights/summaries")
    def highlight_summaries() -> dict[str, Any]:
        return workspace.feedback_summaries().to_dict()

    # --- generations ---

    @app.post("/generations/rewrite")
    def post_rewrite(body: RangeGenerationPost) -> dict[str, Any]:
        return workspace.rewrite(body.document_id, body.start, body.end).to_dict()

    @app.post("/generations/apply")
    def post_apply(body: RangeGenerationPost) -> dict[str, Any]:
        return workspace.apply_prompt(
            body.document_id, body.start, body.end, body.instruction or ""
        ).to_dict()

    @app.post("/generations/continue")
    def post_continue(body: PointGenerationPost) -> dict[str, Any]:
        return workspace.continue_text(body.document_id, body.point).to_dict()

    @app.post("/generations/inline")
    def post_inline(body: PointGenerationPost) -> dict[str, Any]:
        return workspace.inline_prompt(
            body.document_id, body.point, body.instruction or ""
        ).to_dict()

    @app.post("/generations/{generation_id}/resolve")
    def post_resolve(generation_id: str, body: ResolvePost) -> dict[str, Any]:
        return workspace.resolve_generation(generation_id, body.action).to_dict()

    # --- telemetry ---

    @app.get("/telemetry/events")
    def get_events(from_seq: int = 0, limit: int = 100) -> dict[str, Any]:
        records = workspace.events.replay(from_seq)[:limit]
        next_seq = records[-1].seq + 1 if records else from_seq
        return {"events": [r.to_dict() for r in records], "next_seq": next_seq}

    @app.get("/telemetry/counts")
    def get_counts(split: Optional[str] = None) -> dict[str, Any]:
        return workspace.counts(split=split)

    @app.get("/telemetry/timeline")
    def get_timeline(format: Optional[str] = None):
        if format == "dsv":
            return PlainTextResponse(workspace.events.timeline_dsv(workspace.session_id))
        return workspace.timeline().to_dict()

    @app.post("/telemetry/page-view")
    def post_page_view(body: PageViewPost) -> dict[str, Any]:
        return workspace.page_view(body.page).to_dict()

    # --- settings ---

    @app.get("/settings")
    def get_settings() -> dict[str, Any]:
        return workspace.settings.to_dict()

    @app.put("/settings")
    def put_settings(body: SettingsPut) -> dict[str, Any]:
        return workspace.update_settings(
            body.analysis_interval_n, body.update_threshold, body.feedback_mode
        ).to_dict()

    return app
