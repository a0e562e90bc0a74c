"""Minimal rich-text tree: paragraphs, headings, lists, styled spans.

All character offsets used elsewhere (highlight anchors, selection ranges,
insertion points) index into the plain-text projection, where top-level
blocks and list items are separated by single newlines.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from typing import Any, Union

from .errors import InvalidRequest, OutOfBounds


@dataclass(frozen=True)
class Span:
    text: str
    bold: bool = False
    italic: bool = False


@dataclass(frozen=True)
class Paragraph:
    spans: tuple[Span, ...] = ()


@dataclass(frozen=True)
class Heading:
    level: int
    spans: tuple[Span, ...] = ()


@dataclass(frozen=True)
class ListBlock:
    ordered: bool
    items: tuple[tuple[Span, ...], ...] = ()


Block = Union[Paragraph, Heading, ListBlock]


@dataclass(frozen=True)
class RichText:
    blocks: tuple[Block, ...] = ()


def text_span(value: str, *, bold: bool = False, italic: bool = False) -> Span:
    return Span(text=value, bold=bold, italic=italic)


def paragraph(*values: str) -> Paragraph:
    return Paragraph(spans=tuple(Span(v) for v in values))


def from_plain(value: str) -> RichText:
    """One paragraph per line; the empty string maps to an empty body."""
    if value == "":
        return RichText()
    blocks: list[Block] = []
    for line in value.split("\n"):
        blocks.append(Paragraph((Span(line),)) if line else Paragraph())
    return RichText(tuple(blocks))


# Internal row model: one row per plain-text line. Rows carry enough block
# metadata to rebuild the tree after a splice.
_Row = tuple[str, Any, tuple[Span, ...]]  # (kind, meta, spans)


def _rows(body: RichText) -> list[_Row]:
    rows: list[_Row] = []
    for block in body.blocks:
        if isinstance(block, Paragraph):
            rows.append(("p", None, block.spans))
        elif isinstance(block, Heading):
            rows.append(("h", block.level, block.spans))
        elif isinstance(block, ListBlock):
            for item in block.items:
                rows.append(("li", block.ordered, item))
            if not block.items:
                rows.append(("li", block.ordered, ()))
        else:  # pragma: no cover - closed union
            raise TypeError(f"unsupported block: {block!r}")
    return rows


def _rebuild(rows: list[_Row]) -> RichText:
    blocks: list[Block] = []
    pending_items: list[tuple[Span, ...]] = []
    pending_ordered: bool | None = None

    def flush_list() -> None:
        nonlocal pending_items, pending_ordered
        if pending_ordered is not None:
            blocks.append(ListBlock(ordered=pending_ordered, items=tuple(pending_items)))
        pending_items = []
        pending_ordered = None

    for kind, meta, spans in rows:
        if kind == "li":
            if pending_ordered is not None and pending_ordered != meta:
                flush_list()
            pending_ordered = bool(meta)
            pending_items.append(spans)
            continue
        flush_list()
        if kind == "p":
            blocks.append(Paragraph(spans))
        else:
            blocks.append(Heading(level=int(meta), spans=spans))
    flush_list()
    return RichText(tuple(blocks))


def _row_text(spans: tuple[Span, ...]) -> str:
    return "".join(s.text for s in spans)


def plain_text(body: RichText) -> str:
    return "\n".join(_row_text(spans) for _, _, spans in _rows(body))


def body_hash(body: RichText) -> str:
    return hashlib.sha256(to_json(body).encode("utf-8")).hexdigest()


def _slice_spans(spans: tuple[Span, ...], start: int, end: int) -> tuple[Span, ...]:
    """Spans covering [start, end) of the row text; empty spans are dropped."""
    out: list[Span] = []
    cursor = 0
    for span in spans:
        span_end = cursor + len(span.text)
        lo = max(start, cursor)
        hi = min(end, span_end)
        if lo < hi:
            out.append(Span(span.text[lo - cursor : hi - cursor], span.bold, span.italic))
        cursor = span_end
    return tuple(out)


def _locate(rows: list[_Row], pos: int) -> tuple[int, int]:
    """Row index and in-row offset for a plain-text position.

    A position on a row boundary resolves to the end of the earlier row.
    """
    cum = 0
    for i, (_, _, spans) in enumerate(rows):
        length = len(_row_text(spans))
        if pos <= cum + length:
            return i, pos - cum
        cum += length + 1  # separator
    raise OutOfBounds(f"position {pos} outside document of length {cum - 1 if rows else 0}")


def splice(body: RichText, start: int, end: int, replacement: str) -> RichText:
    """Replace the plain-text range [start, end) with ``replacement``.

    Deleting across a block boundary merges the adjoining blocks (the earlier
    block's kind wins), mirroring ordinary editor behaviour. The plain-text
    projection of the result always equals P[:start] + replacement + P[end:].
    """
    plain = plain_text(body)
    if not 0 <= start <= end <= len(plain):
        raise OutOfBounds(
            f"splice range [{start}, {end}) outside document of length {len(plain)}"
        )
    if start == end and replacement == "":
        return body

    rows = _rows(body)
    if not rows:
        return RichText((Paragraph((Span(replacement),)),)) if replacement else body

    ri, oi = _locate(rows, start)
    rj, oj = _locate(rows, end)
    kind, meta, spans_i = rows[ri]
    head = _slice_spans(spans_i, 0, oi)
    tail_spans = rows[rj][2]
    tail = _slice_spans(tail_spans, oj, len(_row_text(tail_spans)))
    middle = (Span(replacement),) if replacement else ()
    merged: _Row = (kind, meta, head + middle + tail)
    new_rows = rows[:ri] + [merged] + rows[rj + 1 :]
    return _rebuild(new_rows)


def inserted_chars(old: str, new: str) -> int:
    """Characters inserted between two versions of a plain text.

    Measured as the length of the non-common middle of ``new`` (common prefix
    and suffix stripped); equivalently, length growth plus the length of the
    replaced span. Pure deletions count zero.
    """
    p = 0
    limit = min(len(old), len(new))
    while p < limit and old[p] == new[p]:
        p += 1
    s = 0
    while s < limit - p and old[len(old) - 1 - s] == new[len(new) - 1 - s]:
        s += 1
    return len(new) - p - s


def _span_to_dict(span: Span) -> dict[str, Any]:
    return {"text": span.text, "bold": span.bold, "italic": span.italic}


def _span_from_dict(data: Any) -> Span:
    if not isinstance(data, dict) or not isinstance(data.get("text"), str):
        raise InvalidRequest(f"malformed span: {data!r}")
    return Span(text=data["text"], bold=bool(data.get("bold", False)), italic=bool(data.get("italic", False)))


def serialize(body: RichText) -> dict[str, Any]:
    blocks: list[dict[str, Any]] = []
    for block in body.blocks:
        if isinstance(block, Paragraph):
            blocks.append({"type": "paragraph", "spans": [_span_to_dict(s) for s in block.spans]})
        elif isinstance(block, Heading):
            blocks.append(
                {
                    "type": "heading",
                    "level": block.level,
                    "spans": [_span_to_dict(s) for s in block.spans],
                }
            )
        else:
            blocks.append(
                {
                    "type": "list",
                    "ordered": block.ordered,
                    "items": [[_span_to_dict(s) for s in item] for item in block.items],
                }
            )
    return {"blocks": blocks}


def parse(data: Any) -> RichText:
    if not isinstance(data, dict) or not isinstance(data.get("blocks"), list):
        raise InvalidRequest(f"malformed rich text: {data!r}")
    blocks: list[Block] = []
    for raw in data["blocks"]:
        if not isinstance(raw, dict):
            raise InvalidRequest(f"malformed block: {raw!r}")
        kind = raw.get("type")
        if kind == "paragraph":
            blocks.append(Paragraph(tuple(_span_from_dict(s) for s in raw.get("spans", []))))
        elif kind == "heading":
            level = raw.get("level")
            if not isinstance(level, int) or isinstance(level, bool) or not 1 <= level <= 6:
                raise InvalidRequest(f"malformed heading level: {level!r}")
            blocks.append(Heading(level=level, spans=tuple(_span_from_dict(s) for s in raw.get("spans", []))))
        elif kind == "list":
            items = raw.get("items")
            if not isinstance(items, list):
                raise InvalidRequest("list block requires items")
            blocks.append(
                ListBlock(
                    ordered=bool(raw.get("ordered", False)),
                    items=tuple(tuple(_span_from_dict(s) for s in item) for item in items),
                )
            )
        else:
            raise InvalidRequest(f"unknown block type: {kind!r}")
    return RichText(tuple(blocks))


def to_json(body: RichText) -> str:
    return json.dumps(serialize(body), sort_keys=True, ensure_ascii=False)
