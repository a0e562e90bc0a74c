from __future__ import annotations

import pytest
from hypothesis import given, settings, strategies as st

from styleloop.errors import InvalidRequest, OutOfBounds
from styleloop.richtext import (
    Heading,
    ListBlock,
    Paragraph,
    RichText,
    Span,
    from_plain,
    inserted_chars,
    parse,
    plain_text,
    serialize,
    splice,
)

_TEXT = st.text(alphabet="abcdef !?.,", min_size=0, max_size=10)

_spans = st.builds(Span, text=_TEXT, bold=st.booleans(), italic=st.booleans())
_span_tuples = st.tuples() | st.lists(_spans, min_size=1, max_size=3).map(tuple)

_blocks = st.one_of(
    st.builds(Paragraph, spans=_span_tuples),
    st.builds(Heading, level=st.integers(min_value=1, max_value=3), spans=_span_tuples),
    st.builds(
        ListBlock,
        ordered=st.booleans(),
        items=st.lists(_span_tuples, min_size=1, max_size=3).map(tuple),
    ),
)

_bodies = st.lists(_blocks, min_size=0, max_size=5).map(tuple).map(RichText)


@given(_bodies)
@settings(max_examples=200)
def test_serialize_parse_round_trip(body: RichText) -> None:
    assert parse(serialize(body)) == body


@given(_bodies, st.data())
@settings(max_examples=300)
def test_splice_matches_plain_text_oracle(body: RichText, data: st.DataObject) -> None:
    plain = plain_text(body)
    start = data.draw(st.integers(min_value=0, max_value=len(plain)))
    end = data.draw(st.integers(min_value=start, max_value=len(plain)))
    replacement = data.draw(_TEXT)
    result = splice(body, start, end, replacement)
    assert plain_text(result) == plain[:start] + replacement + plain[end:]


@given(st.text(alphabet="abc\n ", max_size=30))
def test_from_plain_round_trips_through_plain_text(value: str) -> None:
    assert plain_text(from_plain(value)) == value


def test_plain_text_joins_blocks_and_items_with_newlines() -> None:
    body = RichText(
        (
            Paragraph((Span("one"),)),
            Heading(2, (Span("two"),)),
            ListBlock(False, ((Span("a"),), (Span("b"),))),
        )
    )
    assert plain_text(body) == "one\ntwo\na\nb"


def test_splice_replaces_selection_inside_one_block() -> None:
    body = from_plain("hello world")
    result = splice(body, 6, 11, "there")
    assert plain_text(result) == "hello there"


def test_splice_insertion_keeps_surrounding_spans() -> None:
    body = RichText((Paragraph((Span("bold", bold=True), Span(" plain"))),))
    result = splice(body, 4, 4, "X")
    assert plain_text(result) == "boldX plain"
    block = result.blocks[0]
    assert isinstance(block, Paragraph)
    assert block.spans[0] == Span("bold", bold=True)


def test_splice_across_blocks_merges_them() -> None:
    body = from_plain("first\nsecond")
    result = splice(body, 3, 9, "")
    assert plain_text(result) == "firond"
    assert len(result.blocks) == 1


def test_splice_into_empty_body_creates_paragraph() -> None:
    result = splice(RichText(), 0, 0, "fresh")
    assert plain_text(result) == "fresh"


def test_splice_out_of_bounds_rejected() -> None:
    with pytest.raises(OutOfBounds):
        splice(from_plain("abc"), 0, 4, "x")


def test_parse_rejects_unknown_block_type() -> None:
    with pytest.raises(InvalidRequest):
        parse({"blocks": [{"type": "table"}]})


def test_parse_rejects_bad_span() -> None:
    with pytest.raises(InvalidRequest):
        parse({"blocks": [{"type": "paragraph", "spans": [{"bold": True}]}]})


@pytest.mark.parametrize(
    ("old", "new", "expected"),
    [
        ("", "abc", 3),
        ("abc", "abc", 0),
        ("abc", "abXc", 1),
        ("abc", "aXYc", 2),  # one replaced char, net growth one
        ("abcdef", "abef", 0),  # pure deletion
        ("abc", "", 0),
        ("aaa", "aaaa", 1),
    ],
)
def test_inserted_chars(old: str, new: str, expected: int) -> None:
    assert inserted_chars(old, new) == expected
