from __future__ import annotations

import pytest

from styleloop import richtext
from styleloop.engine import StyleEngine
from styleloop.errors import (
    EmptySection,
    InvalidRequest,
    MalformedProviderOutput,
    StaleCandidate,
    UnknownDocument,
    UnknownHistoryEntry,
)
from styleloop.gateway import LlmGateway, MockProvider, TemplateId
from styleloop.model import (
    CandidateUpdate,
    Document,
    EventType,
    Settings,
    StyleComparison,
    StyleDescription,
    StyleProfile,
    StyleSource,
    TriggerCause,
    UpdateOutcomeKind,
    default_style,
)
from styleloop.telemetry import EventLog

from conftest import FakeClock, sequential_ids


def make_engine(
    *,
    settings: Settings | None = None,
    gateway: LlmGateway | None = None,
    summaries=lambda: ("", ""),
) -> tuple[StyleEngine, dict[str, Document], EventLog]:
    clock = FakeClock()
    documents: dict[str, Document] = {}
    events = EventLog(clock=clock)
    engine = StyleEngine(
        gateway or LlmGateway(MockProvider(), sleeper=lambda _s: None),
        settings or Settings(),
        documents,
        events,
        session_id="session-engine",
        summaries=summaries,
        clock=clock,
        id_factory=sequential_ids("sty"),
    )
    return engine, documents, events


def add_doc(documents: dict[str, Document], doc_id: str = "doc-1", text: str = "") -> Document:
    doc = Document(id=doc_id, title="t", body=richtext.from_plain(text))
    documents[doc_id] = doc
    return doc


def candidate_with_rating(engine: StyleEngine, rating: int) -> CandidateUpdate:
    profile = StyleProfile(
        id=f"cand-{rating}-{engine.current.id}",
        summary="",
        description=default_style().description,
        source=StyleSource.AUTOMATIC,
        created_at=0.0,
        summary_generated_at=0.0,
    )
    comparison = StyleComparison(
        old_style_id=engine.current.id,
        new_style_id=profile.id,
        comparison_text="synthetic",
        difference_rating=rating,
    )
    return CandidateUpdate(new_style=profile, comparison=comparison)


# --- register_edit and locks -----------------------------------------------


def test_counter_below_window_gives_no_trigger() -> None:
    engine, documents, _ = make_engine()
    add_doc(documents)
    assert engine.register_edit("doc-1", 99) is None
    assert documents["doc-1"].chars_since_analysis == 99


def test_counter_crossing_window_triggers_and_resets() -> None:
    engine, documents, _ = make_engine()
    add_doc(documents)
    engine.register_edit("doc-1", 99)
    trigger = engine.register_edit("doc-1", 1)
    assert trigger is not None
    assert trigger.cause is TriggerCause.AUTOMATIC_COUNTER
    assert documents["doc-1"].chars_since_analysis == 0


def test_global_lock_suppresses_triggers() -> None:
    engine, documents, _ = make_engine()
    add_doc(documents)
    engine.settings.global_style_lock = True
    assert engine.register_edit("doc-1", 500) is None
    assert documents["doc-1"].chars_since_analysis == 500


def test_per_document_flag_suppresses_only_that_document() -> None:
    engine, documents, _ = make_engine()
    add_doc(documents, "doc-1")
    add_doc(documents, "doc-2")
    engine.set_locks(document_id="doc-1", track_style=False)
    assert engine.register_edit("doc-1", 200) is None
    assert engine.register_edit("doc-2", 200) is not None


def test_unlocking_lets_accumulated_counter_fire_on_next_edit() -> None:
    engine, documents, _ = make_engine()
    add_doc(documents)
    engine.set_locks(global_style_lock=True)
    engine.register_edit("doc-1", 500)
    engine.set_locks(global_style_lock=False)
    assert engine.register_edit("doc-1", 1) is not None


def test_register_edit_unknown_document() -> None:
    engine, _, _ = make_engine()
    with pytest.raises(UnknownDocument):
        engine.register_edit("ghost", 10)


def test_set_locks_requires_paired_arguments() -> None:
    engine, _, _ = make_engine()
    with pytest.raises(InvalidRequest):
        engine.set_locks(document_id="doc-1")


def test_triggers_while_in_flight_coalesce_to_one_pending() -> None:
    engine, documents, _ = make_engine()
    add_doc(documents)
    engine.begin_analysis("doc-1")
    assert engine.register_edit("doc-1", 150) is None
    assert engine.register_edit("doc-1", 150) is None
    pending = engine.finish_analysis("doc-1")
    assert pending is not None
    assert documents["doc-1"].chars_since_analysis == 0
    assert engine.finish_analysis("doc-1") is None


def test_begin_analysis_rejects_overlap() -> None:
    engine, documents, _ = make_engine()
    add_doc(documents)
    engine.begin_analysis("doc-1")
    with pytest.raises(RuntimeError):
        engine.begin_analysis("doc-1")


# --- compute_candidate -------------------------------------------------------


def test_candidate_description_carries_true_sentence_statistic() -> None:
    engine, documents, _ = make_engine()
    doc = add_doc(documents, text="one two three. four five six. seven eight nine.")
    candidate = engine.compute_candidate(doc.body, engine.current, "", "")
    assert "avg_sentence_len=3 " in candidate.new_style.description.sentence_structure


def test_reanalyzing_identical_document_rates_zero() -> None:
    engine, documents, _ = make_engine()
    doc = add_doc(documents, text="steady prose. steady prose.")
    first = engine.compute_candidate(doc.body, engine.current, "", "")
    engine.commit_if_significant(first, StyleSource.AUTOMATIC)
    second = engine.compute_candidate(doc.body, engine.current, "", "")
    assert second.comparison.difference_rating == 0


def test_out_of_range_provider_rating_is_rejected_not_clamped() -> None:
    class RatingElevenProvider:
        name = "eleven"

        def complete(self, request, model):
            if request.template_id is TemplateId.STYLE_COMPARE:
                return "RATING: 11\nway off"
            return MockProvider().complete(request, model)

    gateway = LlmGateway(RatingElevenProvider(), sleeper=lambda _s: None, self_eval_enabled=False)
    engine, documents, _ = make_engine(gateway=gateway)
    doc = add_doc(documents, text="words words words.")
    with pytest.raises(MalformedProviderOutput):
        engine.compute_candidate(doc.body, engine.current, "", "")


# --- the threshold gate ------------------------------------------------------


def test_rating_above_threshold_commits() -> None:
    engine, _, _ = make_engine()
    outcome = engine.commit_if_significant(candidate_with_rating(engine, 4), StyleSource.AUTOMATIC)
    assert outcome.kind is UpdateOutcomeKind.COMMITTED
    assert engine.current.id == outcome.committed_style.id


def test_rating_at_threshold_is_no_update() -> None:
    engine, _, _ = make_engine()
    before = engine.current.id
    outcome = engine.commit_if_significant(candidate_with_rating(engine, 3), StyleSource.AUTOMATIC)
    assert outcome.kind is UpdateOutcomeKind.NO_UPDATE_NEEDED
    assert engine.current.id == before


def test_rating_zero_is_no_update() -> None:
    engine, _, _ = make_engine()
    outcome = engine.commit_if_significant(candidate_with_rating(engine, 0), StyleSource.AUTOMATIC)
    assert outcome.kind is UpdateOutcomeKind.NO_UPDATE_NEEDED


def test_no_update_emits_event_and_commit_emits_event() -> None:
    engine, _, events = make_engine()
    engine.commit_if_significant(candidate_with_rating(engine, 9), StyleSource.AUTOMATIC)
    engine.commit_if_significant(candidate_with_rating(engine, 1), StyleSource.AUTOMATIC)
    types = [r.type for r in events.replay()]
    assert EventType.STYLE_UPDATE_AUTOMATIC in types
    assert EventType.STYLE_NO_UPDATE in types


def test_stale_candidate_rejected() -> None:
    engine, _, _ = make_engine()
    stale = candidate_with_rating(engine, 8)
    engine.commit_if_significant(candidate_with_rating(engine, 9), StyleSource.AUTOMATIC)
    with pytest.raises(StaleCandidate):
        engine.commit_if_significant(stale, StyleSource.AUTOMATIC)


def test_custom_threshold_respected() -> None:
    engine, _, _ = make_engine(settings=Settings(update_threshold=7))
    assert (
        engine.commit_if_significant(candidate_with_rating(engine, 7), StyleSource.AUTOMATIC).kind
        is UpdateOutcomeKind.NO_UPDATE_NEEDED
    )
    assert (
        engine.commit_if_significant(candidate_with_rating(engine, 8), StyleSource.AUTOMATIC).kind
        is UpdateOutcomeKind.COMMITTED
    )


# --- force refresh -----------------------------------------------------------


def test_force_refresh_bypasses_counter() -> None:
    engine, documents, events = make_engine()
    doc = add_doc(documents, text="some prose that reads evenly. more of it here.")
    doc.chars_since_analysis = 10
    outcome = engine.force_refresh("doc-1")
    assert outcome.kind is UpdateOutcomeKind.COMMITTED
    assert doc.chars_since_analysis == 0


def test_force_refresh_overrides_global_lock() -> None:
    engine, documents, events = make_engine()
    add_doc(documents, text="prose here. it keeps going.")
    engine.settings.global_style_lock = True
    engine.force_refresh("doc-1")
    types = [r.type for r in events.replay()]
    assert EventType.STYLE_UPDATE_MANUAL_REQUEST in types


def test_force_refresh_on_unchanged_document_is_no_update() -> None:
    engine, documents, _ = make_engine()
    add_doc(documents, text="prose here. it keeps going.")
    first = engine.force_refresh("doc-1")
    assert first.kind is UpdateOutcomeKind.COMMITTED
    second = engine.force_refresh("doc-1")
    assert second.kind is UpdateOutcomeKind.NO_UPDATE_NEEDED


def test_force_refresh_unknown_document() -> None:
    engine, _, _ = make_engine()
    with pytest.raises(UnknownDocument):
        engine.force_refresh("ghost")


# --- direct edits ------------------------------------------------------------


def edited_description(marker: str) -> StyleDescription:
    return StyleDescription(
        tone=f"tone {marker}",
        voice=f"voice {marker}",
        word_choice=f"words {marker}",
        sentence_structure=f"sentences {marker}",
        paragraph_structure=f"paragraphs {marker}",
    )


def test_direct_edit_commits_without_gate() -> None:
    engine, _, events = make_engine()
    profile = engine.edit_style_directly(edited_description("x"))
    assert profile.source is StyleSource.MANUAL_EDIT
    assert engine.current.id == profile.id
    assert EventType.STYLE_UPDATE_DIRECT_EDIT in [r.type for r in events.replay()]


def test_direct_edit_identical_description_still_commits_with_rating_zero() -> None:
    engine, _, _ = make_engine()
    profile = engine.edit_style_directly(engine.current.description)
    entry = engine.history()[0]
    assert entry.profile.id == profile.id
    assert entry.comparison.difference_rating == 0


def test_direct_edit_missing_section_rejected_without_history_entry() -> None:
    engine, _, _ = make_engine()
    body = richtext.from_plain("Tone: calm\nVoice: mine")
    before = len(engine.history())
    with pytest.raises(Exception) as excinfo:
        engine.edit_style_directly(body)
    assert excinfo.type.__name__ in ("MissingSection", "EmptySection")
    assert len(engine.history()) == before


def test_commit_refreshes_summary_after_commit_timestamp() -> None:
    engine, _, _ = make_engine()
    profile = engine.edit_style_directly(edited_description("fresh"))
    assert profile.summary
    assert profile.summary_generated_at >= profile.created_at


# --- history and revert --------------------------------------------------------


def test_fresh_engine_has_single_default_entry_without_comparison() -> None:
    engine, _, _ = make_engine()
    entries = engine.history()
    assert len(entries) == 1
    assert entries[0].profile.source is StyleSource.DEFAULT
    assert entries[0].comparison is None


def test_two_commits_give_three_entries_and_two_comparisons() -> None:
    engine, _, _ = make_engine()
    engine.edit_style_directly(edited_description("one"))
    engine.edit_style_directly(edited_description("two"))
    entries = engine.history()
    assert len(entries) == 3
    assert sum(1 for e in entries if e.comparison is not None) == 2


def test_comparisons_chain_without_gaps() -> None:
    engine, _, _ = make_engine()
    engine.edit_style_directly(edited_description("one"))
    engine.edit_style_directly(edited_description("two"))
    engine.revert_style(engine.history()[-1].profile.id)
    entries = list(reversed(engine.history()))  # oldest first
    for older, newer in zip(entries, entries[1:]):
        assert newer.comparison is not None
        assert newer.comparison.old_style_id == older.profile.id
        assert newer.comparison.new_style_id == newer.profile.id


def test_revert_appends_new_entry_with_target_description() -> None:
    engine, _, events = make_engine()
    original = engine.current
    engine.edit_style_directly(edited_description("replacement"))
    restored = engine.revert_style(original.id)
    assert restored.source is StyleSource.REVERT
    assert restored.description == original.description
    assert restored.id != original.id
    assert len(engine.history()) == 3
    assert EventType.STYLE_REVERT in [r.type for r in events.replay()]


def test_revert_to_current_head_appends_rating_zero_entry() -> None:
    engine, _, _ = make_engine()
    engine.revert_style(engine.current.id)
    head = engine.history()[0]
    assert head.comparison.difference_rating == 0


def test_revert_of_revert_restores_original_content() -> None:
    engine, _, _ = make_engine()
    engine.edit_style_directly(edited_description("detour"))
    detour_head = engine.current
    origin = engine.history()[-1].profile  # the default entry
    engine.revert_style(origin.id)
    engine.revert_style(detour_head.id)
    assert engine.current.description == detour_head.description


def test_revert_unknown_entry() -> None:
    engine, _, _ = make_engine()
    with pytest.raises(UnknownHistoryEntry):
        engine.revert_style("nope")


def test_history_is_append_only_under_mixed_operations() -> None:
    engine, documents, _ = make_engine()
    add_doc(documents, text="a steady base of prose. it has sentences.")
    seen: list[tuple[int, str]] = []

    def snapshot() -> list[tuple[int, str]]:
        return [(e.seq, e.profile.id) for e in reversed(engine.history())]

    engine.edit_style_directly(edited_description("first"))
    seen = snapshot()
    engine.force_refresh("doc-1")
    assert snapshot()[: len(seen)] == seen
    seen = snapshot()
    engine.revert_style(engine.history()[-1].profile.id)
    assert snapshot()[: len(seen)] == seen
    seqs = [seq for seq, _ in snapshot()]
    assert seqs == sorted(seqs)
    assert len(set(seqs)) == len(seqs)
