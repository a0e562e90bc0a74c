from __future__ import annotations

from styleloop import richtext
from styleloop.gateway import LlmGateway, MockProvider
from styleloop.model import EventType, Polarity, StyleDescription
from styleloop.telemetry import load_snapshot, save_snapshot
from styleloop.workspace import Workspace, replay_state

from conftest import FakeClock, sequential_ids


def make_workspace(prefix: str = "ws") -> Workspace:
    return Workspace(
        gateway=LlmGateway(MockProvider(), sleeper=lambda _s: None),
        session_id="session-ws",
        clock=FakeClock(),
        id_factory=sequential_ids(prefix),
    )


def test_document_update_reanchors_highlights() -> None:
    workspace = make_workspace()
    doc = workspace.create_document("d", richtext.from_plain("alpha beta gamma"))
    highlight = workspace.add_highlight(doc.id, 6, 10, Polarity.LIKE)
    workspace.update_document(doc.id, body=richtext.from_plain("prefix alpha beta gamma"))
    assert workspace.ledger.get(highlight.id).anchor == (13, 17)


def test_insert_reanchors_highlights_too() -> None:
    workspace = make_workspace()
    doc = workspace.create_document("d", richtext.from_plain("alpha beta gamma"))
    highlight = workspace.add_highlight(doc.id, 6, 10, Polarity.LIKE)
    generation = workspace.continue_text(doc.id, 0)
    workspace.resolve_generation(generation.id, "insert")
    start, end = workspace.ledger.get(highlight.id).anchor
    assert workspace.get_document(doc.id).plain_text()[start:end] == "beta"


def test_typing_accumulates_across_updates_until_window() -> None:
    workspace = make_workspace()
    doc = workspace.create_document("d", richtext.from_plain(""))
    text = ""
    for chunk in range(20):
        text += "01234"
        workspace.update_document(doc.id, body=richtext.from_plain(text))
    analyses = [
        r
        for r in workspace.events.replay()
        if r.type in (EventType.STYLE_UPDATE_AUTOMATIC, EventType.STYLE_NO_UPDATE)
    ]
    assert len(analyses) == 1


def test_feedback_summaries_feed_next_analysis() -> None:
    workspace = make_workspace()
    doc = workspace.create_document("d", richtext.from_plain("steady prose. it flows."))
    workspace.force_refresh(doc.id)
    first_voice = workspace.current_style().description.voice
    workspace.add_manual_highlight(Polarity.LIKE, "short sentences")
    outcome = workspace.force_refresh(doc.id)
    # digest of feedback summaries lands in the candidate's voice section
    new_voice = outcome.comparison and workspace.current_style().description.voice
    assert first_voice != new_voice or outcome.kind.value == "no_update_needed"


def test_snapshot_restore_round_trip(tmp_path) -> None:
    workspace = make_workspace()
    doc = workspace.create_document("d", richtext.from_plain("alpha beta. gamma delta."))
    workspace.add_highlight(doc.id, 0, 5, Polarity.LIKE, reason="opening")
    workspace.set_context(richtext.from_plain("the setting"))
    workspace.edit_style(
        StyleDescription(
            tone="tight",
            voice="direct",
            word_choice="simple",
            sentence_structure="short",
            paragraph_structure="dense",
        )
    )
    workspace.update_settings(analysis_interval_n=40, feedback_mode=True)
    snapshot = workspace.snapshot()
    path = tmp_path / "snap.json"
    save_snapshot(path, snapshot)

    restored = make_workspace(prefix="other")
    restored.restore(load_snapshot(path))
    assert restored.snapshot().to_dict()["documents"] == snapshot.to_dict()["documents"]
    assert restored.current_style().description.tone == "tight"
    assert restored.settings.analysis_interval_n == 40
    assert [h.id for h in restored.list_highlights()] == [
        h.id for h in workspace.list_highlights()
    ]


def run_mixed_session(workspace: Workspace) -> None:
    doc = workspace.create_document("main", richtext.from_plain("a start. of things."))
    other = workspace.create_document("side", richtext.from_plain("another doc."))
    workspace.update_document(doc.id, body=richtext.from_plain("a start. of things. and more."))
    workspace.add_highlight(doc.id, 2, 7, Polarity.LIKE, reason="like it")
    manual = workspace.add_manual_highlight(Polarity.DISLIKE, "filler words")
    workspace.set_highlight_active(manual.id, False)
    workspace.set_context(richtext.from_plain("notes on the piece"))
    generation = workspace.rewrite(doc.id, 0, 7)
    workspace.resolve_generation(generation.id, "insert")
    offered = workspace.continue_text(other.id, 5)
    workspace.resolve_generation(offered.id, "discard")
    workspace.force_refresh(doc.id)
    workspace.edit_style(
        StyleDescription(
            tone="a", voice="b", word_choice="c", sentence_structure="d", paragraph_structure="e"
        )
    )
    default_entry = workspace.style_history()[-1]
    workspace.revert_style(default_entry.profile.id)
    workspace.set_locks(global_style_lock=True)
    workspace.set_locks(document_id=other.id, track_style=False)
    workspace.update_settings(update_threshold=5)
    workspace.page_view("style")


def test_replay_reconstructs_state_from_log() -> None:
    workspace = make_workspace()
    run_mixed_session(workspace)
    state = replay_state(workspace.events.replay())

    live = workspace.snapshot()
    assert [e.profile.id for e in state.style_history] == [
        e.profile.id for e in live.style_history
    ]
    assert {h.id for h in state.highlight_list()} == {h.id for h in live.highlights}
    for live_highlight in live.highlights:
        folded = state.highlights[live_highlight.id]
        assert folded.anchor == live_highlight.anchor
        assert folded.active == live_highlight.active
        assert folded.excerpt == live_highlight.excerpt
    live_hashes = {d.id: richtext.body_hash(d.body) for d in live.documents}
    folded_hashes = {d.id: richtext.body_hash(d.body) for d in state.documents.values()}
    assert folded_hashes == live_hashes
    assert richtext.plain_text(state.context.body) == richtext.plain_text(live.context.body)
    assert state.settings.global_style_lock is True
    assert state.settings.update_threshold == 5
    assert state.documents[live.documents[1].id].track_style is False
