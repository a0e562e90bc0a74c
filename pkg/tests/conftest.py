from __future__ import annotations

from typing import Callable

import pytest

from styleloop.gateway import LlmGateway, MockProvider, RecordingProvider
from styleloop.workspace import Workspace


class FakeClock:
    """Deterministic, strictly increasing clock."""

    def __init__(self, start: float = 1_000_000.0, step: float = 1.0):
        self.now = start
        self.step = step

    def __call__(self) -> float:
        self.now += self.step
        return self.now


def sequential_ids(prefix: str = "id") -> Callable[[], str]:
    counter = {"n": 0}

    def factory() -> str:
        counter["n"] += 1
        return f"{prefix}-{counter['n']:06d}"

    return factory


@pytest.fixture
def clock() -> FakeClock:
    return FakeClock()


@pytest.fixture
def recording_provider() -> RecordingProvider:
    return RecordingProvider(MockProvider())


@pytest.fixture
def gateway(recording_provider: RecordingProvider) -> LlmGateway:
    return LlmGateway(recording_provider, sleeper=lambda _s: None)


@pytest.fixture
def workspace(gateway: LlmGateway, clock: FakeClock) -> Workspace:
    return Workspace(
        gateway=gateway,
        session_id="session-test",
        clock=clock,
        id_factory=sequential_ids(),
    )


def make_workspace(session_id: str = "session-test", prefix: str = "id") -> Workspace:
    return Workspace(
        gateway=LlmGateway(MockProvider(), sleeper=lambda _s: None),
        session_id=session_id,
        clock=FakeClock(),
        id_factory=sequential_ids(prefix),
    )
