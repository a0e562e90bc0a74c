"""Provider-agnostic completion layer.

Owns template rendering with strict placeholder accounting, retry/backoff,
tier routing (fast models for style analysis, strong models for generation),
a deterministic mock provider that the whole test suite runs against, a thin
HTTP client for OpenAI-compatible endpoints, and a recorded-response replay
provider for working from transcripts.
"""

from __future__ import annotations

import json
import logging
import random
import re
import time
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Callable, Mapping, Optional, Protocol

import hashlib

from .errors import (
    MalformedProviderOutput,
    MissingBinding,
    ProviderFailure,
    ProviderTimeout,
    TransientProviderError,
    UnusedBinding,
)

logger = logging.getLogger(__name__)


class TemplateId(str, Enum):
    STYLE_EXTRACT = "style_extract"
    STYLE_COMPARE = "style_compare"
    STYLE_SUMMARIZE = "style_summarize"
    FEEDBACK_SUMMARIZE = "feedback_summarize"
    REWRITE = "rewrite"
    APPLY = "apply"
    CONTINUE = "continue"
    INLINE = "inline"
    SELF_EVAL = "self_eval"


class Tier(str, Enum):
    FAST = "fast"
    STRONG = "strong"


# Placeholder contract per template; render() enforces it in both directions.
TEMPLATE_PLACEHOLDERS: dict[TemplateId, frozenset[str]] = {
    TemplateId.STYLE_EXTRACT: frozenset({"document", "style", "like_summary", "dislike_summary"}),
    TemplateId.STYLE_COMPARE: frozenset({"old_style", "new_style"}),
    TemplateId.STYLE_SUMMARIZE: frozenset({"style"}),
    TemplateId.FEEDBACK_SUMMARIZE: frozenset({"polarity", "items"}),
    TemplateId.REWRITE: frozenset({"style", "selection"}),
    TemplateId.APPLY: frozenset({"style", "selection", "instruction"}),
    TemplateId.CONTINUE: frozenset({"style", "context", "window"}),
    TemplateId.INLINE: frozenset({"style", "context", "window", "instruction"}),
    TemplateId.SELF_EVAL: frozenset({"template", "inputs", "output"}),
}

# Style analysis runs on the fast tier; everything user-facing on the strong.
DEFAULT_TIERS: dict[TemplateId, Tier] = {
    TemplateId.STYLE_EXTRACT: Tier.FAST,
    TemplateId.STYLE_COMPARE: Tier.FAST,
    TemplateId.STYLE_SUMMARIZE: Tier.FAST,
    TemplateId.FEEDBACK_SUMMARIZE: Tier.STRONG,
    TemplateId.REWRITE: Tier.STRONG,
    TemplateId.APPLY: Tier.STRONG,
    TemplateId.CONTINUE: Tier.STRONG,
    TemplateId.INLINE: Tier.STRONG,
    TemplateId.SELF_EVAL: Tier.STRONG,
}

_MAX_LENGTHS: dict[TemplateId, int] = {
    TemplateId.STYLE_EXTRACT: 800,
    TemplateId.STYLE_COMPARE: 400,
    TemplateId.STYLE_SUMMARIZE: 300,
    TemplateId.FEEDBACK_SUMMARIZE: 400,
    TemplateId.REWRITE: 1024,
    TemplateId.APPLY: 1024,
    TemplateId.CONTINUE: 1024,
    TemplateId.INLINE: 1024,
    TemplateId.SELF_EVAL: 8,
}

_CREATIVE = frozenset(
    {TemplateId.REWRITE, TemplateId.APPLY, TemplateId.CONTINUE, TemplateId.INLINE}
)

_PLACEHOLDER_RE = re.compile(r"\{([a-z_]+)\}")


@dataclass(frozen=True)
class CompletionRequest:
    """One completion call.

    ``bindings`` carries the structured inputs the prompt was rendered from;
    real providers see only ``rendered_prompt``, while the deterministic mock
    uses the bindings to apply its per-template rules without parsing prose.
    """

    template_id: TemplateId
    rendered_prompt: str
    bindings: Mapping[str, str]
    max_length: int
    determinism: str  # "deterministic" | "creative"

    def __post_init__(self) -> None:
        if not self.rendered_prompt:
            raise MalformedProviderOutput("rendered_prompt must be non-empty")


@dataclass(frozen=True)
class ProviderProfile:
    name: str
    fast_model: str = "fast-default"
    strong_model: str = "strong-default"
    tiers: Mapping[TemplateId, Tier] = field(default_factory=lambda: dict(DEFAULT_TIERS))
    endpoint: str = ""

    def __post_init__(self) -> None:
        missing = [t.value for t in TemplateId if t not in self.tiers]
        if missing:
            raise ValueError(f"provider profile missing tiers for: {missing}")

    def model_for(self, template_id: TemplateId) -> str:
        return self.fast_model if self.tiers[template_id] is Tier.FAST else self.strong_model


def render(template_text: str, bindings: Mapping[str, str]) -> str:
    """Pure substitution with strict accounting on both sides."""
    placeholders = set(_PLACEHOLDER_RE.findall(template_text))
    for name in sorted(placeholders):
        if name not in bindings:
            raise MissingBinding(name)
    for name in sorted(bindings):
        if name not in placeholders:
            raise UnusedBinding(name)

    def _sub(match: re.Match[str]) -> str:
        return bindings[match.group(1)]

    return _PLACEHOLDER_RE.sub(_sub, template_text)


class TemplateLibrary:
    """Versioned prompt texts loaded from a directory of ``<id>.txt`` files."""

    def __init__(self, directory: str | Path | None = None):
        self.directory = Path(directory) if directory else Path(__file__).parent / "templates"
        self._texts: dict[TemplateId, str] = {}
        for template_id in TemplateId:
            path = self.directory / f"{template_id.value}.txt"
            text = path.read_text(encoding="utf-8")
            found = set(_PLACEHOLDER_RE.findall(text))
            expected = TEMPLATE_PLACEHOLDERS[template_id]
            if found != expected:
                raise ValueError(
                    f"template {template_id.value} placeholders {sorted(found)} "
                    f"do not match contract {sorted(expected)}"
                )
            self._texts[template_id] = text

    def text(self, template_id: TemplateId) -> str:
        return self._texts[template_id]


class Provider(Protocol):
    name: str

    def complete(self, request: CompletionRequest, model: str) -> str: ...


# --- deterministic mock rules -------------------------------------------------


def content_hash8(*parts: str) -> str:
    """First 8 hex chars of the SHA-256 of the unit-separated parts."""
    joined = "\x1f".join(parts)
    return hashlib.sha256(joined.encode("utf-8")).hexdigest()[:8]


def split_sentences(text: str) -> list[str]:
    return [s for s in re.split(r"[.!?]+", text) if s.strip()]


def mean_sentence_length(text: str) -> float:
    """Mean word count per sentence, sentences split on . ! ?"""
    sentences = split_sentences(text)
    if not sentences:
        return 0.0
    return sum(len(s.split()) for s in sentences) / len(sentences)


def format_stat(value: float) -> str:
    """Canonical number rendering for mock stats: 5 -> "5", 7.5 -> "7.5"."""
    return format(round(value, 2), "g")


def lexical_variety_bucket(text: str) -> str:
    tokens = re.findall(r"[a-z0-9']+", text.lower())
    if not tokens:
        return "low"
    ratio = len(set(tokens)) / len(tokens)
    if ratio < 0.4:
        return "low"
    if ratio < 0.7:
        return "mid"
    return "high"


def exclamation_bucket(text: str) -> str:
    sentences = split_sentences(text)
    density = text.count("!") / max(1, len(sentences))
    if density == 0:
        return "none"
    if density <= 0.5:
        return "occasional"
    return "frequent"


def levenshtein(a: str, b: str) -> int:
    if a == b:
        return 0
    # trimming a shared prefix/suffix never changes the edit distance
    lo = 0
    hi_a, hi_b = len(a), len(b)
    while lo < hi_a and lo < hi_b and a[lo] == b[lo]:
        lo += 1
    while hi_a > lo and hi_b > lo and a[hi_a - 1] == b[hi_b - 1]:
        hi_a -= 1
        hi_b -= 1
    a, b = a[lo:hi_a], b[lo:hi_b]
    if not a:
        return len(b)
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i]
        for j, cb in enumerate(b, start=1):
            cost = 0 if ca == cb else 1
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + cost))
        prev = cur
    return prev[len(b)]


def normalized_edit_distance(a: str, b: str) -> float:
    longest = max(len(a), len(b))
    if longest == 0:
        return 0.0
    return levenshtein(a, b) / longest


# Which bindings feed each template's integrity tag. The tag doubles as the
# mock's self-evaluation witness: an output is scored 10 exactly when it
# still embeds the tag recomputed from the same inputs.
_TAG_FIELDS: dict[TemplateId, tuple[str, ...]] = {
    TemplateId.STYLE_EXTRACT: ("document", "like_summary", "dislike_summary"),
    TemplateId.STYLE_COMPARE: ("old_style", "new_style"),
    TemplateId.STYLE_SUMMARIZE: ("style",),
    TemplateId.REWRITE: ("style", "selection"),
    TemplateId.APPLY: ("style", "selection", "instruction"),
    TemplateId.CONTINUE: ("style", "context", "window"),
    TemplateId.INLINE: ("style", "context", "window", "instruction"),
}

_TAG_PREFIX: dict[TemplateId, str] = {
    TemplateId.STYLE_EXTRACT: "SX",
    TemplateId.STYLE_COMPARE: "SC",
    TemplateId.STYLE_SUMMARIZE: "SS",
    TemplateId.REWRITE: "RW",
    TemplateId.APPLY: "AP",
    TemplateId.CONTINUE: "CT",
    TemplateId.INLINE: "IN",
}


def mock_tag(template_id: TemplateId, bindings: Mapping[str, str]) -> str:
    fields = _TAG_FIELDS[template_id]
    return f"{_TAG_PREFIX[template_id]}:{content_hash8(*(bindings[f] for f in fields))}"


def _mock_style_extract(bindings: Mapping[str, str]) -> str:
    document = bindings["document"]
    sentences = split_sentences(document)
    paragraphs = [p for p in document.split("\n") if p.strip()]
    para_mean = len(sentences) / max(1, len(paragraphs))
    digest = content_hash8(bindings["like_summary"], bindings["dislike_summary"])
    tag = mock_tag(TemplateId.STYLE_EXTRACT, bindings)
    return "\n".join(
        [
            f"Tone: Even, measured delivery; exclamation_use={exclamation_bucket(document)}.",
            f"Voice: Steady narration shaped by reader feedback; feedback_digest={digest}.",
            f"Word Choice: Concrete vocabulary; lexical_variety={lexical_variety_bucket(document)}.",
            f"Sentence Structure: avg_sentence_len={format_stat(mean_sentence_length(document))} words per sentence.",
            f"Paragraph Structure: avg_paragraph_len={format_stat(para_mean)} sentences per paragraph. [{tag}]",
        ]
    )


def _mock_style_compare(bindings: Mapping[str, str]) -> str:
    old, new = bindings["old_style"], bindings["new_style"]
    rating = min(10, round(10 * normalized_edit_distance(old, new)))
    tag = mock_tag(TemplateId.STYLE_COMPARE, bindings)
    return f"RATING: {rating}\n[{tag}] The descriptions differ by roughly {rating}/10 of their text."


def mock_complete(request: CompletionRequest) -> str:
    """Per-template deterministic rules; a pure function of the request."""
    b = request.bindings
    tid = request.template_id
    if tid is TemplateId.STYLE_EXTRACT:
        return _mock_style_extract(b)
    if tid is TemplateId.STYLE_COMPARE:
        return _mock_style_compare(b)
    if tid is TemplateId.STYLE_SUMMARIZE:
        return f"Measured, plain-spoken profile. [{mock_tag(tid, b)}]"
    if tid is TemplateId.FEEDBACK_SUMMARIZE:
        items = json.loads(b["items"])
        excerpts = sorted(item["excerpt"] for item in items)
        return "; ".join(excerpts)
    if tid is TemplateId.REWRITE:
        return f"[{mock_tag(tid, b)}]{b['selection']}"
    if tid is TemplateId.APPLY:
        return f"[{mock_tag(tid, b)}]{b['selection']}"
    if tid is TemplateId.CONTINUE:
        return f"[{mock_tag(tid, b)}] The text continues in the established register."
    if tid is TemplateId.INLINE:
        return f"[{mock_tag(tid, b)}] {b['instruction']}"
    if tid is TemplateId.SELF_EVAL:
        try:
            inputs = json.loads(b["inputs"])
            source = TemplateId(b["template"])
            expected = mock_tag(source, inputs)
        except (KeyError, ValueError):
            return "0"
        return "10" if expected in b["output"] else "0"
    raise MalformedProviderOutput(f"no mock rule for template {tid}")  # pragma: no cover


class MockProvider:
    """Deterministic offline provider; the oracle the test suite runs on."""

    name = "mock"

    def complete(self, request: CompletionRequest, model: str) -> str:
        return mock_complete(request)


def request_hash(request: CompletionRequest) -> str:
    key = f"{request.template_id.value}\x1f{request.rendered_prompt}"
    return hashlib.sha256(key.encode("utf-8")).hexdigest()


class ReplayProvider:
    """Serves canned responses recorded from a real provider.

    Fixture files are named ``<request-hash>.txt``; a missing fixture is a
    permanent failure so drift shows up instead of silently degrading.
    """

    name = "replay"

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)

    def complete(self, request: CompletionRequest, model: str) -> str:
        path = self.directory / f"{request_hash(request)}.txt"
        if not path.exists():
            raise ProviderFailure(f"no recorded response for {request.template_id.value} ({path.name})")
        return path.read_text(encoding="utf-8")


class RecordingProvider:
    """Wraps a provider, keeping a transcript and optionally writing fixtures."""

    def __init__(self, inner: Provider, fixture_dir: str | Path | None = None):
        self.inner = inner
        self.name = f"recording({inner.name})"
        self.fixture_dir = Path(fixture_dir) if fixture_dir else None
        self.requests: list[tuple[CompletionRequest, str]] = []

    def complete(self, request: CompletionRequest, model: str) -> str:
        result = self.inner.complete(request, model)
        self.requests.append((request, model))
        if self.fixture_dir is not None:
            self.fixture_dir.mkdir(parents=True, exist_ok=True)
            (self.fixture_dir / f"{request_hash(request)}.txt").write_text(result, encoding="utf-8")
        return result


class HttpProvider:
    """Minimal client for an OpenAI-compatible chat-completions endpoint."""

    name = "http"

    def __init__(
        self,
        base_url: str,
        api_key: str = "",
        timeout: float = 60.0,
        transport: Any = None,
    ):
        import httpx

        self.base_url = base_url.rstrip("/")
        headers = {"Authorization": f"Bearer {api_key}"} if api_key else {}
        self._client = httpx.Client(
            base_url=self.base_url, headers=headers, timeout=timeout, transport=transport
        )

    def complete(self, request: CompletionRequest, model: str) -> str:
        import httpx

        body = {
            "model": model,
            "messages": [{"role": "user", "content": request.rendered_prompt}],
            "max_tokens": request.max_length,
            "temperature": 0.0 if request.determinism == "deterministic" else 0.7,
        }
        try:
            response = self._client.post("/chat/completions", json=body)
        except httpx.TimeoutException as exc:
            raise ProviderTimeout(str(exc)) from exc
        except httpx.HTTPError as exc:
            raise TransientProviderError(str(exc)) from exc
        if response.status_code == 429 or response.status_code >= 500:
            raise TransientProviderError(f"HTTP {response.status_code}: {response.text[:200]}")
        if response.status_code >= 400:
            raise ProviderFailure(f"HTTP {response.status_code}: {response.text[:200]}")
        try:
            return response.json()["choices"][0]["message"]["content"]
        except (KeyError, IndexError, ValueError) as exc:
            raise MalformedProviderOutput(f"unexpected response shape: {response.text[:200]}") from exc


@dataclass(frozen=True)
class RetryPolicy:
    attempts: int = 3
    backoff: float = 0.05
    jitter: float = 0.5


@dataclass(frozen=True)
class SanityEntry:
    template_id: TemplateId
    score: int
    passed: bool  # score >= 8


_RATING_RE = re.compile(r"^RATING:\s*(-?\d+)$")


def parse_comparison_output(text: str) -> tuple[int, str]:
    """Strict parse of a style-comparison completion.

    Out-of-range or non-integer ratings are rejected, never clamped, so
    provider drift surfaces as an error.
    """
    first, _, rest = text.partition("\n")
    match = _RATING_RE.match(first.strip())
    if match is None:
        raise MalformedProviderOutput(f"comparison output has no rating line: {first[:80]!r}")
    rating = int(match.group(1))
    if not 0 <= rating <= 10:
        raise MalformedProviderOutput(f"difference rating {rating} outside [0, 10]")
    return rating, rest.strip()


def parse_self_eval_score(text: str) -> int:
    stripped = text.strip()
    if not re.fullmatch(r"-?\d+", stripped):
        raise MalformedProviderOutput(f"self-evaluation output is not an integer: {text[:80]!r}")
    score = int(stripped)
    if not 0 <= score <= 10:
        raise MalformedProviderOutput(f"self-evaluation score {score} outside [0, 10]")
    return score


class LlmGateway:
    """Renders templates, routes to the provider, retries, and self-evaluates."""

    def __init__(
        self,
        provider: Provider,
        profile: ProviderProfile | None = None,
        templates: TemplateLibrary | None = None,
        retry: RetryPolicy = RetryPolicy(),
        sleeper: Callable[[float], None] = time.sleep,
        rng: random.Random | None = None,
        self_eval_enabled: bool = True,
    ):
        self.provider = provider
        self.profile = profile or ProviderProfile(name="default")
        self.templates = templates or TemplateLibrary()
        self.retry = retry
        self.sleeper = sleeper
        self.rng = rng or random.Random(0)
        self.self_eval_enabled = self_eval_enabled
        self._sanity: list[SanityEntry] = []

    def render(self, template_id: TemplateId, bindings: Mapping[str, str]) -> str:
        return render(self.templates.text(template_id), bindings)

    def build_request(self, template_id: TemplateId, bindings: Mapping[str, str]) -> CompletionRequest:
        return CompletionRequest(
            template_id=template_id,
            rendered_prompt=self.render(template_id, bindings),
            bindings=dict(bindings),
            max_length=_MAX_LENGTHS[template_id],
            determinism="creative" if template_id in _CREATIVE else "deterministic",
        )

    def complete(self, template_id: TemplateId, bindings: Mapping[str, str]) -> str:
        request = self.build_request(template_id, bindings)
        model = self.profile.model_for(template_id)
        last: Exception | None = None
        for attempt in range(self.retry.attempts):
            try:
                return self.provider.complete(request, model)
            except (TransientProviderError, ProviderTimeout) as exc:
                last = exc
                logger.warning(
                    "provider attempt %d/%d failed for %s: %s",
                    attempt + 1,
                    self.retry.attempts,
                    template_id.value,
                    exc,
                )
                if attempt < self.retry.attempts - 1:
                    delay = self.retry.backoff * (2**attempt)
                    self.sleeper(delay * (1 + self.rng.random() * self.retry.jitter))
        raise ProviderFailure(
            f"provider failed after {self.retry.attempts} attempts: {last}",
            attempts=self.retry.attempts,
        ) from last

    # --- typed helpers used by the engine and services ---

    def extract_style(
        self, document: str, style: str, like_summary: str, dislike_summary: str
    ) -> str:
        bindings = {
            "document": document,
            "style": style,
            "like_summary": like_summary,
            "dislike_summary": dislike_summary,
        }
        output = self.complete(TemplateId.STYLE_EXTRACT, bindings)
        self.self_evaluate(TemplateId.STYLE_EXTRACT, bindings, output)
        return output

    def compare_styles(self, old_style: str, new_style: str) -> tuple[int, str]:
        bindings = {"old_style": old_style, "new_style": new_style}
        output = self.complete(TemplateId.STYLE_COMPARE, bindings)
        rating, comparison_text = parse_comparison_output(output)
        self.self_evaluate(TemplateId.STYLE_COMPARE, bindings, output)
        return rating, comparison_text

    def summarize_style(self, style: str) -> str:
        return self.complete(TemplateId.STYLE_SUMMARIZE, {"style": style})

    def summarize_feedback(self, polarity: str, items: list[dict[str, Any]]) -> str:
        payload = json.dumps(items, ensure_ascii=False)
        return self.complete(
            TemplateId.FEEDBACK_SUMMARIZE, {"polarity": polarity, "items": payload}
        )

    def generate(self, template_id: TemplateId, bindings: Mapping[str, str]) -> str:
        return self.complete(template_id, bindings)

    def self_evaluate(
        self, template_id: TemplateId, inputs: Mapping[str, str], output: str
    ) -> Optional[int]:
        """Advisory fidelity score in [0, 10]; logged, never blocking."""
        if not self.self_eval_enabled:
            return None
        if not output:
            raise MalformedProviderOutput("cannot self-evaluate empty output")
        bindings = {
            "template": template_id.value,
            "inputs": json.dumps(dict(inputs), ensure_ascii=False, sort_keys=True),
            "output": output,
        }
        raw = self.complete(TemplateId.SELF_EVAL, bindings)
        score = parse_self_eval_score(raw)
        self._sanity.append(SanityEntry(template_id=template_id, score=score, passed=score >= 8))
        return score

    def sanity_entries(self) -> list[SanityEntry]:
        return list(self._sanity)

    def format_sanity_report(self) -> str:
        lines = ["sanity-check report (scores below 8 are flagged)"]
        for entry in self._sanity:
            status = "PASS" if entry.passed else "FLAG"
            lines.append(f"{status} {entry.template_id.value} score={entry.score}")
        return "\n".join(lines)
