"""Sentence simplification: prompt construction, completion clients, splice-back."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass
from importlib import resources
from typing import Optional, Protocol

SYSTEM_PROMPT = (
    "I want you to replace the user's complex sentence with simple sentence(s). "
    "Keep the meaning the same, but make them simpler. "
    "Output only the simplified sentence(s)."
)

DEFAULT_RETRIES = 3


@dataclass(frozen=True)
class SimplificationRequest:
    sentence_index: int
    original: str
    system_instruction: str
    user_content: str


@dataclass(frozen=True)
class SimplificationResult:
    sentence_index: int
    original: str
    simplified: str
    client_id: str
    latency_ms: float


@dataclass(frozen=True)
class ChangeRecord:
    sentence_index: int
    before: str
    after: str


class CompletionClient(Protocol):
    client_id: str

    def complete(self, system: str, user: str) -> str: ...


class TransportError(RuntimeError):
    """Retriable transport-level failure."""


class EmptySimplificationError(ValueError):
    pass


def build_prompt(sentence_index: int, original: str) -> SimplificationRequest:
    if not original:
        raise ValueError("empty sentence")
    return SimplificationRequest(
        sentence_index=sentence_index,
        original=original,
        system_instruction=SYSTEM_PROMPT,
        user_content=original,
    )


def simplify(req: SimplificationRequest, client: CompletionClient,
             retries: int = DEFAULT_RETRIES) -> SimplificationResult:
    """Send the two-role prompt; bounded retries on transport failure."""
    t0 = time.monotonic()
    last_err: Optional[Exception] = None
    for _ in range(max(retries, 1)):
        try:
            completion = client.complete(req.system_instruction, req.user_content)
            break
        except TransportError as e:
            last_err = e
    else:
        raise TransportError(f"simplification failed after {retries} attempts") from last_err
    simplified = completion.strip()
    if not simplified:
        raise EmptySimplificationError("empty simplification")
    return SimplificationResult(
        sentence_index=req.sentence_index,
        original=req.original,
        simplified=simplified,
        client_id=client.client_id,
        latency_ms=(time.monotonic() - t0) * 1000.0,
    )


def replace_sentence(sentences: list[str], idx: int, simplified: str) -> tuple[list[str], ChangeRecord]:
    """Replace one sentence slot; multi-sentence output stays in the one slot."""
    if idx < 0 or idx >= len(sentences):
        raise IndexError(f"sentence index {idx} out of range")
    updated = list(sentences)
    record = ChangeRecord(sentence_index=idx, before=sentences[idx], after=simplified)
    updated[idx] = simplified
    return updated, record


def undo_replacement(sentences: list[str], record: ChangeRecord) -> list[str]:
    updated = list(sentences)
    updated[record.sentence_index] = record.before
    return updated


# --- clients -----------------------------------------------------------------

_RULE_SWAPS = [
    ("; however,", ", but"),
    ("; therefore,", ", so"),
    ("suspect", "think"),
    ("may ", "might "),
    ("a deliberate act", "done on purpose"),
    ("unknown", "not known"),
    ("utilize", "use"),
    ("approximately", "about"),
    ("purchase", "buy"),
    ("demonstrate", "show"),
    ("assistance", "help"),
]


class MockClient:
    """Deterministic offline client: fixture table lookup with a rule-based fallback."""

    client_id = "mock"

    def __init__(self, pairs: Optional[dict] = None):
        self.pairs = dict(pairs or {})

    @classmethod
    def with_bundled_pairs(cls) -> "MockClient":
        text = resources.files("gazeread.data").joinpath("mock_pairs.json").read_text("utf-8")
        return cls({p["original"]: p["simplified"] for p in json.loads(text)})

    def complete(self, system: str, user: str) -> str:
        if user in self.pairs:
            return self.pairs[user]
        out = user
        for old, new in _RULE_SWAPS:
            out = out.replace(old, new)
        return out


class EchoClient:
    client_id = "echo"

    def complete(self, system: str, user: str) -> str:
        return user


class HttpChatClient:
    """OpenAI-style chat-completion client; settings come from config."""

    def __init__(self, endpoint: str, model: str, api_key: str = "",
                 timeout: float = 30.0):
        self.endpoint = endpoint
        self.model = model
        self.api_key = api_key
        self.timeout = timeout
        self.client_id = f"http:{model}"

    def complete(self, system: str, user: str) -> str:
        import requests

        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        body = {
            "model": self.model,
            "messages": [
                {"role": "system", "content": system},
                {"role": "user", "content": user},
            ],
        }
        try:
            resp = requests.post(self.endpoint, json=body, headers=headers, timeout=self.timeout)
            resp.raise_for_status()
        except requests.RequestException as e:
            raise TransportError(str(e)) from e
        data = resp.json()
        try:
            return data["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError) as e:
            raise TransportError(f"malformed completion response: {data!r}") from e


def load_fixture_pairs() -> list[dict]:
    text = resources.files("gazeread.data").joinpath("mock_pairs.json").read_text("utf-8")
    return json.loads(text)
