"""Chat-completions client with retry, accounting, and record/replay.

Live requests go through a Transport (an OpenAI-compatible
/chat/completions POST). Every exchange can be recorded to a fixture
directory keyed by a digest of the canonicalized request; a gateway
constructed with fixture_dir set answers purely from those fixtures and
never touches its transport, which makes replay runs fully offline.
"""

from __future__ import annotations

import json
import random
import threading
import time
from dataclasses import dataclass
from datetime import datetime, timezone
from hashlib import sha256
from pathlib import Path
from typing import Mapping, Protocol, Sequence

import requests

from .errors import ApiError, FixtureConflict, FixtureMissing, TransportError

DEFAULT_TEMPERATURE = 0.7
DEFAULT_MAX_TOKENS = 8192

_ROLES = ("system", "user", "assistant")

# timestamp used when a fixture predates the timestamp field
_EPOCH = "1970-01-01T00:00:00+00:00"


@dataclass(frozen=True)
class ChatMessage:
    role: str
    content: str

    def __post_init__(self):
        if self.role not in _ROLES:
            raise ValueError(f"role must be one of {_ROLES}, got {self.role!r}")
        if not isinstance(self.content, str) or not self.content:
            raise ValueError("message content must be a non-empty string")


@dataclass(frozen=True)
class ChatExchange:
    request_messages: tuple[ChatMessage, ...]
    response_text: str
    prompt_tokens: int
    completion_tokens: int
    latency: float  # seconds
    model_id: str
    timestamp: str  # ISO-8601 instant

    def __post_init__(self):
        if self.prompt_tokens < 0 or self.completion_tokens < 0:
            raise ValueError("token counts must be >= 0")
        if self.latency < 0:
            raise ValueError("latency must be >= 0")


@dataclass(frozen=True)
class RequestParams:
    model_id: str
    temperature: float = DEFAULT_TEMPERATURE
    max_tokens: int = DEFAULT_MAX_TOKENS


def _normalize_content(content: str) -> str:
    # trailing whitespace must not change the fixture key
    return "\n".join(line.rstrip() for line in content.split("\n")).strip()


def canonical_request(messages: Sequence[ChatMessage], params: RequestParams) -> str:
    doc = {
        "messages": [
            {"role": m.role, "content": _normalize_content(m.content)} for m in messages
        ],
        "params": {
            "model_id": params.model_id,
            "temperature": params.temperature,
            "max_tokens": params.max_tokens,
        },
    }
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def request_digest(messages: Sequence[ChatMessage], params: RequestParams) -> str:
    return sha256(canonical_request(messages, params).encode("utf-8")).hexdigest()


class Transport(Protocol):
    def post_chat(self, url: str, payload: Mapping, timeout: float) -> Mapping: ...


class HttpTransport:
    """requests-backed transport for OpenAI-compatible endpoints."""

    def __init__(self, api_key: str, session: requests.Session | None = None):
        self._api_key = api_key
        self._session = session or requests.Session()

    def post_chat(self, url: str, payload: Mapping, timeout: float) -> Mapping:
        headers = {
            "Authorization": f"Bearer {self._api_key}",
            "Content-Type": "application/json",
        }
        try:
            response = self._session.post(url, json=payload, headers=headers, timeout=timeout)
        except requests.RequestException as exc:
            raise TransportError(f"request failed: {exc}") from exc
        if response.status_code == 429 or response.status_code >= 500:
            raise TransportError(f"HTTP {response.status_code} from {url}")
        if not 200 <= response.status_code < 300:
            raise ApiError(
                f"HTTP {response.status_code} from {url}: {response.text[:500]}",
                status=response.status_code,
            )
        try:
            return response.json()
        except ValueError as exc:
            raise ApiError(f"non-JSON response body from {url}") from exc


class NetworkDisabledTransport:
    """Poison transport: any use is a hermeticity bug, not a retryable blip."""

    def post_chat(self, url: str, payload: Mapping, timeout: float) -> Mapping:
        raise RuntimeError("network access attempted while replaying from fixtures")


class ChatGateway:
    """Issues chat requests with retry/backoff and keeps an exchange log."""

    def __init__(
        self,
        endpoint_url: str,
        model_id: str,
        *,
        api_key: str = "",
        temperature: float = DEFAULT_TEMPERATURE,
        max_tokens: int = DEFAULT_MAX_TOKENS,
        max_retries: int = 3,
        timeout: float = 600.0,
        fixture_dir: str | Path | None = None,
        record_dir: str | Path | None = None,
        transport: Transport | None = None,
        sleep=time.sleep,
        rng: random.Random | None = None,
        clock=time.monotonic,
    ):
        self.endpoint_url = endpoint_url.rstrip("/")
        self.model_id = model_id
        self.temperature = temperature
        self.max_tokens = max_tokens
        self.max_retries = max_retries
        self.timeout = timeout
        self.fixture_dir = Path(fixture_dir) if fixture_dir else None
        self.record_dir = Path(record_dir) if record_dir else None
        if transport is None:
            transport = (
                NetworkDisabledTransport() if self.fixture_dir else HttpTransport(api_key)
            )
        self._transport = transport
        self._sleep = sleep
        self._rng = rng or random.Random()
        self._clock = clock
        self._lock = threading.Lock()
        self._exchanges: list[ChatExchange] = []

    @property
    def exchanges(self) -> tuple[ChatExchange, ...]:
        with self._lock:
            return tuple(self._exchanges)

    def _params(self, temperature: float | None, max_tokens: int | None) -> RequestParams:
        return RequestParams(
            model_id=self.model_id,
            temperature=self.temperature if temperature is None else temperature,
            max_tokens=self.max_tokens if max_tokens is None else max_tokens,
        )

    def complete(
        self,
        messages: Sequence[ChatMessage],
        *,
        temperature: float | None = None,
        max_tokens: int | None = None,
    ) -> ChatExchange:
        messages = tuple(messages)
        _check_conversation(messages)
        params = self._params(temperature, max_tokens)
        if self.fixture_dir is not None:
            exchange = self._replay(messages, params)
        else:
            exchange = self._live(messages, params)
            if self.record_dir is not None:
                record_fixture(exchange, self.record_dir, params)
        with self._lock:
            self._exchanges.append(exchange)
        return exchange

    def _replay(self, messages: tuple[ChatMessage, ...], params: RequestParams) -> ChatExchange:
        digest = request_digest(messages, params)
        path = self.fixture_dir / f"{digest}.json"
        if not path.exists():
            raise FixtureMissing(digest)
        doc = json.loads(path.read_text(encoding="utf-8"))
        return ChatExchange(
            request_messages=messages,
            response_text=doc["response_text"],
            prompt_tokens=int(doc["prompt_tokens"]),
            completion_tokens=int(doc["completion_tokens"]),
            latency=float(doc["latency"]),
            model_id=doc.get("model_id", params.model_id),
            timestamp=doc.get("timestamp", _EPOCH),
        )

    def _live(self, messages: tuple[ChatMessage, ...], params: RequestParams) -> ChatExchange:
        payload = {
            "model": params.model_id,
            "messages": [{"role": m.role, "content": m.content} for m in messages],
            "temperature": params.temperature,
            "max_tokens": params.max_tokens,
        }
        url = f"{self.endpoint_url}/chat/completions"
        delay = 2.0
        attempt = 0
        while True:
            started = self._clock()
            try:
                doc = self._transport.post_chat(url, payload, self.timeout)
                break
            except TransportError:
                if attempt >= self.max_retries:
                    raise
                attempt += 1
                self._sleep(delay * (1 + self._rng.uniform(-0.2, 0.2)))
                delay *= 2
        latency = max(self._clock() - started, 0.0)
        try:
            text = doc["choices"][0]["message"]["content"]
            usage = doc.get("usage", {})
            prompt_tokens = int(usage.get("prompt_tokens", 0))
            completion_tokens = int(usage.get("completion_tokens", 0))
        except (KeyError, IndexError, TypeError, ValueError) as exc:
            raise ApiError(f"malformed chat completion payload: {exc}") from exc
        if not isinstance(text, str):
            raise ApiError("chat completion content is not text")
        return ChatExchange(
            request_messages=messages,
            response_text=text,
            prompt_tokens=prompt_tokens,
            completion_tokens=completion_tokens,
            latency=latency,
            model_id=params.model_id,
            timestamp=datetime.now(timezone.utc).isoformat(timespec="seconds"),
        )


def _check_conversation(messages: tuple[ChatMessage, ...]) -> None:
    if len(messages) < 2:
        raise ValueError("a conversation needs a system message and at least one user message")
    if messages[0].role != "system":
        raise ValueError("conversations must start with the system message")
    if any(m.role == "system" for m in messages[1:]):
        raise ValueError("conversations must contain exactly one system message")
    for i, message in enumerate(messages[1:]):
        expected = "user" if i % 2 == 0 else "assistant"
        if message.role != expected:
            raise ValueError("conversation roles must alternate user/assistant")
    if messages[-1].role != "user":
        raise ValueError("conversations must end with a user message")


_FIXTURE_LOCK = threading.Lock()


def record_fixture(
    exchange: ChatExchange,
    directory: str | Path,
    params: RequestParams | None = None,
) -> str:
    """Persist an exchange keyed by its request digest; returns the key.

    Recording the same exchange twice is a no-op; a different response for
    an existing key raises FixtureConflict.
    """
    if params is None:
        params = RequestParams(model_id=exchange.model_id)
    digest = request_digest(exchange.request_messages, params)
    directory = Path(directory)
    content = {
        "response_text": exchange.response_text,
        "prompt_tokens": exchange.prompt_tokens,
        "completion_tokens": exchange.completion_tokens,
        "latency": exchange.latency,
        "model_id": exchange.model_id,
        "timestamp": exchange.timestamp,
    }
    core = ("response_text", "prompt_tokens", "completion_tokens", "latency")
    with _FIXTURE_LOCK:
        directory.mkdir(parents=True, exist_ok=True)
        path = directory / f"{digest}.json"
        if path.exists():
            existing = json.loads(path.read_text(encoding="utf-8"))
            if any(existing.get(k) != content[k] for k in core):
                raise FixtureConflict(
                    f"fixture {digest} already recorded with different content"
                )
            return digest
        path.write_text(
            json.dumps(content, sort_keys=True, indent=2, ensure_ascii=False) + "\n",
            encoding="utf-8",
        )
    return digest
