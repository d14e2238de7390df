"""Text-completion providers: live HTTP, scripted, recording, replay, retry."""

from __future__ import annotations

import hashlib
import json
import logging
import os
import threading
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Callable, Iterable, Protocol

import httpx

log = logging.getLogger(__name__)

API_KEY_ENV = "LLM_API_KEY"
DEFAULT_TIMEOUT = 120.0


class ProviderError(Exception):
    pass


class TransientError(ProviderError):
    """Timeouts, rate limits and server-side failures. Safe to retry."""


class PermanentError(ProviderError):
    """Auth failures and malformed requests. Never retried."""


class ScriptExhausted(ProviderError):
    pass


class ReplayMismatch(ProviderError):
    def __init__(self, call_index: int, message: str) -> None:
        self.call_index = call_index
        super().__init__(f"call {call_index}: {message}")


class ExhaustedRetries(ProviderError):
    def __init__(self, attempts: int, last: BaseException) -> None:
        self.attempts = attempts
        self.last = last
        super().__init__(f"gave up after {attempts} attempts: {last}")


class SinkError(ProviderError):
    pass


@dataclass(frozen=True)
class Sampling:
    temperature: float | None = None
    max_output_tokens: int | None = None

    def to_dict(self) -> dict[str, Any]:
        return {k: v for k, v in asdict(self).items() if v is not None}


@dataclass(frozen=True)
class CompletionRequest:
    model_id: str
    prompt: str
    call_index: int
    sampling: Sampling = field(default_factory=Sampling)
    # prompt template id; informational, never sent over the wire
    tag: str = ""

    def __post_init__(self) -> None:
        if not self.prompt:
            raise ValueError("empty prompt")


@dataclass(frozen=True)
class CompletionResponse:
    text: str
    usage: dict[str, int] | None = None
    latency: float = 0.0


class CompletionProvider(Protocol):
    def complete(self, request: CompletionRequest) -> CompletionResponse: ...


def prompt_hash(prompt: str) -> str:
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()


class ScriptedProvider:
    """Returns canned completions in order, one per call."""

    def __init__(self, completions: Iterable[str]) -> None:
        self._script = list(completions)
        self._pos = 0
        self._lock = threading.Lock()

    def complete(self, request: CompletionRequest) -> CompletionResponse:
        with self._lock:
            if self._pos >= len(self._script):
                raise ScriptExhausted(f"script of {len(self._script)} completions used up")
            text = self._script[self._pos]
            self._pos += 1
        return CompletionResponse(text)


class FunctionProvider:
    """Wraps a plain ``request -> text`` callable."""

    def __init__(self, fn: Callable[[CompletionRequest], str]) -> None:
        self.fn = fn

    def complete(self, request: CompletionRequest) -> CompletionResponse:
        return CompletionResponse(self.fn(request))


class HttpProvider:
    """Chat-completion style JSON endpoint.

    The prompt goes out as a single user message. Sampling parameters are
    only sent when set.
    """

    def __init__(
        self,
        endpoint: str,
        *,
        api_key: str | None = None,
        timeout: float = DEFAULT_TIMEOUT,
        client: httpx.Client | None = None,
    ) -> None:
        self.endpoint = endpoint
        self._api_key = api_key if api_key is not None else os.environ.get(API_KEY_ENV)
        self._client = client or httpx.Client(timeout=timeout)

    def __repr__(self) -> str:
        return f"HttpProvider({self.endpoint!r})"

    def _body(self, request: CompletionRequest) -> dict[str, Any]:
        body: dict[str, Any] = {
            "model": request.model_id,
            "messages": [{"role": "user", "content": request.prompt}],
        }
        if request.sampling.temperature is not None:
            body["temperature"] = request.sampling.temperature
        if request.sampling.max_output_tokens is not None:
            body["max_tokens"] = request.sampling.max_output_tokens
        return body

    def complete(self, request: CompletionRequest) -> CompletionResponse:
        headers = {"Authorization": f"Bearer {self._api_key}"} if self._api_key else {}
        start = time.monotonic()
        try:
            resp = self._client.post(self.endpoint, json=self._body(request), headers=headers)
        except httpx.TimeoutException as exc:
            raise TransientError(f"timeout: {exc}") from exc
        except httpx.TransportError as exc:
            raise TransientError(f"transport error: {exc}") from exc
        latency = time.monotonic() - start

        if resp.status_code == 429 or resp.status_code >= 500:
            raise TransientError(f"HTTP {resp.status_code}")
        if resp.status_code >= 400:
            raise PermanentError(f"HTTP {resp.status_code}: {resp.text[:200]}")
        try:
            data = resp.json()
            text = data["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise PermanentError(f"unexpected response shape: {exc}") from exc
        if text is None:
            raise PermanentError("response carried no content")
        return CompletionResponse(text, usage=data.get("usage"), latency=latency)


@dataclass(frozen=True)
class CallRecord:
    call_index: int
    prompt_hash: str
    prompt: str
    completion: str
    tag: str = ""

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


class JsonlSink:
    """Appends call records to a JSON Lines file."""

    def __init__(self, path: str | Path) -> None:
        self.path = Path(path)
        self._lock = threading.Lock()

    def __call__(self, rec: CallRecord) -> None:
        line = json.dumps(rec.to_dict(), ensure_ascii=False)
        with self._lock:
            try:
                with self.path.open("a", encoding="utf-8") as fh:
                    fh.write(line + "\n")
            except OSError as exc:
                raise SinkError(str(exc)) from exc

    def load(self) -> list[CallRecord]:
        with self.path.open(encoding="utf-8") as fh:
            return [CallRecord(**json.loads(line)) for line in fh if line.strip()]


Sink = Callable[[CallRecord], None]


class RecordingProvider:
    def __init__(self, inner: CompletionProvider, sink: Sink | list[CallRecord]) -> None:
        self.inner = inner
        self._sink: Sink = sink.append if isinstance(sink, list) else sink
        self._lock = threading.Lock()

    def complete(self, request: CompletionRequest) -> CompletionResponse:
        response = self.inner.complete(request)
        rec = CallRecord(
            request.call_index, prompt_hash(request.prompt), request.prompt, response.text, request.tag
        )
        with self._lock:
            try:
                self._sink(rec)
            except SinkError:
                raise
            except Exception as exc:
                raise SinkError(str(exc)) from exc
        return response


def record(inner: CompletionProvider, sink: Sink | list[CallRecord]) -> RecordingProvider:
    return RecordingProvider(inner, sink)


class ReplayProvider:
    """Serves recorded completions keyed by call index; never touches the network."""

    def __init__(self, records: Iterable[CallRecord]) -> None:
        self._by_index: dict[int, CallRecord] = {}
        for rec in records:
            if rec.call_index in self._by_index:
                raise ValueError(f"duplicate recorded call index {rec.call_index}")
            self._by_index[rec.call_index] = rec

    def __len__(self) -> int:
        return len(self._by_index)

    def complete(self, request: CompletionRequest) -> CompletionResponse:
        rec = self._by_index.get(request.call_index)
        if rec is None:
            raise ReplayMismatch(request.call_index, "no recorded call at this index")
        if rec.prompt_hash != prompt_hash(request.prompt):
            raise ReplayMismatch(request.call_index, "prompt hash differs from recording")
        return CompletionResponse(rec.completion)


@dataclass(frozen=True)
class RetryPolicy:
    max_attempts: int = 5
    initial_delay: float = 1.0
    multiplier: float = 2.0
    max_delay: float = 30.0
    retryable: tuple[type[BaseException], ...] = (TransientError,)

    def __post_init__(self) -> None:
        if self.max_attempts < 1:
            raise ValueError("max_attempts must be >= 1")
        if self.initial_delay < 0 or self.multiplier < 1:
            raise ValueError("backoff must be non-negative and non-shrinking")

    def delay(self, attempt: int) -> float:
        """Sleep before retry number ``attempt`` (1-based)."""
        return min(self.initial_delay * self.multiplier ** (attempt - 1), self.max_delay)


class RetryingProvider:
    def __init__(
        self,
        inner: CompletionProvider,
        policy: RetryPolicy,
        sleep: Callable[[float], None] = time.sleep,
    ) -> None:
        self.inner = inner
        self.policy = policy
        self._sleep = sleep
        self.last_attempts = 0

    def complete(self, request: CompletionRequest) -> CompletionResponse:
        attempt = 0
        while True:
            attempt += 1
            self.last_attempts = attempt
            try:
                return self.inner.complete(request)
            except self.policy.retryable as exc:
                if attempt >= self.policy.max_attempts:
                    raise ExhaustedRetries(attempt, exc) from exc
                delay = self.policy.delay(attempt)
                log.warning("call %d failed (%s); retry %d in %.1fs", request.call_index, exc, attempt, delay)
                self._sleep(delay)


def with_retries(
    inner: CompletionProvider, policy: RetryPolicy | None = None, sleep: Callable[[float], None] = time.sleep
) -> RetryingProvider:
    return RetryingProvider(inner, policy or RetryPolicy(), sleep)
