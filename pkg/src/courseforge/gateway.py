"""Model-call gateway: primary/fallback chains, streaming, and a scripted mock.

Transport failures (timeouts, connection errors, non-success statuses) are
retried and then moved to the fallback model. Content-level problems are not
the gateway's business; validation loops live in the pipeline.
"""

from __future__ import annotations

import base64
import json
import os
import threading
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator

from .util import content_hash


class ConfigKey(str, Enum):
    TEXT_GENERATION = "TextGeneration"
    MULTI_MODAL_ANALYSIS = "MultiModalAnalysis"


class GatewayCallError(Exception):
    """A single model call failed in a retryable way."""

    def __init__(self, code: str, message: str = ""):
        self.code = code
        super().__init__(message or code)


class AllModelsFailed(Exception):
    def __init__(self, last_error: Exception | None):
        self.last_error = last_error
        super().__init__(f"primary and fallback chains exhausted: {last_error}")


class UnscriptedRequest(Exception):
    pass


@dataclass
class PageImage:
    data: bytes
    media_type: str  # image/png or image/jpeg


@dataclass
class ModelConfig:
    model_id: str
    fallback_model_id: str
    temperature: float
    max_output_tokens: int
    timeout: float = 120.0
    max_retries: int = 2

    def __post_init__(self) -> None:
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError("temperature must be in [0, 2]")
        if self.max_output_tokens <= 0:
            raise ValueError("max_output_tokens must be positive")


@dataclass
class ChatRequest:
    messages: list[tuple[str, str]]  # (role, text)
    config_key: ConfigKey
    images: list[PageImage] | None = None

    def __post_init__(self) -> None:
        if not self.messages:
            raise ValueError("at least one message required")
        if self.images and self.config_key is not ConfigKey.MULTI_MODAL_ANALYSIS:
            raise ValueError("images are allowed only for MultiModalAnalysis requests")

    def joined_text(self) -> str:
        return "\n".join(text for _, text in self.messages)


@dataclass
class StreamEvent:
    kind: str  # "token" | "done" | "error"
    text: str = ""
    code: str = ""
    message: str = ""

    @classmethod
    def token(cls, text: str) -> "StreamEvent":
        return cls("token", text=text)

    @classmethod
    def done(cls, text: str) -> "StreamEvent":
        return cls("done", text=text)

    @classmethod
    def error(cls, code: str, message: str) -> "StreamEvent":
        return cls("error", code=code, message=message)


@dataclass
class CompletionResult:
    text: str
    model_id: str
    attempts: int  # total model calls made, across primary and fallback

    @property
    def retries(self) -> int:
        return self.attempts - 1


def default_model_configs() -> dict[ConfigKey, ModelConfig]:
    return {
        ConfigKey.TEXT_GENERATION: ModelConfig(
            model_id="glm-4.7",
            fallback_model_id="glm-4.6",
            temperature=0.3,
            max_output_tokens=8192,
        ),
        ConfigKey.MULTI_MODAL_ANALYSIS: ModelConfig(
            model_id="glm-4.6v",
            fallback_model_id="glm-4.5v",
            temperature=0.2,
            max_output_tokens=4096,
        ),
    }


@dataclass
class GatewaySettings:
    configs: dict[ConfigKey, ModelConfig] = field(default_factory=default_model_configs)
    base_url: str = ""
    api_key: str = ""  # populated from the environment only, never from files


def load_settings(path: str | None = None, env: dict | None = None) -> GatewaySettings:
    """Build settings from defaults, an optional JSON file, and env overrides."""
    env = os.environ if env is None else env
    settings = GatewaySettings()
    path = path or env.get("COURSEFORGE_CONFIG")
    if path:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
        for key in ConfigKey:
            section = raw.get(key.value)
            if not section:
                continue
            base = settings.configs[key]
            settings.configs[key] = ModelConfig(
                model_id=section.get("model_id", base.model_id),
                fallback_model_id=section.get("fallback_model_id", base.fallback_model_id),
                temperature=section.get("temperature", base.temperature),
                max_output_tokens=section.get("max_output_tokens", base.max_output_tokens),
                timeout=section.get("timeout", base.timeout),
                max_retries=section.get("max_retries", base.max_retries),
            )
        settings.base_url = raw.get("base_url", settings.base_url)
    settings.base_url = env.get("COURSEFORGE_BASE_URL", settings.base_url)
    settings.api_key = env.get("COURSEFORGE_API_KEY", "")
    return settings


def request_fingerprint(request: ChatRequest) -> str:
    payload = request.config_key.value + "\x00" + "\x00".join(
        f"{role}\x1f{text}" for role, text in request.messages
    )
    return content_hash(payload)


class Gateway:
    """Base gateway implementing the retry-then-fallback ladder."""

    def __init__(self, settings: GatewaySettings | None = None):
        self.settings = settings or GatewaySettings()

    # transport hooks -------------------------------------------------
    def _call_model(self, model_id: str, request: ChatRequest, cfg: ModelConfig) -> str:
        raise NotImplementedError

    def _stream_model(
        self, model_id: str, request: ChatRequest, cfg: ModelConfig
    ) -> Iterator[str]:
        raise NotImplementedError

    # public API ------------------------------------------------------
    def complete(self, request: ChatRequest) -> str:
        return self.complete_detailed(request).text

    def complete_detailed(self, request: ChatRequest) -> CompletionResult:
        cfg = self.settings.configs[request.config_key]
        attempts = 0
        last_error: Exception | None = None
        for model_id in (cfg.model_id, cfg.fallback_model_id):
            for _ in range(cfg.max_retries + 1):
                attempts += 1
                try:
                    text = self._call_model(model_id, request, cfg)
                    return CompletionResult(text, model_id, attempts)
                except GatewayCallError as exc:
                    last_error = exc
        raise AllModelsFailed(last_error)

    def stream(self, request: ChatRequest) -> Iterator[StreamEvent]:
        cfg = self.settings.configs[request.config_key]
        last_error: Exception | None = None
        for model_id in (cfg.model_id, cfg.fallback_model_id):
            for _ in range(cfg.max_retries + 1):
                emitted: list[str] = []
                try:
                    for chunk in self._stream_model(model_id, request, cfg):
                        emitted.append(chunk)
                        yield StreamEvent.token(chunk)
                    yield StreamEvent.done("".join(emitted))
                    return
                except GatewayCallError as exc:
                    last_error = exc
                    if emitted:
                        # tokens already reached the caller; cannot restart
                        yield StreamEvent.error(exc.code, str(exc))
                        return
        code = getattr(last_error, "code", "exhausted")
        yield StreamEvent.error(code, str(last_error))


# ---------------------------------------------------------------- mock


@dataclass
class ScriptEntry:
    """One scripted outcome, matched against incoming requests in order."""

    kind: str = "text"  # "text" | "failure" | "stream"
    text: str = ""
    chunks: list[str] = field(default_factory=list)
    error_code: str = "scripted-failure"
    then_error: str = ""  # for streams: raise after emitting chunks
    config_key: str | None = None
    message_hash: str | None = None
    contains: str | None = None

    def matches(self, request: ChatRequest) -> bool:
        if self.config_key is not None and self.config_key != request.config_key.value:
            return False
        if self.message_hash is not None and self.message_hash != request_fingerprint(request):
            return False
        if self.contains is not None and self.contains not in request.joined_text():
            return False
        return True


@dataclass
class MockCall:
    config_key: str
    model_id: str
    fingerprint: str
    entry_index: int


class MockGateway(Gateway):
    """Deterministic scripted backend; every call consumes one script entry."""

    def __init__(self, script: list[ScriptEntry], settings: GatewaySettings | None = None):
        super().__init__(settings)
        self.script = list(script)
        self.calls: list[MockCall] = []
        self._consumed = [False] * len(self.script)
        self._lock = threading.Lock()

    def call_count(self, config_key: ConfigKey | None = None) -> int:
        if config_key is None:
            return len(self.calls)
        return sum(1 for c in self.calls if c.config_key == config_key.value)

    def extend_script(self, entries: list[ScriptEntry]) -> None:
        with self._lock:
            self.script.extend(entries)
            self._consumed.extend([False] * len(entries))

    def _take(self, request: ChatRequest, model_id: str) -> ScriptEntry:
        with self._lock:
            for i, entry in enumerate(self.script):
                if self._consumed[i] or not entry.matches(request):
                    continue
                self._consumed[i] = True
                self.calls.append(
                    MockCall(request.config_key.value, model_id, request_fingerprint(request), i)
                )
                return entry
        raise UnscriptedRequest(
            f"no unconsumed script entry matches {request.config_key.value} "
            f"fingerprint {request_fingerprint(request)[:12]}"
        )

    def _call_model(self, model_id, request, cfg):
        entry = self._take(request, model_id)
        if entry.kind == "failure":
            raise GatewayCallError(entry.error_code)
        if entry.kind == "stream":
            if entry.then_error:
                raise GatewayCallError(entry.then_error)
            return entry.text or "".join(entry.chunks)
        return entry.text

    def _stream_model(self, model_id, request, cfg):
        entry = self._take(request, model_id)
        if entry.kind == "failure":
            raise GatewayCallError(entry.error_code)
        if entry.kind == "stream":
            yield from entry.chunks
            if entry.then_error:
                raise GatewayCallError(entry.then_error)
            return
        yield entry.text


def load_mock_script(path: str) -> list[ScriptEntry]:
    """Read a JSON mock script: [{"match": {...}, "outcome": {...}}, ...]."""
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    entries = []
    for item in raw:
        match = item.get("match", {})
        outcome = item.get("outcome", {})
        entries.append(
            ScriptEntry(
                kind=outcome.get("kind", "text"),
                text=outcome.get("text", ""),
                chunks=list(outcome.get("chunks", [])),
                error_code=outcome.get("code", "scripted-failure"),
                then_error=outcome.get("then_error", ""),
                config_key=match.get("config_key"),
                message_hash=match.get("hash"),
                contains=match.get("contains"),
            )
        )
    return entries


# ---------------------------------------------------------------- live


class HttpGateway(Gateway):
    """Chat-completions-style HTTP adapter; endpoint details are configuration."""

    def _payload(self, model_id: str, request: ChatRequest, cfg: ModelConfig, stream: bool):
        messages = []
        for role, text in request.messages:
            messages.append({"role": role, "content": text})
        if request.images:
            content = [{"type": "text", "text": messages[-1]["content"]}]
            for image in request.images:
                encoded = base64.b64encode(image.data).decode("ascii")
                content.append(
                    {
                        "type": "image_url",
                        "image_url": {"url": f"data:{image.media_type};base64,{encoded}"},
                    }
                )
            messages[-1]["content"] = content
        return {
            "model": model_id,
            "messages": messages,
            "temperature": cfg.temperature,
            "max_tokens": cfg.max_output_tokens,
            "stream": stream,
        }

    def _client(self, cfg: ModelConfig):
        import httpx

        headers = {}
        if self.settings.api_key:
            headers["Authorization"] = f"Bearer {self.settings.api_key}"
        return httpx.Client(
            base_url=self.settings.base_url, headers=headers, timeout=cfg.timeout
        )

    def _call_model(self, model_id, request, cfg):
        import httpx

        try:
            with self._client(cfg) as client:
                response = client.post(
                    "/chat/completions", json=self._payload(model_id, request, cfg, False)
                )
        except httpx.HTTPError as exc:
            raise GatewayCallError("transport", str(exc)) from exc
        if response.status_code != 200:
            raise GatewayCallError(f"status-{response.status_code}", response.text[:200])
        try:
            return response.json()["choices"][0]["message"]["content"]
        except (KeyError, IndexError, ValueError) as exc:
            raise GatewayCallError("bad-response", str(exc)) from exc

    def _stream_model(self, model_id, request, cfg):
        import httpx

        try:
            with self._client(cfg) as client:
                with client.stream(
                    "POST", "/chat/completions", json=self._payload(model_id, request, cfg, True)
                ) as response:
                    if response.status_code != 200:
                        raise GatewayCallError(f"status-{response.status_code}")
                    for line in response.iter_lines():
                        if not line.startswith("data: "):
                            continue
                        data = line[len("data: "):].strip()
                        if data == "[DONE]":
                            break
                        try:
                            delta = json.loads(data)["choices"][0]["delta"]
                        except (KeyError, IndexError, ValueError):
                            continue
                        piece = delta.get("content")
                        if piece:
                            yield piece
        except httpx.HTTPError as exc:
            raise GatewayCallError("transport", str(exc)) from exc
