"""Completion providers: offline mock, on-disk cache, and HTTP client.

The wire contract is text-in/text-out: POST {"prompt": ...} to the base URL,
read {"text": ...} back. Auth rides in a bearer token taken from an
environment variable. Responses are cached one file per request hash so
campaigns are replayable and tests run offline.
"""

from __future__ import annotations

import hashlib
import os
import time
from pathlib import Path
from typing import Optional, Protocol

import httpx


class ProviderError(Exception):
    """A provider failed to produce a response."""


class QeProvider(Protocol):
    def complete(self, prompt: str) -> str: ...


def request_hash(prompt: str) -> str:
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()


def save_canned_response(directory: str | Path, prompt: str, response: str) -> Path:
    """Store a canned response where MockProvider will find it."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / f"{request_hash(prompt)}.txt"
    path.write_text(response, encoding="utf-8")
    return path


class MockProvider:
    """Deterministic offline provider reading canned responses by request hash."""

    def __init__(self, directory: str | Path, default: Optional[str] = None):
        self.directory = Path(directory)
        self.default = default

    def complete(self, prompt: str) -> str:
        path = self.directory / f"{request_hash(prompt)}.txt"
        if path.exists():
            return path.read_text(encoding="utf-8")
        if self.default is not None:
            return self.default
        raise ProviderError(f"no canned response for request {request_hash(prompt)[:12]}")


class CachingProvider:
    """Disk cache in front of any provider, keyed by request hash.

    Writes go through a temp file and an atomic rename, so concurrent
    completions of the same prompt settle on one file.
    """

    def __init__(self, inner: QeProvider, cache_dir: str | Path):
        self.inner = inner
        self.cache_dir = Path(cache_dir)
        self.cache_dir.mkdir(parents=True, exist_ok=True)

    def complete(self, prompt: str) -> str:
        path = self.cache_dir / f"{request_hash(prompt)}.txt"
        if path.exists():
            return path.read_text(encoding="utf-8")
        response = self.inner.complete(prompt)
        tmp = path.with_suffix(f".tmp.{os.getpid()}")
        tmp.write_text(response, encoding="utf-8")
        tmp.replace(path)
        return response


class HttpProvider:
    """Client for a text completion endpoint.

    Decoding is expected to be deterministic on the provider side; transient
    failures are retried twice by default.
    """

    def __init__(
        self,
        base_url: str,
        token_env: str = "ESA_QE_TOKEN",
        timeout: float = 60.0,
        retries: int = 2,
        retry_wait: float = 1.0,
    ):
        self.base_url = base_url
        self.token_env = token_env
        self.timeout = timeout
        self.retries = retries
        self.retry_wait = retry_wait

    def _headers(self) -> dict:
        token = os.environ.get(self.token_env)
        return {"Authorization": f"Bearer {token}"} if token else {}

    def complete(self, prompt: str) -> str:
        last_error: Exception | None = None
        for attempt in range(self.retries + 1):
            try:
                response = httpx.post(
                    self.base_url,
                    json={"prompt": prompt},
                    headers=self._headers(),
                    timeout=self.timeout,
                )
                response.raise_for_status()
                return response.json()["text"]
            except Exception as exc:  # noqa: BLE001 - anything transport-ish retries
                last_error = exc
                if attempt < self.retries:
                    time.sleep(self.retry_wait)
        raise ProviderError(f"completion request failed: {last_error}")
