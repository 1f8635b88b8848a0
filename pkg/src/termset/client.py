"""HTTP client for the fill-mask wire protocol.

Endpoints (JSON bodies, UTF-8):
  POST /v1/fill-mask        {tokens, mask_index, top_q, terms_of_interest}
  GET  /v1/vocab/contains   ?term=...
  GET  /v1/info

503 responses and transport failures are retried with exponential backoff;
400 responses carry {"error": code, "detail": text} and map onto typed
errors. The client is safe to share across threads, with concurrency
bounded by the underlying connection pool.
"""

from __future__ import annotations

import logging
import time
from typing import Sequence

import httpx

from termset.errors import BackendRequestError, PatternTooLongError, TransportError
from termset.mlm import (
    BackendInfo,
    CompletionEntry,
    CompletionResult,
    MaskedPattern,
    RankInfo,
)

logger = logging.getLogger(__name__)


class HttpBackend:
    def __init__(
        self,
        base_url: str,
        timeout: float = 30.0,
        max_retries: int = 3,
        backoff: float = 0.25,
        max_connections: int = 8,
        client: httpx.Client | None = None,
    ):
        self._client = client or httpx.Client(
            base_url=base_url,
            timeout=timeout,
            limits=httpx.Limits(max_connections=max_connections),
        )
        self._max_retries = max_retries
        self._backoff = backoff
        self._info: BackendInfo | None = None

    def close(self) -> None:
        self._client.close()

    def _request(self, method: str, url: str, **kwargs) -> httpx.Response:
        last_error: Exception | None = None
        for attempt in range(self._max_retries + 1):
            if attempt:
                delay = self._backoff * (2 ** (attempt - 1))
                logger.debug("retrying %s %s in %.2fs", method, url, delay)
                time.sleep(delay)
            try:
                response = self._client.request(method, url, **kwargs)
            except httpx.HTTPError as exc:
                last_error = exc
                continue
            if response.status_code == 503:
                last_error = TransportError(f"backend overloaded (503) at {url}")
                continue
            return response
        raise TransportError(f"backend unreachable after {self._max_retries + 1} attempts: {last_error}")

    @staticmethod
    def _raise_for_error(response: httpx.Response) -> None:
        if response.status_code < 400:
            return
        try:
            body = response.json()
            code = body.get("error", "unknown")
            detail = body.get("detail", "")
        except ValueError:
            code, detail = "unknown", response.text
        if code == "context_length_exceeded":
            raise PatternTooLongError(detail)
        raise BackendRequestError(code, detail)

    def complete(
        self,
        pattern: MaskedPattern,
        top_q: int,
        terms_of_interest: Sequence[str] = (),
    ) -> tuple[CompletionResult, dict[str, RankInfo | None]]:
        body = {
            "tokens": list(pattern.tokens),
            "mask_index": pattern.mask_index,
            "top_q": top_q,
            "terms_of_interest": list(terms_of_interest),
        }
        response = self._request("POST", "/v1/fill-mask", json=body)
        self._raise_for_error(response)
        data = response.json()
        result = CompletionResult(
            entries=tuple(
                CompletionEntry(term=e["term"], logprob=e["logprob"]) for e in data["top"]
            ),
            vocab_size=data["vocab_size"],
        )
        lookup = {
            term: (None if v is None else RankInfo(rank=v["rank"], logprob=v["logprob"]))
            for term, v in data["lookup"].items()
        }
        return result, lookup

    def contains(self, term: str) -> bool:
        response = self._request("GET", "/v1/vocab/contains", params={"term": term})
        self._raise_for_error(response)
        return bool(response.json()["in_vocab"])

    def info(self) -> BackendInfo:
        if self._info is None:
            response = self._request("GET", "/v1/info")
            self._raise_for_error(response)
            data = response.json()
            self._info = BackendInfo(
                model=data["model"],
                vocab_size=data["vocab_size"],
                max_context=data["max_context"],
            )
        return self._info
