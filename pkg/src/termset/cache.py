"""Completion-response cache. Pattern-similarity scoring re-queries the
same patterns many times, so responses are memoized keyed by
(backend model, pattern tokens, mask index, top_q, terms of interest) and
optionally appended to a persistent JSONL file.

Reads are lock-free; writes are serialized. Responses are immutable values
safe to share across threads. The persistent file is keyed by the backend's
model identifier, so switching models invalidates nothing by accident.
"""

from __future__ import annotations

import json
import logging
import os
import threading
from typing import Sequence

from termset.mlm import (
    BackendInfo,
    CompletionEntry,
    CompletionResult,
    MaskedPattern,
    MlmBackend,
    RankInfo,
)

logger = logging.getLogger(__name__)


def _encode(result: CompletionResult, lookup: dict) -> dict:
    return {
        "vocab_size": result.vocab_size,
        "top": [[e.term, e.logprob] for e in result.entries],
        "lookup": {
            term: (None if info is None else [info.rank, info.logprob])
            for term, info in lookup.items()
        },
    }


def _decode(data: dict) -> tuple[CompletionResult, dict]:
    result = CompletionResult(
        entries=tuple(CompletionEntry(term=t, logprob=lp) for t, lp in data["top"]),
        vocab_size=data["vocab_size"],
    )
    lookup = {
        term: (None if v is None else RankInfo(rank=v[0], logprob=v[1]))
        for term, v in data["lookup"].items()
    }
    return result, lookup


class CachingBackend:
    """Wraps any MlmBackend with a memo table and optional JSONL persistence."""

    def __init__(self, backend: MlmBackend, path: str | None = None):
        self._backend = backend
        self._path = path
        self._lock = threading.Lock()
        self._mem: dict[str, dict] = {}
        self._info: BackendInfo | None = None
        self.hits = 0
        self.misses = 0
        if path and os.path.exists(path):
            self._load(path)

    def _load(self, path: str) -> None:
        kept = 0
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                try:
                    record = json.loads(line)
                    self._mem[record["k"]] = record["v"]
                    kept += 1
                except (json.JSONDecodeError, KeyError):
                    logger.warning("skipping malformed cache line in %s", path)
        logger.info("loaded %d cached completions from %s", kept, path)

    def _key(self, pattern: MaskedPattern, top_q: int, terms: Sequence[str]) -> str:
        return json.dumps(
            [self.info().model, list(pattern.tokens), pattern.mask_index, top_q, sorted(terms)],
            separators=(",", ":"),
            ensure_ascii=False,
        )

    def complete(
        self,
        pattern: MaskedPattern,
        top_q: int,
        terms_of_interest: Sequence[str] = (),
    ) -> tuple[CompletionResult, dict[str, RankInfo | None]]:
        key = self._key(pattern, top_q, terms_of_interest)
        cached = self._mem.get(key)
        if cached is not None:
            self.hits += 1
            return _decode(cached)
        self.misses += 1
        result, lookup = self._backend.complete(pattern, top_q, terms_of_interest)
        encoded = _encode(result, lookup)
        with self._lock:
            self._mem[key] = encoded
            if self._path:
                with open(self._path, "a", encoding="utf-8") as fh:
                    fh.write(json.dumps({"k": key, "v": encoded}, separators=(",", ":")) + "\n")
        return result, lookup

    def contains(self, term: str) -> bool:
        return self._backend.contains(term)

    def info(self) -> BackendInfo:
        if self._info is None:
            self._info = self._backend.info()
        return self._info
