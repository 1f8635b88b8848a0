"""Expansion results: deterministic ranked (term, score) lists plus JSONL
import/export. Scores are non-increasing; ties are broken lexicographically
by term; terms are unique."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Mapping

from termset.errors import ValidationError


@dataclass(frozen=True)
class Expansion:
    method: str
    entries: tuple[tuple[str, float], ...]
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        terms = [t for t, _ in self.entries]
        if len(set(terms)) != len(terms):
            raise ValidationError("expansion contains duplicate terms")
        for (_, a), (_, b) in zip(self.entries, self.entries[1:]):
            if b > a:
                raise ValidationError("expansion scores must be non-increasing")

    def terms(self) -> list[str]:
        return [t for t, _ in self.entries]

    def __len__(self) -> int:
        return len(self.entries)


def rank_scores(scores: Mapping[str, float], top_n: int | None = None) -> tuple[tuple[str, float], ...]:
    """Order terms by (score desc, term asc) and truncate to top_n."""
    ordered = sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))
    if top_n is not None:
        ordered = ordered[:top_n]
    return tuple(ordered)


def save_expansion(exp: Expansion, path: str, config: dict | None = None) -> None:
    """Write JSON lines of {"rank", "term", "score"}; when a config snapshot
    is given it is embedded as a leading meta line."""
    with open(path, "w", encoding="utf-8") as fh:
        if config is not None:
            fh.write(
                json.dumps(
                    {"artifact": "expansion", "method": exp.method, "config": config},
                    sort_keys=True,
                )
                + "\n"
            )
        for rank, (term, score) in enumerate(exp.entries, start=1):
            fh.write(
                json.dumps(
                    {"rank": rank, "term": term, "score": score},
                    sort_keys=True,
                    ensure_ascii=False,
                )
                + "\n"
            )


def load_expansion(path: str, method: str = "unknown") -> Expansion:
    entries: list[tuple[str, float]] = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            record = json.loads(line)
            if "artifact" in record:
                method = record.get("method", method)
                continue
            entries.append((record["term"], record["score"]))
    return Expansion(method=method, entries=tuple(entries))
