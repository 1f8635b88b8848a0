"""Deterministic mock masked-LM backend driven by a category/template world.

The world lists semantic categories with member terms and context templates
with per-category occurrence weights. The completion distribution for a
pattern that matches a template slot is the normalized smoothed
co-occurrence count of vocabulary terms in that slot; unmatched patterns
fall back to the global (all-template) counts. Everything is enumerable,
so tests can recompute any distribution by hand.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from termset.errors import InvalidWorldError, PatternTooLongError, ValidationError
from termset.mlm import (
    BackendInfo,
    CompletionEntry,
    CompletionResult,
    MaskedPattern,
    RankInfo,
)

SLOT = "*"


def is_vocab_unit(term: str) -> bool:
    """A term counts as one vocabulary unit iff it has no internal space."""
    return bool(term) and len(term.split()) == 1


@dataclass(frozen=True)
class Template:
    """Context template: a token sequence with one fillable slot.

    ``weights`` gives the base co-occurrence count contributed to every
    member of a category; ``boosts`` multiplies the count of individual
    terms (used to skew distributions per template).
    """

    tokens: tuple[str, ...]
    slot: int
    weights: Mapping[str, float]
    boosts: Mapping[str, float] = field(default_factory=dict)

    def masked_tokens(self) -> tuple[str, ...]:
        from termset.mlm import MASK

        return self.tokens[: self.slot] + (MASK,) + self.tokens[self.slot + 1 :]


@dataclass
class MockWorld:
    name: str
    categories: dict[str, tuple[str, ...]]
    templates: tuple[Template, ...]
    extra_vocab: tuple[str, ...] = ()
    smoothing: float = 0.01
    max_context: int = 128

    def validate(self) -> None:
        if not self.categories:
            raise InvalidWorldError("world has no categories")
        for cat, members in self.categories.items():
            if not members:
                raise InvalidWorldError(f"category {cat!r} has no members")
        if self.smoothing <= 0:
            raise InvalidWorldError("smoothing must be positive")
        for i, tpl in enumerate(self.templates):
            if not 0 <= tpl.slot < len(tpl.tokens):
                raise InvalidWorldError(f"template {i}: slot out of range")
            if tpl.tokens[tpl.slot] != SLOT:
                raise InvalidWorldError(f"template {i}: token at slot must be {SLOT!r}")
            for cat in tpl.weights:
                if cat not in self.categories:
                    raise InvalidWorldError(f"template {i}: unknown category {cat!r}")
        if not self.vocabulary():
            raise InvalidWorldError("world vocabulary is empty")

    def vocabulary(self) -> tuple[str, ...]:
        """Sorted single-unit vocabulary: members, template words, extras.

        Multi-word members occur in generated corpora but are not LM
        vocabulary items.
        """
        vocab: set[str] = set(self.extra_vocab)
        for members in self.categories.values():
            vocab.update(t for t in members if is_vocab_unit(t))
        for tpl in self.templates:
            vocab.update(t for i, t in enumerate(tpl.tokens) if i != tpl.slot)
        vocab.discard(SLOT)
        return tuple(sorted(vocab))

    def slot_counts(self, tpl: Template) -> dict[str, float]:
        """Co-occurrence count of every term (incl. multi-word) in a slot."""
        counts: dict[str, float] = {}
        for cat, base in tpl.weights.items():
            if base <= 0:
                continue
            for member in self.categories[cat]:
                counts[member] = counts.get(member, 0.0) + base * tpl.boosts.get(member, 1.0)
        return counts


class MockLmBackend:
    """In-process masked-LM backend over a MockWorld. Fully deterministic."""

    def __init__(self, world: MockWorld):
        world.validate()
        self._world = world
        self._vocab = world.vocabulary()
        self._vocab_set = set(self._vocab)
        self._masked = [tpl.masked_tokens() for tpl in world.templates]
        self._dist_cache: dict[tuple[int, ...], tuple] = {}

    # -- backend protocol -------------------------------------------------

    def info(self) -> BackendInfo:
        return BackendInfo(
            model=f"mock/{self._world.name}",
            vocab_size=len(self._vocab),
            max_context=self._world.max_context,
        )

    def contains(self, term: str) -> bool:
        return term in self._vocab_set

    def complete(
        self,
        pattern: MaskedPattern,
        top_q: int,
        terms_of_interest: Sequence[str] = (),
    ) -> tuple[CompletionResult, dict[str, RankInfo | None]]:
        if top_q < 1:
            raise ValidationError("top_q must be >= 1")
        if len(pattern.tokens) > self._world.max_context:
            raise PatternTooLongError(self._world.max_context, len(pattern.tokens))
        entries, rank_map = self._distribution(pattern)
        result = CompletionResult(entries=entries[:top_q], vocab_size=len(self._vocab))
        lookup: dict[str, RankInfo | None] = {}
        for term in terms_of_interest:
            if term in self._vocab_set:
                rank, logprob = rank_map[term]
                lookup[term] = RankInfo(rank=rank, logprob=logprob)
            else:
                lookup[term] = None
        return result, lookup

    # -- internals ---------------------------------------------------------

    def _matching_templates(self, pattern: MaskedPattern) -> tuple[int, ...]:
        return tuple(
            i
            for i, masked in enumerate(self._masked)
            if masked == pattern.tokens and self._world.templates[i].slot == pattern.mask_index
        )

    def _distribution(self, pattern: MaskedPattern):
        key = self._matching_templates(pattern)
        cached = self._dist_cache.get(key)
        if cached is not None:
            return cached
        counts: dict[str, float] = {}
        templates = (
            [self._world.templates[i] for i in key] if key else list(self._world.templates)
        )
        for tpl in templates:
            for term, c in self._world.slot_counts(tpl).items():
                counts[term] = counts.get(term, 0.0) + c
        alpha = self._world.smoothing
        total = sum(counts.get(t, 0.0) for t in self._vocab) + alpha * len(self._vocab)
        scored = [
            CompletionEntry(term=t, logprob=math.log((counts.get(t, 0.0) + alpha) / total))
            for t in self._vocab
        ]
        scored.sort(key=lambda e: (-e.logprob, e.term))
        entries = tuple(scored)
        rank_map = {e.term: (rank, e.logprob) for rank, e in enumerate(entries, start=1)}
        self._dist_cache[key] = (entries, rank_map)
        return entries, rank_map


def build_mock_lm(world: MockWorld) -> MockLmBackend:
    """Validate a world and wrap it in a deterministic backend."""
    return MockLmBackend(world)


# -- JSON round trip -------------------------------------------------------


def world_to_json(world: MockWorld) -> dict:
    return {
        "name": world.name,
        "smoothing": world.smoothing,
        "max_context": world.max_context,
        "categories": {cat: list(members) for cat, members in world.categories.items()},
        "templates": [
            {
                "tokens": list(tpl.tokens),
                "slot": tpl.slot,
                "weights": dict(tpl.weights),
                "boosts": dict(tpl.boosts),
            }
            for tpl in world.templates
        ],
        "extra_vocab": list(world.extra_vocab),
    }


def world_from_json(data: dict) -> MockWorld:
    try:
        world = MockWorld(
            name=data["name"],
            smoothing=float(data.get("smoothing", 0.01)),
            max_context=int(data.get("max_context", 128)),
            categories={cat: tuple(m) for cat, m in data["categories"].items()},
            templates=tuple(
                Template(
                    tokens=tuple(t["tokens"]),
                    slot=int(t["slot"]),
                    weights={k: float(v) for k, v in t.get("weights", {}).items()},
                    boosts={k: float(v) for k, v in t.get("boosts", {}).items()},
                )
                for t in data.get("templates", ())
            ),
            extra_vocab=tuple(data.get("extra_vocab", ())),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidWorldError(f"malformed world description: {exc}") from exc
    world.validate()
    return world


def save_world(world: MockWorld, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(world_to_json(world), fh, sort_keys=True, indent=1)
        fh.write("\n")


def load_world(path: str) -> MockWorld:
    with open(path, encoding="utf-8") as fh:
        return world_from_json(json.load(fh))
