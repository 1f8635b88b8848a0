"""Indicative-pattern mining.

Candidates are masked seed occurrences pulled from the corpus. Each is
scored by the worst (largest) 1-based rank any seed term gets in the LM's
completion list for the pattern; low scores mean the pattern fits every
seed. Selection sorts ascending by that score and greedily keeps patterns
that differ enough from everything already kept, then weights the kept
patterns by inverse score, normalized to sum 1.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from typing import Sequence

from termset.corpus import CorpusIndex
from termset.errors import MissingSeedError, SeedOovError, ValidationError
from termset.mlm import MASK, MaskedPattern, MlmBackend

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SeedSet:
    """The user-provided example terms (k of them, typically 3)."""

    terms: tuple[str, ...]

    def __post_init__(self):
        if not isinstance(self.terms, tuple):
            object.__setattr__(self, "terms", tuple(self.terms))
        if not self.terms:
            raise ValidationError("seed set is empty")
        if len(set(self.terms)) != len(self.terms):
            raise ValidationError("seed set contains duplicates")

    def __len__(self) -> int:
        return len(self.terms)


@dataclass(frozen=True)
class MiningConfig:
    sentences_per_seed: int = 666          # corpus occurrences to mask per seed
    max_patterns: int = 160                # patterns to keep after selection
    diversity_fraction: float = 0.5        # required differing-token fraction
    max_rank_cap: int | None = None        # optional cutoff on pattern score

    def __post_init__(self):
        if self.sentences_per_seed < 1:
            raise ValidationError("sentences_per_seed must be positive")
        if self.max_patterns < 1:
            raise ValidationError("max_patterns must be positive")
        if not 0 < self.diversity_fraction <= 1:
            raise ValidationError("diversity_fraction must be in (0, 1]")


@dataclass(frozen=True)
class CandidatePattern:
    pattern: MaskedPattern
    source_seed: str


@dataclass(frozen=True)
class ScoredPattern:
    pattern: MaskedPattern
    source_seed: str
    per_seed_ranks: dict[str, int] = field(compare=False)
    max_rank: int = 1

    def __post_init__(self):
        if self.per_seed_ranks and self.max_rank != max(self.per_seed_ranks.values()):
            raise ValidationError("max_rank must equal the maximum per-seed rank")
        if self.max_rank < 1:
            raise ValidationError("max_rank must be >= 1")


@dataclass(frozen=True)
class IndicativePatternSet:
    """Selected patterns in ascending max_rank order with normalized weights."""

    patterns: tuple[ScoredPattern, ...]
    weights: tuple[float, ...]

    def __post_init__(self):
        if len(self.patterns) != len(self.weights):
            raise ValidationError("patterns and weights differ in length")

    def __len__(self) -> int:
        return len(self.patterns)

    def masked_patterns(self) -> tuple[MaskedPattern, ...]:
        return tuple(p.pattern for p in self.patterns)


def check_seeds(backend: MlmBackend, seeds: SeedSet) -> None:
    """Fail fast when any seed is not an LM vocabulary item."""
    oov = [t for t in seeds.terms if not backend.contains(t)]
    if oov:
        raise SeedOovError(oov)


def collect_candidates(
    index: CorpusIndex, seeds: SeedSet, limit_per_seed: int
) -> list[CandidatePattern]:
    """Mask up to ``limit_per_seed`` corpus occurrences of each seed.

    The merged result is in (sentence id, position) order, which makes
    "the first n candidates" a corpus-order prefix. A seed with zero
    occurrences is fatal.
    """
    if limit_per_seed < 1:
        raise ValidationError("limit_per_seed must be positive")
    collected: list[tuple[tuple[int, int], CandidatePattern]] = []
    for seed in seeds.terms:
        occurrences = index.find_occurrences(seed, max_n=limit_per_seed)
        if not occurrences:
            raise MissingSeedError(seed)
        if len(occurrences) < limit_per_seed:
            logger.info(
                "seed %r has only %d occurrence(s) (requested %d)",
                seed,
                len(occurrences),
                limit_per_seed,
            )
        for occ in occurrences:
            collected.append(
                ((occ.sentence_id, occ.start), CandidatePattern(index.mask_occurrence(occ), seed))
            )
    collected.sort(key=lambda item: item[0])
    return [cand for _, cand in collected]


def score_pattern(backend: MlmBackend, pattern: MaskedPattern, seeds: SeedSet,
                  source_seed: str = "") -> ScoredPattern:
    """Rank every seed in the pattern's completion list; keep the worst."""
    _, lookup = backend.complete(pattern, top_q=1, terms_of_interest=seeds.terms)
    oov = [t for t in seeds.terms if lookup.get(t) is None]
    if oov:
        raise SeedOovError(oov)
    ranks = {t: lookup[t].rank for t in seeds.terms}
    return ScoredPattern(
        pattern=pattern,
        source_seed=source_seed,
        per_seed_ranks=ranks,
        max_rank=max(ranks.values()),
    )


def score_candidates(
    backend: MlmBackend,
    candidates: Sequence[CandidatePattern],
    seeds: SeedSet,
    workers: int = 1,
) -> list[ScoredPattern]:
    """Scoring calls are independent; the output order always matches the
    candidate order."""
    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(
                pool.map(lambda c: score_pattern(backend, c.pattern, seeds, c.source_seed), candidates)
            )
    return [score_pattern(backend, c.pattern, seeds, c.source_seed) for c in candidates]


def differing_fraction(candidate: MaskedPattern, kept: MaskedPattern) -> float:
    """Fraction of the candidate's distinct tokens absent from the kept
    pattern. The mask symbol is excluded; an all-mask candidate counts as
    fully overlapping."""
    cand_tokens = set(candidate.tokens) - {MASK}
    kept_tokens = set(kept.tokens) - {MASK}
    if not cand_tokens:
        return 0.0
    return len(cand_tokens - kept_tokens) / len(cand_tokens)


def compute_weights(max_ranks: Sequence[int]) -> list[float]:
    """Inverse-rank weights normalized to sum 1."""
    if not max_ranks:
        raise ValidationError("cannot weight an empty pattern list")
    if any(r < 1 for r in max_ranks):
        raise ValidationError("ranks must be >= 1")
    inverses = [1.0 / r for r in max_ranks]
    total = sum(inverses)
    return [v / total for v in inverses]


def select_indicative(
    candidates: Sequence[ScoredPattern], config: MiningConfig
) -> IndicativePatternSet:
    """Sort candidates by (max_rank, pattern text), then greedily keep each
    one whose differing-token fraction against every kept pattern reaches
    the diversity threshold, stopping at ``max_patterns``."""
    if not candidates:
        raise ValidationError("no candidate patterns to select from")
    pool = list(candidates)
    if config.max_rank_cap is not None:
        pool = [c for c in pool if c.max_rank <= config.max_rank_cap]
        if not pool:
            raise ValidationError(f"no candidates survive max_rank_cap={config.max_rank_cap}")
    pool.sort(key=lambda c: (c.max_rank, c.pattern.text()))
    kept: list[ScoredPattern] = []
    for cand in pool:
        if all(
            differing_fraction(cand.pattern, k.pattern) >= config.diversity_fraction
            for k in kept
        ):
            kept.append(cand)
            if len(kept) == config.max_patterns:
                break
    if len(kept) < config.max_patterns:
        logger.warning(
            "diversity filter kept only %d of the requested %d patterns",
            len(kept),
            config.max_patterns,
        )
    weights = compute_weights([p.max_rank for p in kept])
    return IndicativePatternSet(patterns=tuple(kept), weights=tuple(weights))


def mine_patterns(
    backend: MlmBackend,
    index: CorpusIndex,
    seeds: SeedSet,
    config: MiningConfig,
    workers: int = 1,
) -> IndicativePatternSet:
    """Full mining pass: collect, score, select."""
    check_seeds(backend, seeds)
    candidates = collect_candidates(index, seeds, config.sentences_per_seed)
    scored = score_candidates(backend, candidates, seeds, workers=workers)
    return select_indicative(scored, config)


# -- JSONL export (one pattern per line, human-inspectable) -----------------


def save_patterns(ind: IndicativePatternSet, path: str, config: dict | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        if config is not None:
            fh.write(json.dumps({"artifact": "patterns", "config": config}, sort_keys=True) + "\n")
        for sp, weight in zip(ind.patterns, ind.weights):
            fh.write(
                json.dumps(
                    {
                        "tokens": list(sp.pattern.tokens),
                        "mask_index": sp.pattern.mask_index,
                        "source_seed": sp.source_seed,
                        "per_seed_ranks": sp.per_seed_ranks,
                        "max_rank": sp.max_rank,
                        "weight": weight,
                    },
                    sort_keys=True,
                    ensure_ascii=False,
                )
                + "\n"
            )


def load_patterns(path: str) -> IndicativePatternSet:
    patterns: list[ScoredPattern] = []
    weights: list[float] = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            record = json.loads(line)
            if "artifact" in record:
                continue
            patterns.append(
                ScoredPattern(
                    pattern=MaskedPattern(tuple(record["tokens"]), record["mask_index"]),
                    source_seed=record.get("source_seed", ""),
                    per_seed_ranks={k: int(v) for k, v in record["per_seed_ranks"].items()},
                    max_rank=record["max_rank"],
                )
            )
            weights.append(record["weight"])
    return IndicativePatternSet(patterns=tuple(patterns), weights=tuple(weights))
