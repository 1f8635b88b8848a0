"""Vocabulary-wide expansion by weighted log-probability aggregation.

Every LM vocabulary term t gets score(t) = sum_i w_i * log p(t | pattern_i),
a product-of-experts over the indicative patterns (one full-distribution
query per pattern). The ``bb`` variant is the unselected baseline: it runs
the same aggregation over the first n collected candidate patterns with
uniform weights, skipping rank scoring and the diversity filter.
"""

from __future__ import annotations

import logging
import math
from typing import Sequence

from termset.corpus import CorpusIndex
from termset.errors import CapabilityError, ValidationError
from termset.expansion import Expansion, rank_scores
from termset.mining import (
    IndicativePatternSet,
    MiningConfig,
    SeedSet,
    check_seeds,
    collect_candidates,
)
from termset.mlm import MaskedPattern, MlmBackend

logger = logging.getLogger(__name__)


def _aggregate(
    backend: MlmBackend,
    patterns: Sequence[MaskedPattern],
    weights: Sequence[float],
    top_n: int,
    method: str,
    allow_truncated: bool = False,
) -> Expansion:
    """Accumulate weighted log-probabilities pattern by pattern, in order,
    so reruns are bit-identical."""
    if not patterns:
        raise ValidationError("no patterns to aggregate")
    if len(patterns) != len(weights):
        raise ValidationError("patterns and weights differ in length")
    vocab_size = backend.info().vocab_size
    floor = math.log(1.0 / (vocab_size * 10))
    per_pattern: list[dict[str, float]] = []
    truncated = False
    for pattern in patterns:
        result, _ = backend.complete(pattern, top_q=vocab_size)
        if len(result.entries) < vocab_size:
            if not allow_truncated:
                raise CapabilityError(
                    "truncated_distribution",
                    f"backend returned {len(result.entries)} of {vocab_size} vocabulary "
                    "entries; re-run with allow_truncated to score absent terms at the "
                    "documented floor log-probability",
                )
            truncated = True
        per_pattern.append({e.term: e.logprob for e in result.entries})
    universe = sorted(set().union(*per_pattern))
    scores: dict[str, float] = {}
    for term in universe:
        total = 0.0
        for dist, weight in zip(per_pattern, weights):
            total += weight * dist.get(term, floor)
        scores[term] = total
    metadata = {"patterns": len(patterns), "vocab_size": vocab_size}
    if truncated:
        metadata["truncated_backend"] = True
        metadata["floor_logprob"] = floor
        logger.warning("backend distributions were truncated; floor logprob %.6f used", floor)
    return Expansion(method=method, entries=rank_scores(scores, top_n), metadata=metadata)


def score_vocab_terms(
    backend: MlmBackend,
    patterns: IndicativePatternSet,
    top_n: int,
    allow_truncated: bool = False,
) -> Expansion:
    """Rank the whole LM vocabulary against the indicative patterns.

    Seed terms participate as ordinary candidates. Only single-unit
    vocabulary items can be returned; multi-word terms are the similarity
    expander's job.
    """
    if not len(patterns):
        raise ValidationError("indicative pattern set is empty")
    return _aggregate(
        backend,
        patterns.masked_patterns(),
        patterns.weights,
        top_n,
        method="mpb1",
        allow_truncated=allow_truncated,
    )


def expand_bb(
    backend: MlmBackend,
    index: CorpusIndex,
    seeds: SeedSet,
    config: MiningConfig,
    top_n: int = 200,
    allow_truncated: bool = False,
) -> Expansion:
    """Baseline: first ``config.max_patterns`` collected candidates in corpus
    order, uniform weights, no selection."""
    check_seeds(backend, seeds)
    candidates = collect_candidates(index, seeds, config.sentences_per_seed)
    chosen = [c.pattern for c in candidates[: config.max_patterns]]
    weights = [1.0 / len(chosen)] * len(chosen)
    return _aggregate(backend, chosen, weights, top_n, method="bb", allow_truncated=allow_truncated)
