"""Similarity-based expansion over candidate-term occurrences.

Two masked patterns are similar when their top-q completion lists share
terms: sim = |top_q(a) ∩ top_q(b)| / q. A candidate term is scored by the
weighted sum, over indicative patterns, of the best similarity any of its
corpus occurrences achieves. Scores therefore live in [0, 1] and the
method is not restricted to the LM vocabulary: candidates can be rare
words or multi-word units, as long as they occur in the corpus.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

from termset.corpus import CorpusIndex
from termset.embeddings import CandidateSet
from termset.errors import ValidationError
from termset.expansion import Expansion, rank_scores
from termset.mining import IndicativePatternSet
from termset.mlm import MaskedPattern, MlmBackend

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SimilarityConfig:
    q: int = 50                 # top-list size for the overlap measure
    max_occurrences: int = 20   # occurrences sampled per candidate term

    def __post_init__(self):
        if self.q < 1:
            raise ValidationError("q must be >= 1")
        if self.max_occurrences < 1:
            raise ValidationError("max_occurrences must be >= 1")


@dataclass(frozen=True)
class CandidateOccurrences:
    term: str
    patterns: tuple[MaskedPattern, ...]


def top_terms(backend: MlmBackend, pattern: MaskedPattern, q: int) -> frozenset[str]:
    """The backend's q best completions for a pattern, as a set."""
    result, _ = backend.complete(pattern, top_q=q)
    return frozenset(result.terms())


def pattern_similarity(
    backend: MlmBackend, a: MaskedPattern, b: MaskedPattern, q: int
) -> float:
    """Fraction of shared terms in the two patterns' top-q completions."""
    if q < 1:
        raise ValidationError("q must be >= 1")
    return len(top_terms(backend, a, q) & top_terms(backend, b, q)) / q


def collect_pats(index: CorpusIndex, term: str, max_occurrences: int) -> CandidateOccurrences:
    """Masked patterns from up to ``max_occurrences`` corpus occurrences of
    the term, in corpus order. Zero occurrences yield an empty set (the
    candidate will score 0)."""
    occurrences = index.find_occurrences(term, max_n=max_occurrences)
    return CandidateOccurrences(
        term=term,
        patterns=tuple(index.mask_occurrence(occ) for occ in occurrences),
    )


def _score_sets(
    indicative_tops: Sequence[frozenset[str]],
    weights: Sequence[float],
    occurrence_tops: Sequence[frozenset[str]],
    q: int,
) -> float:
    if not occurrence_tops:
        return 0.0
    total = 0.0
    for top, weight in zip(indicative_tops, weights):
        best = max(len(top & occ) / q for occ in occurrence_tops)
        total += weight * best
    # the weights sum to 1 only within float tolerance; keep the documented
    # [0, 1] bound exact
    return min(1.0, max(0.0, total))


def score_candidate(
    backend: MlmBackend,
    indicative: IndicativePatternSet,
    occ: CandidateOccurrences,
    cfg: SimilarityConfig,
) -> float:
    """Weighted best-occurrence similarity against each indicative pattern."""
    if not len(indicative):
        raise ValidationError("indicative pattern set is empty")
    ind_tops = [top_terms(backend, p, cfg.q) for p in indicative.masked_patterns()]
    occ_tops = [top_terms(backend, p, cfg.q) for p in occ.patterns]
    return _score_sets(ind_tops, indicative.weights, occ_tops, cfg.q)


def expand_mpb2(
    backend: MlmBackend,
    index: CorpusIndex,
    indicative: IndicativePatternSet,
    candidates: CandidateSet,
    cfg: SimilarityConfig,
    top_n: int = 200,
    workers: int = 1,
) -> Expansion:
    """Score every candidate term and rank descending (ties lexicographic).

    Only candidate occurrences are inspected, never the whole corpus; the
    candidate list comes from the high-recall generator (or an oracle
    list). Indicative top-q lists are computed once and reused; candidate
    scoring is independent per term, so it may run on a worker pool without
    changing the result.
    """
    if not len(candidates):
        raise ValidationError(
            "candidate list is empty; generate one with the embeddings module "
            "(top_neighbors) or pass an oracle list"
        )
    if not len(indicative):
        raise ValidationError("indicative pattern set is empty")
    ind_tops = [top_terms(backend, p, cfg.q) for p in indicative.masked_patterns()]

    def score_one(term: str) -> tuple[str, float, bool]:
        occ = collect_pats(index, term, cfg.max_occurrences)
        occ_tops = [top_terms(backend, p, cfg.q) for p in occ.patterns]
        return term, _score_sets(ind_tops, indicative.weights, occ_tops, cfg.q), bool(occ.patterns)

    terms = list(dict.fromkeys(candidates.terms()))
    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(score_one, terms))
    else:
        results = [score_one(t) for t in terms]
    scores = {term: score for term, score, _ in results}
    unseen = sum(1 for _, _, seen in results if not seen)
    if unseen:
        logger.info("%d candidate(s) had no corpus occurrence and scored 0", unseen)
    metadata = {"candidates": len(scores), "no_occurrence": unseen, "q": cfg.q}
    return Expansion(method="mpb2", entries=rank_scores(scores, top_n), metadata=metadata)


def oracle_candidates(base: CandidateSet | None, gold_terms: Sequence[str]) -> CandidateSet:
    """Oracle candidate list: the generated candidates extended with every
    gold term (isolates scoring quality from candidate recall)."""
    entries = list(base.entries) if base is not None else []
    present = {t for t, _ in entries}
    for term in gold_terms:
        if term not in present:
            entries.append((term, 0.0))
            present.add(term)
    metadata = dict(base.metadata) if base is not None else {}
    metadata["oracle"] = True
    # appended gold terms carry cosine 0: order is provenance only, the
    # expander rescores everything.
    return CandidateSet(entries=tuple(entries), metadata=metadata)
