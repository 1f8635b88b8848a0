"""Orchestration: wire corpus, backend, and embedding table into the five
expansion methods behind one `Engine.expand()` call.

Methods:
  mpb1   vocabulary ranking over selected indicative patterns
  bb     same aggregation, first collected patterns, uniform weights
  mpb2   similarity search over candidate-term occurrences
  mpb2o  mpb2 with the candidate list extended by the gold terms (oracle)
  s2v    plain embedding-neighbor baseline
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Sequence

from termset.corpus import CorpusIndex
from termset.embeddings import (
    CandidateSet,
    EmbeddingTable,
    expand_s2v,
    mean_seed_vector,
    top_neighbors,
)
from termset.errors import ValidationError
from termset.expansion import Expansion
from termset.mining import IndicativePatternSet, MiningConfig, SeedSet, mine_patterns
from termset.mlm import MlmBackend
from termset.mpb1 import expand_bb, score_vocab_terms
from termset.mpb2 import SimilarityConfig, expand_mpb2, oracle_candidates

METHODS = ("mpb1", "bb", "mpb2", "mpb2o", "s2v")

# Defaults: 2000-sentence mining budget split over the seeds; 160 patterns
# for vocabulary ranking, 20 for similarity search; 50-term overlap lists.
DEFAULT_SENTENCE_BUDGET = 2000
DEFAULT_MPB1_PATTERNS = 160
DEFAULT_MPB2_PATTERNS = 20
DEFAULT_Q = 50
DEFAULT_MAX_OCCURRENCES = 20
DEFAULT_FREQ_CAP = 200_000


@dataclass
class EngineConfig:
    sentence_budget: int = DEFAULT_SENTENCE_BUDGET
    mpb1_patterns: int = DEFAULT_MPB1_PATTERNS
    mpb2_patterns: int = DEFAULT_MPB2_PATTERNS
    diversity_fraction: float = 0.5
    max_rank_cap: int | None = None
    q: int = DEFAULT_Q
    max_occurrences: int = DEFAULT_MAX_OCCURRENCES
    candidates: int | None = None          # required for mpb2/s2v (no default)
    freq_cap: int | None = DEFAULT_FREQ_CAP
    allow_truncated: bool = False
    workers: int = 1

    def snapshot(self) -> dict:
        return dataclasses.asdict(self)


class Engine:
    """Holds the loaded resources and runs expansions against them."""

    def __init__(
        self,
        backend: MlmBackend | None = None,
        index: CorpusIndex | None = None,
        table: EmbeddingTable | None = None,
        config: EngineConfig | None = None,
    ):
        self.backend = backend
        self.index = index
        self.table = table
        self.config = config or EngineConfig()

    # -- seed viability ----------------------------------------------------

    def seed_ok(self, term: str, method: str) -> bool:
        """Whether a sampled seed satisfies the method's preconditions."""
        if method == "s2v":
            return self.table is not None and term in self.table
        ok = True
        if self.index is not None:
            ok = ok and bool(self.index.find_occurrences(term, max_n=1))
        if self.backend is not None:
            ok = ok and self.backend.contains(term)
        return ok

    # -- pieces --------------------------------------------------------------

    def per_seed_limit(self, k: int, sentence_budget: int | None = None) -> int:
        budget = sentence_budget if sentence_budget is not None else self.config.sentence_budget
        return max(1, budget // k)

    def mine(
        self,
        seeds: SeedSet,
        n_patterns: int,
        sentence_budget: int | None = None,
    ) -> IndicativePatternSet:
        self._need("backend", "index")
        cfg = MiningConfig(
            sentences_per_seed=self.per_seed_limit(len(seeds), sentence_budget),
            max_patterns=n_patterns,
            diversity_fraction=self.config.diversity_fraction,
            max_rank_cap=self.config.max_rank_cap,
        )
        return mine_patterns(self.backend, self.index, seeds, cfg, workers=self.config.workers)

    def candidate_set(self, seeds: SeedSet, n: int | None = None) -> CandidateSet:
        self._need("table")
        count = n if n is not None else self.config.candidates
        if count is None:
            raise ValidationError(
                "candidate count is required for this method (set candidates=N)"
            )
        return top_neighbors(
            self.table, mean_seed_vector(self.table, seeds), count, self.config.freq_cap
        )

    # -- the one entry point -------------------------------------------------

    def expand(
        self,
        method: str,
        seeds: Sequence[str] | SeedSet,
        top_n: int = 200,
        *,
        sentence_budget: int | None = None,
        n_patterns: int | None = None,
        q: int | None = None,
        candidates: CandidateSet | None = None,
        oracle_terms: Sequence[str] | None = None,
    ) -> Expansion:
        if method not in METHODS:
            raise ValidationError(
                f"unknown method {method!r}; allowed: {', '.join(METHODS)}"
            )
        seed_set = seeds if isinstance(seeds, SeedSet) else SeedSet(tuple(seeds))
        if method == "s2v":
            self._need("table")
            return expand_s2v(self.table, seed_set, top_n, self.config.freq_cap)
        if method == "bb":
            self._need("backend", "index")
            cfg = MiningConfig(
                sentences_per_seed=self.per_seed_limit(len(seed_set), sentence_budget),
                max_patterns=n_patterns or self.config.mpb1_patterns,
                diversity_fraction=self.config.diversity_fraction,
            )
            return expand_bb(
                self.backend, self.index, seed_set, cfg, top_n, self.config.allow_truncated
            )
        if method == "mpb1":
            self._need("backend", "index")
            mined = self.mine(seed_set, n_patterns or self.config.mpb1_patterns, sentence_budget)
            return score_vocab_terms(self.backend, mined, top_n, self.config.allow_truncated)
        # mpb2 / mpb2o
        self._need("backend", "index")
        mined = self.mine(seed_set, n_patterns or self.config.mpb2_patterns, sentence_budget)
        sim_cfg = SimilarityConfig(
            q=q if q is not None else self.config.q,
            max_occurrences=self.config.max_occurrences,
        )
        if method == "mpb2o":
            if oracle_terms is None:
                raise ValidationError("mpb2o requires the gold terms (oracle_terms)")
            base = candidates
            if base is None and self.table is not None and self.config.candidates is not None:
                base = self.candidate_set(seed_set)
            cand = oracle_candidates(base, list(oracle_terms))
        else:
            cand = candidates if candidates is not None else self.candidate_set(seed_set)
        expansion = expand_mpb2(
            self.backend, self.index, mined, cand, sim_cfg, top_n,
            workers=self.config.workers,
        )
        if method == "mpb2o":
            expansion = dataclasses.replace(expansion, method="mpb2o")
        return expansion

    def _need(self, *resources: str) -> None:
        missing = [r for r in resources if getattr(self, r) is None]
        if missing:
            raise ValidationError(
                "engine is missing required resource(s): " + ", ".join(missing)
            )
