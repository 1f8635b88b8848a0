"""Similarity-based expander: top-q overlap, occurrence collection, scoring."""

import random

import pytest

from termset.corpus import build_index
from termset.errors import ValidationError
from termset.mining import IndicativePatternSet, ScoredPattern, SeedSet, compute_weights
from termset.mlm import MASK, MaskedPattern
from termset.mockworld import MockWorld, Template, build_mock_lm
from termset.mpb2 import (
    CandidateOccurrences,
    SimilarityConfig,
    collect_pats,
    expand_mpb2,
    oracle_candidates,
    pattern_similarity,
    score_candidate,
    top_terms,
)
from termset.embeddings import CandidateSet
from termset.evaluation import average_precision, evaluate


def mp(*tokens):
    return MaskedPattern(tuple(tokens), tokens.index(MASK))


def ind_set(pattern_ranks):
    patterns = tuple(
        ScoredPattern(mp(*tokens), "seed", {"seed": rank}, rank)
        for tokens, rank in pattern_ranks
    )
    weights = tuple(compute_weights([rank for _, rank in pattern_ranks]))
    return IndicativePatternSet(patterns, weights)


@pytest.fixture(scope="module")
def overlap_world():
    """Two templates sharing exactly the terms {wa, wb} in their top four."""
    return MockWorld(
        name="overlap",
        categories={
            "both": ("wa", "wb"),
            "left": ("ya", "yb"),
            "right": ("ua", "ub"),
        },
        templates=(
            Template(tokens=("t1", "*"), slot=1, weights={"both": 10.0, "left": 5.0}),
            Template(tokens=("t2", "*"), slot=1, weights={"both": 10.0, "right": 5.0}),
            Template(tokens=("t3", "*"), slot=1, weights={"left": 5.0}),
            Template(tokens=("t4", "*"), slot=1, weights={"right": 5.0}),
        ),
    )


@pytest.fixture(scope="module")
def overlap_backend(overlap_world):
    return build_mock_lm(overlap_world)


class TestPatternSimilarity:
    def test_self_similarity_is_one(self, overlap_backend):
        p = mp("t1", MASK)
        assert pattern_similarity(overlap_backend, p, p, q=4) == 1.0

    def test_disjoint_top_lists_give_zero(self, overlap_backend):
        assert pattern_similarity(overlap_backend, mp("t3", MASK), mp("t4", MASK), q=2) == 0.0

    def test_half_overlap(self, overlap_backend):
        """top-4 lists {wa,wb,ya,yb} and {wa,wb,ua,ub} share two of four."""
        assert top_terms(overlap_backend, mp("t1", MASK), 4) == {"wa", "wb", "ya", "yb"}
        assert top_terms(overlap_backend, mp("t2", MASK), 4) == {"wa", "wb", "ua", "ub"}
        assert pattern_similarity(overlap_backend, mp("t1", MASK), mp("t2", MASK), q=4) == 0.5

    def test_symmetry(self, overlap_backend, mild):
        rng = random.Random(2)
        patterns = [MaskedPattern(t.masked_tokens(), t.slot) for t in mild.world.templates]
        for _ in range(25):
            a, b = rng.choice(patterns), rng.choice(patterns)
            ab = pattern_similarity(mild.backend, a, b, q=20)
            ba = pattern_similarity(mild.backend, b, a, q=20)
            assert ab == ba
            assert 0.0 <= ab <= 1.0


class TestCollectPats:
    def test_absent_term_empty(self, multiword_corpus_index):
        occ = collect_pats(multiword_corpus_index, "zzz", max_occurrences=5)
        assert occ.patterns == ()

    def test_multi_word_masked_as_one_span(self, multiword_corpus_index):
        occ = collect_pats(multiword_corpus_index, "new york", max_occurrences=5)
        assert len(occ.patterns) == 2
        assert occ.patterns[0].tokens == ("i", "visited", MASK, "last", "summer")

    def test_counts_match_naive_scan(self, mild):
        from tests.test_corpus import naive_occurrences

        rng = random.Random(31)
        vocab = sorted({t for line in mild.lines for t in line.split()})
        probes = rng.sample(vocab, 50)
        for term in probes:
            naive = naive_occurrences(mild.lines, term)
            got = collect_pats(mild.index, term, max_occurrences=10_000)
            assert len(got.patterns) == len(naive)


class TestScoreCandidate:
    def test_exact_copy_dominates(self, overlap_backend):
        ind = ind_set([(("t1", MASK), 1), (("t2", MASK), 4)])
        occ = CandidateOccurrences("x", (mp("t1", MASK),))
        score = score_candidate(overlap_backend, ind, occ, SimilarityConfig(q=4))
        assert score >= 0.8
        assert score == pytest.approx(0.8 * 1.0 + 0.2 * 0.5, abs=1e-12)

    def test_hand_built_two_pattern_arithmetic(self, overlap_backend):
        """Weights 0.8/0.2; occurrence sets pin every overlap by hand."""
        ind = ind_set([(("t3", MASK), 1), (("t4", MASK), 4)])
        occ = CandidateOccurrences("x", (mp("t1", MASK), mp("t2", MASK)))
        # q=4: sim(t3, t1)=0.5, sim(t3, t2)=0, sim(t4, t1)=0, sim(t4, t2)=0.5
        score = score_candidate(overlap_backend, ind, occ, SimilarityConfig(q=4))
        assert score == pytest.approx(0.8 * 0.5 + 0.2 * 0.5, abs=1e-12)

    def test_all_zero_similarities(self, overlap_backend):
        ind = ind_set([(("t3", MASK), 1)])
        occ = CandidateOccurrences("x", (mp("t4", MASK),))
        assert score_candidate(overlap_backend, ind, occ, SimilarityConfig(q=2)) == 0.0

    def test_empty_pats_scores_zero(self, overlap_backend):
        ind = ind_set([(("t1", MASK), 1)])
        occ = CandidateOccurrences("x", ())
        assert score_candidate(overlap_backend, ind, occ, SimilarityConfig(q=4)) == 0.0

    def test_adding_an_occurrence_never_decreases(self, mild):
        rng = random.Random(9)
        templates = list(mild.world.templates)
        ind = ind_set([((*templates[0].masked_tokens(),), 1), ((*templates[7].masked_tokens(),), 3)])
        cfg = SimilarityConfig(q=25)
        pool = [MaskedPattern(t.masked_tokens(), t.slot) for t in templates]
        for _ in range(20):
            patterns = tuple(rng.sample(pool, k=rng.randint(1, 4)))
            extra = patterns + (rng.choice(pool),)
            base = score_candidate(mild.backend, ind, CandidateOccurrences("x", patterns), cfg)
            more = score_candidate(mild.backend, ind, CandidateOccurrences("x", extra), cfg)
            assert more >= base - 1e-15
            assert 0.0 <= base <= 1.0


class TestExpandMpb2:
    def test_oracle_mode_ranks_exactly_the_given_terms(self, mild):
        gold = mild.gold["fruit"]
        candidates = oracle_candidates(None, gold.primary_forms())
        seeds = tuple(mild.world.categories["fruit"][:3])
        mined = mild.engine.mine(SeedSet(seeds), 10)
        expansion = expand_mpb2(
            mild.backend, mild.index, mined, candidates, SimilarityConfig(q=30), top_n=50
        )
        assert sorted(expansion.terms()) == sorted(gold.primary_forms())

    def test_single_candidate_is_a_singleton_ranking(self, overlap_backend):
        index = build_index(iter(["t1 wa", "t2 ub"]))
        ind = ind_set([(("t1", MASK), 1)])
        expansion = expand_mpb2(
            overlap_backend,
            index,
            ind,
            CandidateSet(entries=(("wa", 0.9),)),
            SimilarityConfig(q=4),
            top_n=10,
        )
        assert len(expansion) == 1
        assert expansion.terms() == ["wa"]

    def test_empty_candidates_fatal_with_pointer(self, overlap_backend):
        index = build_index(iter(["t1 wa"]))
        ind = ind_set([(("t1", MASK), 1)])
        with pytest.raises(ValidationError) as err:
            expand_mpb2(
                overlap_backend, index, ind, CandidateSet(entries=()),
                SimilarityConfig(q=4), top_n=10,
            )
        assert "candidate" in str(err.value)

    def test_scores_bounded_and_sorted(self, mild):
        report_seeds = tuple(mild.world.categories["bird"][:3])
        mined = mild.engine.mine(SeedSet(report_seeds), 10)
        candidates = oracle_candidates(
            mild.engine.candidate_set(SeedSet(report_seeds)),
            mild.gold["bird"].primary_forms(),
        )
        expansion = expand_mpb2(
            mild.backend, mild.index, mined, candidates, SimilarityConfig(), top_n=250
        )
        scores = [s for _, s in expansion.entries]
        assert all(0.0 <= s <= 1.0 for s in scores)
        assert scores == sorted(scores, reverse=True)

    def test_planted_category_outranks_noise(self, mild):
        """Gold members of the seed category fill the top ranks, MAP >= 0.95."""
        gold = mild.gold["city"]
        seeds = tuple(mild.world.categories["city"][:3])
        mined = mild.engine.mine(SeedSet(seeds), 10)
        all_members = [m for cat in mild.world.categories.values() for m in cat]
        candidates = oracle_candidates(None, all_members)
        expansion = expand_mpb2(
            mild.backend, mild.index, mined, candidates, SimilarityConfig(), top_n=200
        )
        assert average_precision(expansion, gold) >= 0.95

    def test_worker_pool_does_not_change_results(self, mild):
        seeds = SeedSet(tuple(mild.world.categories["metal"][:3]))
        mined = mild.engine.mine(seeds, 8)
        candidates = oracle_candidates(None, mild.gold["metal"].primary_forms())
        serial = expand_mpb2(
            mild.backend, mild.index, mined, candidates, SimilarityConfig(q=30), top_n=60
        )
        threaded = expand_mpb2(
            mild.backend, mild.index, mined, candidates, SimilarityConfig(q=30),
            top_n=60, workers=4,
        )
        assert serial.entries == threaded.entries


def test_oracle_dominates_plain_mpb2(mild):
    """Extending the candidate list with every gold term never lowers MAP."""
    gold = mild.gold["tool"]
    plain = evaluate(mild.engine, "mpb2", gold, trials=3, rng_seed=12)
    oracle = evaluate(mild.engine, "mpb2o", gold, trials=3, rng_seed=12)
    assert oracle.mean_map >= plain.mean_map - 1e-12
