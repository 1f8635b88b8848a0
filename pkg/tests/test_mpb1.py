"""Vocabulary-ranking expander (mpb1) and its unselected baseline (bb)."""

import math

import pytest

from termset.corpus import build_index
from termset.errors import CapabilityError
from termset.expansion import save_expansion
from termset.mining import (
    IndicativePatternSet,
    MiningConfig,
    ScoredPattern,
    SeedSet,
    compute_weights,
    mine_patterns,
)
from termset.mlm import (
    MASK,
    BackendInfo,
    CompletionEntry,
    CompletionResult,
    MaskedPattern,
)
from termset.mockworld import MockWorld, Template, build_mock_lm
from termset.mpb1 import expand_bb, score_vocab_terms


def mp(*tokens):
    return MaskedPattern(tuple(tokens), tokens.index(MASK))


def ind_set(pattern_ranks):
    """IndicativePatternSet from [(tokens, max_rank), ...]."""
    patterns = tuple(
        ScoredPattern(mp(*tokens), "seed", {"seed": rank}, rank)
        for tokens, rank in pattern_ranks
    )
    weights = tuple(compute_weights([rank for _, rank in pattern_ranks]))
    return IndicativePatternSet(patterns, weights)


def test_single_pattern_matches_lm_ordering(handcount_world):
    """With one expert the ranking is the LM's own completion ordering."""
    backend = build_mock_lm(handcount_world)
    ind = ind_set([(("u2", MASK), 1)])
    expansion = score_vocab_terms(backend, ind, top_n=6)
    lm_result, _ = backend.complete(mp("u2", MASK), top_q=6)
    assert tuple(expansion.terms()) == lm_result.terms()


def test_weighted_log_prob_arithmetic(handcount_world):
    """Scores equal the independently recomputed weighted sums.

    Template u1 slot counts: a=2, b=2; template u2: a=1, b=1, c=3.
    Vocabulary size 6, smoothing 0.5.
    """
    backend = build_mock_lm(handcount_world)
    ind = ind_set([(("u1", MASK), 1), (("u2", MASK), 4)])
    assert ind.weights == pytest.approx((0.8, 0.2))
    expansion = score_vocab_terms(backend, ind, top_n=6)
    scores = dict(expansion.entries)

    def p1(count):
        return (count + 0.5) / (4 + 0.5 * 6)

    def p2(count):
        return (count + 0.5) / (5 + 0.5 * 6)

    assert scores["a"] == pytest.approx(0.8 * math.log(p1(2)) + 0.2 * math.log(p2(1)), abs=1e-9)
    assert scores["b"] == pytest.approx(scores["a"], abs=1e-12)
    assert scores["c"] == pytest.approx(0.8 * math.log(p1(0)) + 0.2 * math.log(p2(3)), abs=1e-9)
    assert scores["u3"] == pytest.approx(0.8 * math.log(p1(0)) + 0.2 * math.log(p2(0)), abs=1e-9)


def test_incremental_equals_single_pass(handcount_world):
    backend = build_mock_lm(handcount_world)
    ind = ind_set([(("u1", MASK), 1), (("u2", MASK), 2), (("u3", MASK), 5)])
    expansion = score_vocab_terms(backend, ind, top_n=6)
    running = {}
    for pattern, weight in zip(ind.masked_patterns(), ind.weights):
        result, _ = backend.complete(pattern, top_q=6)
        for entry in result.entries:
            running[entry.term] = running.get(entry.term, 0.0) + weight * entry.logprob
    for term, score in expansion.entries:
        assert score == pytest.approx(running[term], abs=1e-12)


def test_ranking_invariant_under_weight_scaling(handcount_world):
    backend = build_mock_lm(handcount_world)
    base = ind_set([(("u1", MASK), 1), (("u2", MASK), 3)])
    scaled = IndicativePatternSet(base.patterns, tuple(w * 7.5 for w in base.weights))
    order_a = score_vocab_terms(backend, base, top_n=6).terms()
    order_b = score_vocab_terms(backend, scaled, top_n=6).terms()
    assert order_a == order_b


def test_vocabulary_closure(mild):
    seeds = SeedSet(tuple(mild.world.categories["bird"][:3]))
    mined = mine_patterns(
        mild.backend, mild.index, seeds, MiningConfig(sentences_per_seed=200, max_patterns=10)
    )
    expansion = score_vocab_terms(mild.backend, mined, top_n=100)
    assert all(mild.backend.contains(term) for term in expansion.terms())
    assert set(seeds.terms) <= set(expansion.terms()[:40])


def test_deterministic_expansion_file(tmp_path, handcount_world):
    backend = build_mock_lm(handcount_world)
    ind = ind_set([(("u1", MASK), 1), (("u2", MASK), 2)])
    paths = []
    for name in ("one.jsonl", "two.jsonl"):
        expansion = score_vocab_terms(backend, ind, top_n=6)
        path = tmp_path / name
        save_expansion(expansion, str(path), config={"run": 1})
        paths.append(path)
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_bb_equals_selected_when_selection_is_noop():
    """Identical pattern sets (same ranks, all diverse) give identical
    expansions for the baseline and the selected method."""
    world = MockWorld(
        name="flat3",
        categories={"s": ("s1", "s2", "s3")},
        templates=(
            Template(tokens=("ua", "ub", "*"), slot=2, weights={"s": 1.0}),
            Template(tokens=("vc", "vd", "*"), slot=2, weights={"s": 1.0}),
            Template(tokens=("we", "wf", "*"), slot=2, weights={"s": 1.0}),
        ),
    )
    backend = build_mock_lm(world)
    lines = ["ua ub s1", "vc vd s2", "we wf s3"]
    index = build_index(iter(lines))
    seeds = SeedSet(("s1", "s2", "s3"))
    config = MiningConfig(sentences_per_seed=5, max_patterns=3)
    mined = mine_patterns(backend, index, seeds, config)
    assert mined.weights == pytest.approx((1 / 3, 1 / 3, 1 / 3))
    selected = score_vocab_terms(backend, mined, top_n=9)
    baseline = expand_bb(backend, index, seeds, config, top_n=9)
    assert selected.entries == baseline.entries


def test_bb_uses_uniform_weights_and_first_patterns(capitals_backend):
    lines = [
        "the capital of france is paris",
        "the capital of germany is berlin",
        "we visited paris",
    ]
    index = build_index(iter(lines))
    seeds = SeedSet(("paris", "berlin"))
    config = MiningConfig(sentences_per_seed=5, max_patterns=2)
    baseline = expand_bb(capitals_backend, index, seeds, config, top_n=8)
    # first two collected patterns in corpus order, weight 1/2 each
    from termset.mpb1 import _aggregate

    expected = _aggregate(
        capitals_backend,
        [
            mp("the", "capital", "of", "france", "is", MASK),
            mp("the", "capital", "of", "germany", "is", MASK),
        ],
        [0.5, 0.5],
        top_n=8,
        method="bb",
    )
    assert baseline.entries == expected.entries


class TruncatingBackend:
    """Claims a 6-term vocabulary but returns only the top 2 entries."""

    def __init__(self, inner):
        self.inner = inner

    def complete(self, pattern, top_q, terms_of_interest=()):
        result, lookup = self.inner.complete(pattern, top_q, terms_of_interest)
        return CompletionResult(result.entries[:2], result.vocab_size), lookup

    def contains(self, term):
        return self.inner.contains(term)

    def info(self):
        return self.inner.info()


def test_truncated_backend_is_a_capability_error(handcount_world):
    backend = TruncatingBackend(build_mock_lm(handcount_world))
    ind = ind_set([(("u1", MASK), 1)])
    with pytest.raises(CapabilityError):
        score_vocab_terms(backend, ind, top_n=6)


def test_truncated_fallback_uses_floor(handcount_world):
    backend = TruncatingBackend(build_mock_lm(handcount_world))
    ind = ind_set([(("u1", MASK), 1), (("u2", MASK), 1)])
    expansion = score_vocab_terms(backend, ind, top_n=6, allow_truncated=True)
    assert expansion.metadata["truncated_backend"] is True
    floor = math.log(1 / (6 * 10))
    assert expansion.metadata["floor_logprob"] == pytest.approx(floor)
    scores = dict(expansion.entries)
    # 'c' is absent from u1's truncated top-2 but present in u2's
    full = build_mock_lm(handcount_world)
    u2, _ = full.complete(mp("u2", MASK), top_q=6)
    c_logprob = {e.term: e.logprob for e in u2.entries}["c"]
    assert scores["c"] == pytest.approx(0.5 * floor + 0.5 * c_logprob, abs=1e-9)
