"""Completion cache: memoization, persistence, concurrent access."""

from concurrent.futures import ThreadPoolExecutor

import pytest

from termset.cache import CachingBackend
from termset.mlm import MASK, MaskedPattern


class CountingBackend:
    """Delegates to a real backend, counting complete() calls."""

    def __init__(self, inner):
        self.inner = inner
        self.calls = 0

    def complete(self, pattern, top_q, terms_of_interest=()):
        self.calls += 1
        return self.inner.complete(pattern, top_q, terms_of_interest)

    def contains(self, term):
        return self.inner.contains(term)

    def info(self):
        return self.inner.info()


@pytest.fixture
def counting(capitals_backend):
    return CountingBackend(capitals_backend)


PATTERN = MaskedPattern(("the", "capital", "of", "france", "is", MASK), 5)


def test_repeat_queries_hit_the_cache(counting):
    cached = CachingBackend(counting)
    first = cached.complete(PATTERN, top_q=3, terms_of_interest=["paris"])
    second = cached.complete(PATTERN, top_q=3, terms_of_interest=["paris"])
    assert counting.calls == 1
    assert first == second
    assert cached.hits == 1 and cached.misses == 1


def test_key_covers_top_q_and_terms(counting):
    cached = CachingBackend(counting)
    cached.complete(PATTERN, top_q=3)
    cached.complete(PATTERN, top_q=4)
    cached.complete(PATTERN, top_q=4, terms_of_interest=["rome"])
    assert counting.calls == 3
    # order of terms_of_interest does not matter
    cached.complete(PATTERN, top_q=4, terms_of_interest=["rome"])
    assert counting.calls == 3


def test_persistent_cache_survives_restart(tmp_path, counting):
    path = str(tmp_path / "completions.jsonl")
    warm = CachingBackend(counting, path)
    original = warm.complete(PATTERN, top_q=5, terms_of_interest=["paris", "zzz"])
    assert counting.calls == 1

    class Exploding:
        def complete(self, *a, **k):
            raise AssertionError("should have been served from disk")

        def contains(self, term):
            raise AssertionError

        def info(self):
            return counting.info()

    cold = CachingBackend(Exploding(), path)
    replayed = cold.complete(PATTERN, top_q=5, terms_of_interest=["paris", "zzz"])
    assert replayed == original


def test_concurrent_reads_are_consistent(counting, tmp_path):
    cached = CachingBackend(counting, str(tmp_path / "c.jsonl"))
    patterns = [
        MaskedPattern(("we", "visited", MASK), 2),
        MaskedPattern(("the", "capital", "of", "germany", "is", MASK), 5),
        PATTERN,
    ]

    def worker(i):
        pattern = patterns[i % len(patterns)]
        result, _ = cached.complete(pattern, top_q=4)
        return result.terms()

    with ThreadPoolExecutor(max_workers=8) as pool:
        results = list(pool.map(worker, range(64)))
    for i, terms in enumerate(results):
        assert terms == results[i % len(patterns)]
