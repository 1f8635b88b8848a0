"""Shared fixtures: hand-sized mock worlds plus the generated synthetic
bundles (mild and noisy) used by the end-to-end and acceptance tests."""

import logging

import pytest

from termset.cache import CachingBackend
from termset.corpus import build_index
from termset.mockworld import MockWorld, Template, build_mock_lm
from termset.pipeline import Engine, EngineConfig
from termset.synth import make_corpus, make_embeddings, make_gold, make_world

logging.getLogger("termset").setLevel(logging.ERROR)
logging.getLogger("termset.mining").setLevel(logging.ERROR)


@pytest.fixture(scope="session")
def capitals_world() -> MockWorld:
    """Tiny world where 'paris' is the clear completion of one template."""
    return MockWorld(
        name="capitals",
        categories={"capital": ("berlin", "london", "madrid", "paris", "rome")},
        templates=(
            Template(
                tokens=("the", "capital", "of", "france", "is", "*"),
                slot=5,
                weights={"capital": 1.0},
                boosts={"paris": 9.0},
            ),
            Template(
                tokens=("the", "capital", "of", "germany", "is", "*"),
                slot=5,
                weights={"capital": 1.0},
                boosts={"berlin": 9.0},
            ),
        ),
        extra_vocab=("and", "visited", "we"),
    )


@pytest.fixture(scope="session")
def capitals_backend(capitals_world):
    return build_mock_lm(capitals_world)


@pytest.fixture(scope="session")
def handcount_world() -> MockWorld:
    """Three templates with counts small enough to normalize by hand."""
    return MockWorld(
        name="handcount",
        categories={"x": ("a", "b"), "y": ("c",)},
        templates=(
            Template(tokens=("u1", "*"), slot=1, weights={"x": 2.0}),
            Template(tokens=("u2", "*"), slot=1, weights={"x": 1.0, "y": 3.0}),
            Template(tokens=("u3", "*"), slot=1, weights={"y": 1.0}),
        ),
        smoothing=0.5,
    )


@pytest.fixture(scope="session")
def vocab100_world() -> MockWorld:
    """Exactly 100 vocabulary items (template context words are members)."""
    members = tuple(f"w{i:02d}" for i in range(100))
    return MockWorld(
        name="vocab100",
        categories={"all": members},
        templates=(
            Template(tokens=("w00", "w01", "*"), slot=2, weights={"all": 1.0},
                     boosts={f"w{i:02d}": 1.0 + i / 10 for i in range(0, 100, 7)}),
        ),
    )


@pytest.fixture(scope="session")
def multiword_world() -> MockWorld:
    return MockWorld(
        name="multiword",
        categories={"city": ("york", "new york", "paris", "rome")},
        templates=(
            Template(tokens=("i", "visited", "*", "last", "summer"), slot=2,
                     weights={"city": 5.0}),
            Template(tokens=("flights", "to", "*", "are", "cheap"), slot=2,
                     weights={"city": 2.0}),
        ),
    )


@pytest.fixture(scope="session")
def multiword_corpus_index(multiword_world):
    lines = []
    for tpl in multiword_world.templates:
        for member in multiword_world.categories["city"]:
            tokens = list(tpl.tokens)
            tokens[tpl.slot] = member
            lines.append(" ".join(tokens))
    return build_index(iter(lines))


class SynthBundle:
    def __init__(self, noisy: bool):
        self.world = make_world(noisy=noisy)
        self.lines = make_corpus(self.world)
        self.index = build_index(iter(self.lines))
        self.backend = CachingBackend(build_mock_lm(self.world))
        self.gold = make_gold(self.world)
        self.table = make_embeddings(self.world)
        self.engine = Engine(
            backend=self.backend,
            index=self.index,
            table=self.table,
            config=EngineConfig(candidates=200),
        )


@pytest.fixture(scope="session")
def mild() -> SynthBundle:
    return SynthBundle(noisy=False)


@pytest.fixture(scope="session")
def noisy() -> SynthBundle:
    return SynthBundle(noisy=True)
