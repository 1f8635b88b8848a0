"""Model wrapper semantics: ranks, vocabulary, limits, determinism."""

import random

import pytest

from mlm_server.model import ProtocolError


def test_rank_equals_full_sort_position(model):
    """Looked-up ranks match the term's position in the full ordering for
    20 random probes."""
    rng = random.Random(5)
    words = [t for t in model.id_to_token if t.isalpha() and len(t) > 2]
    tokens = ["we", "visited", "[MASK]", "today"]
    full = model.fill(tokens, 2, model.vocab_size, [])
    order = [e["term"] for e in full["top"]]
    assert len(order) == model.vocab_size
    probes = rng.sample(words, 20)
    result = model.fill(tokens, 2, 1, probes)
    for term in probes:
        entry = result["lookup"][term]
        assert entry is not None
        assert entry["rank"] == order.index(term) + 1


def test_full_ordering_is_logprob_then_term(model):
    full = model.fill(["the", "[MASK]", "is", "good"], 1, model.vocab_size, [])
    top = full["top"]
    for a, b in zip(top, top[1:]):
        assert a["logprob"] > b["logprob"] or (
            a["logprob"] == b["logprob"] and a["term"] < b["term"]
        )


def test_multi_word_and_multi_piece_terms_are_oov(model):
    result = model.fill(["the", "[MASK]"], 1, 3, ["new york", "playing", "paris"])
    assert result["lookup"]["new york"] is None
    assert result["lookup"]["playing"] is None  # splits into two wordpieces
    assert result["lookup"]["paris"]["rank"] >= 1
    assert not model.in_vocab("new york")
    assert model.in_vocab("capital")


def test_determinism_within_tolerance(model):
    tokens = ["she", "wrote", "a", "[MASK]", "yesterday"]
    a = model.fill(tokens, 3, 25, ["book", "words"])
    b = model.fill(tokens, 3, 25, ["book", "words"])
    assert [e["term"] for e in a["top"]] == [e["term"] for e in b["top"]]
    for ea, eb in zip(a["top"], b["top"]):
        assert abs(ea["logprob"] - eb["logprob"]) <= 1e-6
    assert a["lookup"] == b["lookup"]


def test_pattern_validation(model):
    with pytest.raises(ProtocolError):
        model.fill(["a", "b"], 0, 3, [])  # no mask symbol
    with pytest.raises(ProtocolError):
        model.fill(["[MASK]", "[MASK]"], 0, 3, [])
    with pytest.raises(ProtocolError):
        model.fill(["[MASK]"], 4, 3, [])


def test_context_limit_enforced(model):
    tokens = ["[MASK]"] + ["the"] * model.max_context
    with pytest.raises(ProtocolError) as err:
        model.fill(tokens, 0, 3, [])
    assert err.value.code == "context_length_exceeded"
