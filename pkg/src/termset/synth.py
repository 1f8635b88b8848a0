"""Synthetic world generator: planted semantic categories, context
templates, a sampled sentence corpus, gold sets, and a clustered embedding
table. Everything is driven by one integer seed, so generated bundles are
bit-reproducible.

The mild world carries a few uninformative templates (every category fills
the slot equally). The noisy variant additionally injects trap templates
whose completion distribution is dominated by junk words even though
category members do occur there in the corpus; unselected baselines
average over those bad experts, selection ranks them out.
"""

from __future__ import annotations

import os
import random

import numpy as np

from termset.embeddings import EmbeddingTable, save_table
from termset.evaluation import GoldSet, save_gold
from termset.mockworld import SLOT, MockWorld, Template, save_world

CATEGORIES = ("fruit", "metal", "bird", "city", "tool")
NOISE_CATEGORY = "junk"

_CONSONANTS = "bdfglmnprstvz"
_VOWELS = "aeiou"


def _word(i: int) -> str:
    """Pronounceable pseudo-word for index i (deterministic, collision-free)."""
    syllables = []
    n = i
    for _ in range(3):
        syllables.append(_CONSONANTS[n % len(_CONSONANTS)] + _VOWELS[(n // 13) % 5])
        n //= 65
    return "".join(syllables)


def make_world(
    noisy: bool = False,
    members_per: int = 30,
    templates_per: int = 6,
) -> MockWorld:
    """Five planted categories plus a junk vocabulary, with per-category
    templates, shared uninformative templates, and (optionally) junk traps."""
    categories: dict[str, tuple[str, ...]] = {
        cat: tuple(f"{cat}{i:02d}" for i in range(members_per)) for cat in CATEGORIES
    }
    categories[NOISE_CATEGORY] = tuple(f"junk{i:02d}" for i in range(40))

    templates: list[Template] = []
    word_idx = 0

    def take_words(n: int) -> list[str]:
        nonlocal word_idx
        words = [_word(word_idx + k) for k in range(n)]
        word_idx += n
        return words

    for ci, cat in enumerate(CATEGORIES):
        members = categories[cat]
        for j in range(templates_per):
            fillers = take_words(5)
            slot = 2 + (j % 3)
            body = fillers[: slot - 1] + [SLOT] + fillers[slot - 1 :]
            boosts = {
                members[(7 * j + ci) % members_per]: 4.0,
                members[(11 * j + 3 * ci + 1) % members_per]: 2.0,
            }
            templates.append(
                Template(
                    tokens=tuple(["the"] + body),
                    slot=slot,
                    weights={cat: 10.0},
                    boosts=boosts,
                )
            )

    # uninformative templates: every category (and junk) fills the slot alike
    flat = {cat: 1.0 for cat in CATEGORIES}
    flat[NOISE_CATEGORY] = 1.0
    for j in range(5):
        fillers = take_words(4)
        tokens = tuple(["the", fillers[0], fillers[1], SLOT, fillers[2], fillers[3]])
        templates.append(Template(tokens=tokens, slot=3, weights=dict(flat)))

    if noisy:
        # traps: junk dominates the slot distribution, members barely register
        trap = {cat: 1.0 for cat in CATEGORIES}
        trap[NOISE_CATEGORY] = 50.0
        for j in range(8):
            fillers = take_words(5)
            tokens = tuple(["the", fillers[0], SLOT, fillers[1], fillers[2], fillers[3], fillers[4]])
            templates.append(Template(tokens=tokens, slot=2, weights=dict(trap)))

    return MockWorld(
        name="synthetic-5x30-noisy" if noisy else "synthetic-5x30",
        categories=categories,
        templates=tuple(templates),
        smoothing=0.01,
        max_context=64,
    )


def _classify(world: MockWorld):
    """Split templates into per-category, uninformative, and trap lists."""
    per_cat: dict[str, list[Template]] = {cat: [] for cat in CATEGORIES}
    flat: list[Template] = []
    traps: list[Template] = []
    for tpl in world.templates:
        if len(tpl.weights) == 1:
            (cat,) = tpl.weights
            per_cat[cat].append(tpl)
        elif tpl.weights.get(NOISE_CATEGORY, 0.0) >= 10.0:
            traps.append(tpl)
        else:
            flat.append(tpl)
    return per_cat, flat, traps


def _instantiate(tpl: Template, filler: str) -> str:
    tokens = list(tpl.tokens)
    tokens[tpl.slot] = filler
    return " ".join(tokens)


def make_corpus(
    world: MockWorld,
    rng_seed: int = 7,
    target: int = 2000,
    filler_lines: int = 60,
) -> list[str]:
    """Sample ~``target`` template sentences (plus slot-free filler lines).

    Every category member is planted in a few of its own templates (and,
    in the noisy world, in several traps), so seeds are always findable;
    the remainder is filled by weighted random instantiation.
    """
    rng = random.Random(rng_seed)
    per_cat, flat, traps = _classify(world)
    lines: list[str] = []
    for cat in CATEGORIES:
        members = world.categories[cat]
        own = per_cat[cat]
        for mi, member in enumerate(members):
            for r in range(4):
                lines.append(_instantiate(own[(mi + r) % len(own)], member))
            # trap occurrences outnumber clean ones (polysemous members)
            for r in range(10 if traps else 0):
                lines.append(_instantiate(traps[(mi + r) % len(traps)], member))

    weighted = []
    for tpl in world.templates:
        counts = world.slot_counts(tpl)
        fillers = sorted(counts)
        weights = [counts[f] for f in fillers]
        weighted.append((tpl, fillers, weights))
    while len(lines) < target:
        tpl, fillers, weights = rng.choice(weighted)
        lines.append(_instantiate(tpl, rng.choices(fillers, weights=weights, k=1)[0]))

    junk = list(world.categories[NOISE_CATEGORY])
    for _ in range(filler_lines):
        lines.append(" ".join(rng.choices(junk, k=rng.randint(5, 9))))
    rng.shuffle(lines)
    return lines


def make_gold(world: MockWorld) -> dict[str, GoldSet]:
    return {
        cat: GoldSet(name=cat, groups=tuple((m,) for m in world.categories[cat]))
        for cat in CATEGORIES
    }


def make_embeddings(world: MockWorld, rng_seed: int = 7, dim: int = 12) -> EmbeddingTable:
    """Clustered vectors: members sit near their category center, junk and
    context words are scattered. Row order (member block first) stands in
    for frequency order."""
    rng = np.random.default_rng(rng_seed)
    centers = {cat: rng.normal(size=dim) * 4.0 for cat in CATEGORIES}
    terms: list[str] = []
    rows: list[np.ndarray] = []
    for cat in CATEGORIES:
        for member in world.categories[cat]:
            terms.append(member)
            rows.append(centers[cat] + rng.normal(size=dim) * 0.25)
    for junk_term in world.categories[NOISE_CATEGORY]:
        terms.append(junk_term)
        rows.append(rng.normal(size=dim) * 4.0)
    return EmbeddingTable(terms, np.vstack(rows))


def write_bundle(out_dir: str, noisy: bool = False, rng_seed: int = 7) -> dict[str, str]:
    """Generate and write world, corpus, gold sets, and embeddings."""
    os.makedirs(out_dir, exist_ok=True)
    world = make_world(noisy=noisy)
    paths = {
        "world": os.path.join(out_dir, "world.json"),
        "corpus": os.path.join(out_dir, "corpus.txt"),
        "embeddings": os.path.join(out_dir, "embeddings.txt"),
    }
    save_world(world, paths["world"])
    with open(paths["corpus"], "w", encoding="utf-8") as fh:
        for line in make_corpus(world, rng_seed=rng_seed):
            fh.write(line + "\n")
    save_table(make_embeddings(world, rng_seed=rng_seed), paths["embeddings"])
    gold_dir = os.path.join(out_dir, "gold")
    os.makedirs(gold_dir, exist_ok=True)
    for cat, gold in make_gold(world).items():
        path = os.path.join(gold_dir, f"{cat}.txt")
        save_gold(gold, path)
        paths[f"gold:{cat}"] = path
    return paths
