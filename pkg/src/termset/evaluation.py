"""Evaluation harness: gold sets with synonym groups, average precision,
seeded trials, and the parameter-grid / q-sweep / subset experiments.

A prediction matches a gold group when it equals any of the group's
surface forms after normalization (lowercase, whitespace collapse); each
group is credited at most once. MAP@70 truncates the ranking to the top 70
and caps the denominator at 70 (used for open sets).
"""

from __future__ import annotations

import json
import logging
import random
from dataclasses import dataclass, field
from typing import Callable, Sequence

from termset.errors import UndefinedMetricError, ValidationError
from termset.expansion import Expansion
from termset.pipeline import Engine

logger = logging.getLogger(__name__)


def normalize_label(term: str) -> str:
    return " ".join(term.lower().split())


@dataclass(frozen=True)
class GoldSet:
    """Named set of term groups; a group holds synonymous surface forms."""

    name: str
    groups: tuple[tuple[str, ...], ...]
    open_set: bool = False

    def __post_init__(self):
        if not self.groups:
            raise UndefinedMetricError(f"gold set {self.name!r} is empty")
        seen: dict[str, int] = {}
        for gi, group in enumerate(self.groups):
            if not group:
                raise ValidationError(f"gold set {self.name!r}: group {gi} is empty")
            for form in group:
                norm = normalize_label(form)
                if norm in seen and seen[norm] != gi:
                    raise ValidationError(
                        f"gold set {self.name!r}: form {form!r} appears in two groups"
                    )
                seen[norm] = gi

    def __len__(self) -> int:
        return len(self.groups)

    def form_to_group(self) -> dict[str, int]:
        return {
            normalize_label(form): gi
            for gi, group in enumerate(self.groups)
            for form in group
        }

    def primary_forms(self) -> list[str]:
        return [group[0] for group in self.groups]

    def all_forms(self) -> list[str]:
        return [form for group in self.groups for form in group]

    def is_subset_of(self, other: "GoldSet") -> bool:
        ours = set(self.form_to_group())
        theirs = set(other.form_to_group())
        return ours <= theirs


def load_gold(path: str, name: str | None = None, open_set: bool = False) -> GoldSet:
    """One group per line, surface forms tab-separated, '#' comments."""
    groups: list[tuple[str, ...]] = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            forms = tuple(normalize_label(f) for f in line.split("\t") if f.strip())
            if forms:
                groups.append(forms)
    if name is None:
        name = path.rsplit("/", 1)[-1].rsplit(".", 1)[0]
    return GoldSet(name=name, groups=tuple(groups), open_set=open_set)


def save_gold(gold: GoldSet, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# gold set: {gold.name}\n")
        for group in gold.groups:
            fh.write("\t".join(group) + "\n")


def average_precision(
    ranking: Expansion | Sequence[str], gold: GoldSet, cutoff: int | None = None
) -> float:
    """AP = (sum of precision@hit over credited hits) / min(|gold|, cutoff).

    Evaluated over the cutoff-truncated ranking; a second surface form of
    an already-credited group counts as an ordinary non-relevant item.
    """
    terms = ranking.terms() if isinstance(ranking, Expansion) else list(ranking)
    if not terms:
        raise ValidationError("cannot score an empty ranking")
    if cutoff is not None and cutoff < 1:
        raise ValidationError("cutoff must be positive")
    lookup = gold.form_to_group()
    items = terms if cutoff is None else terms[:cutoff]
    credited: set[int] = set()
    hits = 0
    precision_sum = 0.0
    for position, term in enumerate(items, start=1):
        gi = lookup.get(normalize_label(term))
        if gi is not None and gi not in credited:
            credited.add(gi)
            hits += 1
            precision_sum += hits / position
    denominator = len(gold) if cutoff is None else min(len(gold), cutoff)
    return precision_sum / denominator


def default_top_n(gold: GoldSet) -> int:
    """200 normally; 350 for large sets (expected size above 100)."""
    return 350 if len(gold) > 100 else 200


def trial_rng(rng_seed: int, trial: int) -> random.Random:
    """Independent per-trial stream so parallel and serial runs agree."""
    return random.Random(f"{rng_seed}:{trial}")


def sample_seed_set(
    gold: GoldSet,
    rng: random.Random,
    seed_size: int,
    accept: Callable[[str], bool] | None = None,
) -> list[str]:
    """Draw groups uniformly without replacement; use each group's first
    surface form. Terms failing ``accept`` are logged and resampled."""
    if seed_size < 1:
        raise ValidationError("seed_size must be positive")
    if len(gold) < seed_size:
        raise ValidationError(
            f"gold set {gold.name!r} has {len(gold)} groups; need {seed_size}"
        )
    order = list(range(len(gold)))
    rng.shuffle(order)
    seeds: list[str] = []
    for gi in order:
        form = gold.groups[gi][0]
        if accept is not None and not accept(form):
            logger.info("rejected seed candidate %r (method preconditions)", form)
            continue
        seeds.append(form)
        if len(seeds) == seed_size:
            return seeds
    raise ValidationError(
        f"could not sample {seed_size} viable seeds from gold set {gold.name!r}"
    )


@dataclass(frozen=True)
class TrialResult:
    ap: float
    seeds: tuple[str, ...]


def run_trial(
    engine: Engine,
    method: str,
    gold: GoldSet,
    seed_size: int = 3,
    rng_seed: int = 0,
    trial: int = 0,
    top_n: int | None = None,
    cutoff: int | None = None,
    **overrides,
) -> TrialResult:
    """Sample a seed set, expand, and score one trial."""
    rng = trial_rng(rng_seed, trial)
    seeds = sample_seed_set(gold, rng, seed_size, accept=lambda t: engine.seed_ok(t, method))
    n = top_n if top_n is not None else default_top_n(gold)
    if method == "mpb2o":
        overrides.setdefault("oracle_terms", gold.primary_forms())
    expansion = engine.expand(method, seeds, n, **overrides)
    if cutoff is None and gold.open_set:
        cutoff = 70
    ap = average_precision(expansion, gold, cutoff)
    return TrialResult(ap=ap, seeds=tuple(seeds))


@dataclass
class EvalReport:
    method: str
    set_name: str
    aps: list[float]
    seed_sets: list[tuple[str, ...]]
    config: dict = field(default_factory=dict)

    @property
    def mean_map(self) -> float:
        return sum(self.aps) / len(self.aps)

    def to_json(self) -> dict:
        return {
            "method": self.method,
            "set": self.set_name,
            "trials": len(self.aps),
            "ap_per_trial": self.aps,
            "mean_map": self.mean_map,
            "seed_sets": [list(s) for s in self.seed_sets],
            "config": self.config,
        }

    def table(self) -> str:
        lines = [
            f"set: {self.set_name}   method: {self.method}   trials: {len(self.aps)}",
            f"{'trial':>5}  {'AP':>8}  seeds",
        ]
        for i, (ap, seeds) in enumerate(zip(self.aps, self.seed_sets)):
            lines.append(f"{i:>5}  {ap:>8.4f}  {', '.join(seeds)}")
        lines.append(f"{'MAP':>5}  {self.mean_map:>8.4f}")
        return "\n".join(lines)


def evaluate(
    engine: Engine,
    method: str,
    gold: GoldSet,
    trials: int = 3,
    seed_size: int = 3,
    rng_seed: int = 0,
    top_n: int | None = None,
    config: dict | None = None,
    **overrides,
) -> EvalReport:
    if trials < 1:
        raise ValidationError("trials must be positive")
    report = EvalReport(method=method, set_name=gold.name, aps=[], seed_sets=[],
                        config=config or {})
    for trial in range(trials):
        result = run_trial(
            engine, method, gold, seed_size, rng_seed, trial, top_n, **overrides
        )
        report.aps.append(result.ap)
        report.seed_sets.append(result.seeds)
    return report


# -- experiment harnesses ----------------------------------------------------


@dataclass
class GridReport:
    """Mean MAP per (sentence budget, pattern count) cell; None marks an
    infeasible cell (more patterns requested than sentences)."""

    set_name: str
    sent_counts: list[int]
    patt_counts: list[int]
    cells: dict[tuple[int, int], float | None]
    seed_sets: list[tuple[str, ...]]
    config: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "set": self.set_name,
            "sent_counts": self.sent_counts,
            "patt_counts": self.patt_counts,
            "cells": [
                {"sent": s, "patt": p, "map": self.cells[(s, p)]}
                for p in self.patt_counts
                for s in self.sent_counts
            ],
            "seed_sets": [list(s) for s in self.seed_sets],
            "config": self.config,
        }

    def table(self) -> str:
        width = 8
        header = "patt\\sent".rjust(width) + "".join(str(s).rjust(width) for s in self.sent_counts)
        lines = [header]
        for p in self.patt_counts:
            row = str(p).rjust(width)
            for s in self.sent_counts:
                value = self.cells[(s, p)]
                row += ("NA" if value is None else f"{value:.3f}").rjust(width)
            lines.append(row)
        return "\n".join(lines)


def grid_experiment(
    engine: Engine,
    gold: GoldSet,
    sent_counts: Sequence[int],
    patt_counts: Sequence[int],
    trials: int = 5,
    seed_size: int = 3,
    rng_seed: int = 0,
    top_n: int | None = None,
    method: str = "mpb1",
    config: dict | None = None,
) -> GridReport:
    """Mean MAP over fixed seed sets for every feasible (sent, patt) cell."""
    seed_sets = [
        sample_seed_set(
            gold, trial_rng(rng_seed, t), seed_size, accept=lambda x: engine.seed_ok(x, method)
        )
        for t in range(trials)
    ]
    n = top_n if top_n is not None else default_top_n(gold)
    cutoff = 70 if gold.open_set else None
    cells: dict[tuple[int, int], float | None] = {}
    for sent in sent_counts:
        for patt in patt_counts:
            if patt > sent:
                cells[(sent, patt)] = None
                continue
            aps = []
            for seeds in seed_sets:
                expansion = engine.expand(
                    method, seeds, n, sentence_budget=sent, n_patterns=patt
                )
                aps.append(average_precision(expansion, gold, cutoff))
            cells[(sent, patt)] = sum(aps) / len(aps)
    return GridReport(
        set_name=gold.name,
        sent_counts=list(sent_counts),
        patt_counts=list(patt_counts),
        cells=cells,
        seed_sets=[tuple(s) for s in seed_sets],
        config=config or {},
    )


@dataclass
class SweepReport:
    set_name: str
    method: str
    maps: dict[int, float]
    seed_sets: list[tuple[str, ...]]
    config: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "set": self.set_name,
            "method": self.method,
            "map_per_q": [{"q": q, "map": m} for q, m in sorted(self.maps.items())],
            "seed_sets": [list(s) for s in self.seed_sets],
            "config": self.config,
        }

    def table(self) -> str:
        lines = [f"{'q':>6}  {'MAP':>8}"]
        for q in sorted(self.maps):
            lines.append(f"{q:>6}  {self.maps[q]:>8.4f}")
        return "\n".join(lines)


def q_sweep(
    engine: Engine,
    gold: GoldSet,
    q_values: Sequence[int],
    trials: int = 1,
    seed_size: int = 3,
    rng_seed: int = 0,
    top_n: int | None = None,
    method: str = "mpb2",
    config: dict | None = None,
    **overrides,
) -> SweepReport:
    """MAP as a function of the overlap-list size q, fixed seed sets."""
    seed_sets = [
        sample_seed_set(
            gold, trial_rng(rng_seed, t), seed_size, accept=lambda x: engine.seed_ok(x, method)
        )
        for t in range(trials)
    ]
    if method == "mpb2o":
        overrides.setdefault("oracle_terms", gold.primary_forms())
    n = top_n if top_n is not None else default_top_n(gold)
    cutoff = 70 if gold.open_set else None
    maps: dict[int, float] = {}
    for q in q_values:
        aps = [
            average_precision(engine.expand(method, seeds, n, q=q, **overrides), gold, cutoff)
            for seeds in seed_sets
        ]
        maps[q] = sum(aps) / len(aps)
    return SweepReport(
        set_name=gold.name,
        method=method,
        maps=maps,
        seed_sets=[tuple(s) for s in seed_sets],
        config=config or {},
    )


@dataclass
class SubsetReport:
    """Per-trial AP of one expansion scored against a subset gold and its
    superset gold."""

    subset_name: str
    superset_name: str
    method: str
    subset_aps: list[float]
    superset_aps: list[float]
    seed_sets: list[tuple[str, ...]]
    config: dict = field(default_factory=dict)

    @property
    def subset_map(self) -> float:
        return sum(self.subset_aps) / len(self.subset_aps)

    @property
    def superset_map(self) -> float:
        return sum(self.superset_aps) / len(self.superset_aps)

    def to_json(self) -> dict:
        return {
            "method": self.method,
            "subset": self.subset_name,
            "superset": self.superset_name,
            "subset_ap_per_trial": self.subset_aps,
            "superset_ap_per_trial": self.superset_aps,
            "subset_map": self.subset_map,
            "superset_map": self.superset_map,
            "seed_sets": [list(s) for s in self.seed_sets],
            "config": self.config,
        }

    def table(self) -> str:
        lines = [
            f"method: {self.method}   seeds from: {self.subset_name}",
            f"{'trial':>5}  {'AP(' + self.subset_name + ')':>16}  {'AP(' + self.superset_name + ')':>16}",
        ]
        for i, (a, b) in enumerate(zip(self.subset_aps, self.superset_aps)):
            lines.append(f"{i:>5}  {a:>16.4f}  {b:>16.4f}")
        lines.append(f"{'MAP':>5}  {self.subset_map:>16.4f}  {self.superset_map:>16.4f}")
        return "\n".join(lines)


def subset_experiment(
    engine: Engine,
    subset_gold: GoldSet,
    superset_gold: GoldSet,
    method: str,
    trials: int = 3,
    seed_size: int = 3,
    rng_seed: int = 0,
    top_n: int | None = None,
    config: dict | None = None,
    **overrides,
) -> SubsetReport:
    """Seeds come from the subset; each expansion is scored against both
    gold sets."""
    if not subset_gold.is_subset_of(superset_gold):
        raise ValidationError(
            f"{subset_gold.name!r} is not a subset of {superset_gold.name!r} "
            "after normalization"
        )
    if method == "mpb2o":
        overrides.setdefault("oracle_terms", superset_gold.primary_forms())
    n = top_n if top_n is not None else default_top_n(superset_gold)
    report = SubsetReport(
        subset_name=subset_gold.name,
        superset_name=superset_gold.name,
        method=method,
        subset_aps=[],
        superset_aps=[],
        seed_sets=[],
        config=config or {},
    )
    for trial in range(trials):
        rng = trial_rng(rng_seed, trial)
        seeds = sample_seed_set(
            subset_gold, rng, seed_size, accept=lambda t: engine.seed_ok(t, method)
        )
        expansion = engine.expand(method, seeds, n, **overrides)
        sub_cut = 70 if subset_gold.open_set else None
        sup_cut = 70 if superset_gold.open_set else None
        report.subset_aps.append(average_precision(expansion, subset_gold, sub_cut))
        report.superset_aps.append(average_precision(expansion, superset_gold, sup_cut))
        report.seed_sets.append(tuple(seeds))
    return report


def write_report_json(report, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report.to_json(), fh, sort_keys=True, indent=1)
        fh.write("\n")
