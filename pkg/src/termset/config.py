"""Run configuration: defaults, key=value config files, flag overrides, and
validation that reports every violated field at once.

Config file format: one ``key = value`` per line, '#' comments. Keys match
the CLI flag names (dashes and underscores interchangeable); list values
are comma-separated.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

from termset.errors import ConfigError
from termset.pipeline import (
    DEFAULT_FREQ_CAP,
    DEFAULT_MAX_OCCURRENCES,
    DEFAULT_MPB1_PATTERNS,
    DEFAULT_MPB2_PATTERNS,
    DEFAULT_Q,
    DEFAULT_SENTENCE_BUDGET,
    METHODS,
)

_LIST_KEYS = {"seeds", "sent_counts", "patt_counts", "q_values"}
_INT_KEYS = {
    "sentences", "patterns", "max_rank_cap", "q", "max_occ", "candidates",
    "freq_cap", "top_n", "trials", "seed_size", "rng", "workers", "port",
}
_FLOAT_KEYS = {"diversity"}
_BOOL_KEYS = {"allow_truncated", "open_set", "noisy"}


@dataclass
class RunConfig:
    command: str = ""
    # resources
    corpus: str | None = None
    index: str | None = None
    backend: str | None = None
    mock_world: str | None = None
    embeddings: str | None = None
    cache_dir: str | None = None
    # expansion
    method: str | None = None
    seeds: list[str] = field(default_factory=list)
    sentences: int = DEFAULT_SENTENCE_BUDGET
    patterns: int | None = None
    diversity: float = 0.5
    max_rank_cap: int | None = None
    q: int = DEFAULT_Q
    max_occ: int = DEFAULT_MAX_OCCURRENCES
    candidates: int | None = None
    freq_cap: int | None = DEFAULT_FREQ_CAP
    top_n: int | None = None
    oracle_gold: str | None = None
    candidates_file: str | None = None
    allow_truncated: bool = False
    # evaluation
    gold: str | None = None
    open_set: bool = False
    subset: str | None = None
    superset: str | None = None
    trials: int = 3
    seed_size: int = 3
    rng: int = 0
    sent_counts: list[int] = field(default_factory=list)
    patt_counts: list[int] = field(default_factory=list)
    q_values: list[int] = field(default_factory=list)
    # execution
    out: str = "."
    workers: int = 1
    noisy: bool = False
    host: str = "127.0.0.1"
    port: int = 8711

    def resolved_patterns(self) -> int:
        if self.patterns is not None:
            return self.patterns
        if self.method in ("mpb2", "mpb2o"):
            return DEFAULT_MPB2_PATTERNS
        return DEFAULT_MPB1_PATTERNS

    def snapshot(self) -> dict:
        return dataclasses.asdict(self)

    # -- validation ---------------------------------------------------------

    def validate(self) -> None:
        problems: list[str] = []

        def need(condition: bool, message: str) -> None:
            if not condition:
                problems.append(message)

        positive = [
            ("sentences", self.sentences), ("q", self.q), ("max_occ", self.max_occ),
            ("trials", self.trials), ("seed_size", self.seed_size),
            ("workers", self.workers),
        ]
        for name, value in positive:
            need(value >= 1, f"{name} must be a positive count (got {value})")
        for name, value in [
            ("patterns", self.patterns), ("candidates", self.candidates),
            ("freq_cap", self.freq_cap), ("top_n", self.top_n),
            ("max_rank_cap", self.max_rank_cap),
        ]:
            if value is not None:
                need(value >= 1, f"{name} must be a positive count (got {value})")
        need(0 < self.diversity <= 1, f"diversity must be in (0, 1] (got {self.diversity})")

        needs_corpus = self.command in ("index", "mine", "expand", "evaluate", "grid",
                                        "sweep-q", "subset")
        needs_backend = self.command in ("mine", "expand", "evaluate", "grid", "sweep-q",
                                         "subset", "serve")
        method_required = self.command in ("expand", "evaluate", "subset")

        if self.command == "index":
            need(self.corpus is not None, "corpus is required")
        elif needs_corpus and self.command != "index":
            if self.method != "s2v":
                need(self.corpus or self.index, "one of corpus/index is required")
        if method_required:
            need(self.method is not None, "method is required")
        if self.method is not None:
            need(
                self.method in METHODS,
                f"unknown method {self.method!r}; allowed values: {', '.join(METHODS)}",
            )
        if needs_backend and self.method != "s2v":
            need(self.backend or self.mock_world, "one of backend/mock-world is required")
        if self.command in ("mine", "expand"):
            need(bool(self.seeds), "seeds are required")
        if self.command in ("evaluate", "grid", "sweep-q"):
            need(self.gold is not None, "set (gold file) is required")
        if self.command == "subset":
            need(self.subset is not None, "subset gold file is required")
            need(self.superset is not None, "superset gold file is required")
        if self.command == "grid":
            need(bool(self.sent_counts), "sent-counts are required")
            need(bool(self.patt_counts), "patt-counts are required")
        if self.command == "sweep-q":
            need(bool(self.q_values), "q-values are required")
        if self.method == "s2v":
            need(self.embeddings is not None, "s2v requires embeddings")
        if self.method == "mpb2":
            need(
                self.candidates_file is not None
                or (self.embeddings is not None and self.candidates is not None),
                "mpb2 requires candidates-file, or embeddings plus a candidates count",
            )
        if self.method == "mpb2o" and self.command == "expand":
            need(self.oracle_gold is not None, "mpb2o requires oracle-gold")
        if self.command == "serve":
            need(self.mock_world is not None, "serve requires mock-world")

        if problems:
            raise ConfigError(problems)


def _coerce(key: str, raw: str):
    if key in _LIST_KEYS:
        items = [part.strip() for part in raw.split(",") if part.strip()]
        if key == "seeds":
            return items
        return [int(v) for v in items]
    if key in _INT_KEYS:
        return int(raw)
    if key in _FLOAT_KEYS:
        return float(raw)
    if key in _BOOL_KEYS:
        lowered = raw.strip().lower()
        if lowered in ("true", "yes", "1", "on"):
            return True
        if lowered in ("false", "no", "0", "off"):
            return False
        raise ValueError(f"not a boolean: {raw!r}")
    return raw.strip()


def parse_config_file(path: str) -> dict:
    """Parse a key=value config file into override values."""
    values: dict = {}
    problems: list[str] = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                problems.append(f"{path}:{line_no}: expected key = value")
                continue
            key_text, raw = line.split("=", 1)
            key = key_text.strip().lower().replace("-", "_")
            if key not in {f.name for f in dataclasses.fields(RunConfig)}:
                problems.append(f"{path}:{line_no}: unknown key {key_text.strip()!r}")
                continue
            try:
                values[key] = _coerce(key, raw.strip())
            except ValueError as exc:
                problems.append(f"{path}:{line_no}: {exc}")
    if problems:
        raise ConfigError(problems)
    return values


def build_config(command: str, file_values: dict, flag_values: dict) -> RunConfig:
    """Defaults <- config file <- explicit flags, then validate."""
    merged: dict = dict(file_values)
    merged.update({k: v for k, v in flag_values.items() if v is not None})
    merged["command"] = command
    known = {f.name for f in dataclasses.fields(RunConfig)}
    config = RunConfig(**{k: v for k, v in merged.items() if k in known})
    config.validate()
    return config
