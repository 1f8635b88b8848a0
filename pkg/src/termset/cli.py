"""Command-line entry point.

Subcommands: index, mine, expand, evaluate, grid, sweep-q, subset, synth,
serve, conformance. Exit codes: 0 success, 2 validation, 3 missing/OOV
seed, 4 backend transport (or conformance failure), 5 internal. Logs go to
stderr; artifacts to --out, each embedding the resolved run configuration
so a rerun with the same config reproduces the same bytes.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from termset import __version__
from termset.config import RunConfig, build_config, parse_config_file
from termset.errors import ConfigError, TermsetError
from termset.expansion import save_expansion
from termset.mining import SeedSet, save_patterns
from termset.pipeline import Engine, EngineConfig

logger = logging.getLogger("termset")


def _comma_list(text: str) -> list[str]:
    return [part.strip() for part in text.split(",") if part.strip()]


def _comma_ints(text: str) -> list[int]:
    return [int(part) for part in _comma_list(text)]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="termset",
        description="Term set expansion from a 3-seed example set, plus its evaluation harness.",
    )
    parser.add_argument("--version", action="version", version=f"termset {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, *, gold: bool = False) -> None:
        p.add_argument("--config", help="key = value config file; flags override it")
        p.add_argument("--out", help="output directory (default: current)")
        p.add_argument("--corpus", help="sentence corpus, one sentence per line")
        p.add_argument("--index", help="previously saved corpus index")
        p.add_argument("--backend", help="fill-mask service base URL")
        p.add_argument("--mock-world", dest="mock_world", help="mock-LM world JSON file")
        p.add_argument("--embeddings", help="embedding table (term<TAB>vector lines)")
        p.add_argument("--cache-dir", dest="cache_dir", help="persistent completion cache directory")
        p.add_argument("--sentences", type=int, help="total sentence budget for mining (default 2000)")
        p.add_argument("--patterns", type=int, help="indicative patterns to keep (default 160 mpb1 / 20 mpb2)")
        p.add_argument("--diversity", type=float, help="required differing-token fraction (default 0.5)")
        p.add_argument("--max-rank-cap", dest="max_rank_cap", type=int, help="drop candidates scoring worse than this rank")
        p.add_argument("--q", type=int, help="top-q overlap size for pattern similarity (default 50)")
        p.add_argument("--max-occ", dest="max_occ", type=int, help="occurrences per candidate term (default 20)")
        p.add_argument("--candidates", type=int, help="candidate list size for mpb2/s2v")
        p.add_argument("--freq-cap", dest="freq_cap", type=int, help="restrict to the N most frequent table terms (default 200000)")
        p.add_argument("--top-n", dest="top_n", type=int, help="expansion size (default 200, 350 for large sets)")
        p.add_argument("--workers", type=int, help="worker pool size (default 1)")
        p.add_argument("--allow-truncated", dest="allow_truncated",
                       action=argparse.BooleanOptionalAction, default=None,
                       help="accept truncated distributions, flooring absent terms")
        p.add_argument("--rng", type=int, help="random seed for trials (default 0)")
        if gold:
            p.add_argument("--set", dest="gold", help="gold set file (groups of tab-separated synonyms)")
            p.add_argument("--open", dest="open_set", action=argparse.BooleanOptionalAction,
                           default=None, help="score as an open set (AP cutoff 70)")
            p.add_argument("--trials", type=int, help="number of trials (default 3)")
            p.add_argument("--seed-size", dest="seed_size", type=int, help="seeds per trial (default 3)")

    p = sub.add_parser("index", help="build and save a corpus index")
    common(p)

    p = sub.add_parser("mine", help="mine indicative patterns for a seed set")
    common(p)
    p.add_argument("--seeds", type=_comma_list, help="comma-separated seed terms")

    p = sub.add_parser("expand", help="expand a seed set into a ranked term list")
    common(p)
    p.add_argument("--seeds", type=_comma_list, help="comma-separated seed terms")
    p.add_argument("--method", choices=("mpb1", "bb", "mpb2", "mpb2o", "s2v"))
    p.add_argument("--candidates-file", dest="candidates_file",
                   help="JSONL candidate list (rank/term/score) for mpb2")
    p.add_argument("--oracle-gold", dest="oracle_gold",
                   help="gold file whose terms extend the candidate list (mpb2o)")

    p = sub.add_parser("evaluate", help="run seeded trials against a gold set")
    common(p, gold=True)
    p.add_argument("--method", choices=("mpb1", "bb", "mpb2", "mpb2o", "s2v"))

    p = sub.add_parser("grid", help="MAP grid over sentence budget x pattern count")
    common(p, gold=True)
    p.add_argument("--sent-counts", dest="sent_counts", type=_comma_ints,
                   help="comma-separated sentence budgets")
    p.add_argument("--patt-counts", dest="patt_counts", type=_comma_ints,
                   help="comma-separated pattern counts")

    p = sub.add_parser("sweep-q", help="MAP as a function of the overlap size q")
    common(p, gold=True)
    p.add_argument("--q-values", dest="q_values", type=_comma_ints, help="comma-separated q values")
    p.add_argument("--method", choices=("mpb2", "mpb2o"), help="similarity method (default mpb2o)")

    p = sub.add_parser("subset", help="score one expansion against a subset and its superset")
    common(p, gold=True)
    p.add_argument("--subset", help="subset gold file (seeds come from here)")
    p.add_argument("--superset", help="superset gold file")
    p.add_argument("--method", choices=("mpb1", "bb", "mpb2", "mpb2o", "s2v"))

    p = sub.add_parser("synth", help="generate a synthetic world bundle")
    p.add_argument("--config", help=argparse.SUPPRESS)
    p.add_argument("--out", help="output directory")
    p.add_argument("--noisy", action=argparse.BooleanOptionalAction, default=None,
                   help="inject junk-dominated trap templates")
    p.add_argument("--rng", type=int, default=7, help="generator seed (default 7)")

    p = sub.add_parser("serve", help="serve the fill-mask protocol from a mock world")
    common(p)
    p.add_argument("--host", help="bind address (default 127.0.0.1)")
    p.add_argument("--port", type=int, help="bind port (default 8711)")

    p = sub.add_parser("conformance", help="run the wire-protocol conformance checks")
    p.add_argument("--config", help=argparse.SUPPRESS)
    p.add_argument("--backend", required=True, help="fill-mask service base URL")
    return parser


# -- resource loading --------------------------------------------------------


def _load_backend(cfg: RunConfig):
    from termset.cache import CachingBackend

    if cfg.backend:
        from termset.client import HttpBackend

        backend = HttpBackend(cfg.backend)
    elif cfg.mock_world:
        from termset.mockworld import build_mock_lm, load_world

        backend = build_mock_lm(load_world(cfg.mock_world))
    else:
        return None
    if cfg.cache_dir:
        os.makedirs(cfg.cache_dir, exist_ok=True)
        backend = CachingBackend(backend, os.path.join(cfg.cache_dir, "completions.jsonl"))
    else:
        backend = CachingBackend(backend)
    return backend


def _load_index(cfg: RunConfig):
    from termset.corpus import build_index, load_index, read_corpus

    if cfg.index:
        return load_index(cfg.index)
    if cfg.corpus:
        return build_index(read_corpus(cfg.corpus))
    return None


def _load_table(cfg: RunConfig):
    if not cfg.embeddings:
        return None
    from termset.embeddings import load_table

    return load_table(cfg.embeddings)


def _engine(cfg: RunConfig) -> Engine:
    engine_config = EngineConfig(
        sentence_budget=cfg.sentences,
        mpb1_patterns=cfg.patterns if cfg.patterns is not None else EngineConfig.mpb1_patterns,
        mpb2_patterns=cfg.patterns if cfg.patterns is not None else EngineConfig.mpb2_patterns,
        diversity_fraction=cfg.diversity,
        max_rank_cap=cfg.max_rank_cap,
        q=cfg.q,
        max_occurrences=cfg.max_occ,
        candidates=cfg.candidates,
        freq_cap=cfg.freq_cap,
        allow_truncated=cfg.allow_truncated,
        workers=cfg.workers,
    )
    return Engine(
        backend=_load_backend(cfg),
        index=_load_index(cfg),
        table=_load_table(cfg),
        config=engine_config,
    )


def _load_candidates_file(path: str):
    from termset.embeddings import CandidateSet
    from termset.expansion import load_expansion

    loaded = load_expansion(path)
    return CandidateSet(entries=loaded.entries, metadata={"source": "file"})


def _out_path(cfg: RunConfig, name: str) -> str:
    os.makedirs(cfg.out, exist_ok=True)
    return os.path.join(cfg.out, name)


# -- subcommands ---------------------------------------------------------------


def _cmd_index(cfg: RunConfig) -> int:
    from termset.corpus import build_index, read_corpus, save_index

    index = build_index(read_corpus(cfg.corpus))
    path = _out_path(cfg, "index.txt")
    save_index(index, path, config=cfg.snapshot())
    logger.info(
        "wrote %s (%d sentences, %d tokens)", path, index.sentence_count, index.token_count
    )
    return 0


def _cmd_mine(cfg: RunConfig) -> int:
    engine = _engine(cfg)
    mined = engine.mine(SeedSet(tuple(cfg.seeds)), cfg.resolved_patterns(), cfg.sentences)
    path = _out_path(cfg, "patterns.jsonl")
    save_patterns(mined, path, config=cfg.snapshot())
    logger.info("wrote %s (%d patterns)", path, len(mined))
    return 0


def _cmd_expand(cfg: RunConfig) -> int:
    from termset.evaluation import load_gold

    engine = _engine(cfg)
    kwargs: dict = {"n_patterns": cfg.patterns, "q": cfg.q}
    if cfg.candidates_file:
        kwargs["candidates"] = _load_candidates_file(cfg.candidates_file)
    if cfg.method == "mpb2o":
        kwargs["oracle_terms"] = load_gold(cfg.oracle_gold).primary_forms()
    expansion = engine.expand(cfg.method, cfg.seeds, cfg.top_n or 200, **kwargs)
    path = _out_path(cfg, "expansion.jsonl")
    save_expansion(expansion, path, config=cfg.snapshot())
    logger.info("wrote %s (%d terms, method %s)", path, len(expansion), expansion.method)
    return 0


def _cmd_evaluate(cfg: RunConfig) -> int:
    from termset.evaluation import evaluate, load_gold, write_report_json

    engine = _engine(cfg)
    gold = load_gold(cfg.gold, open_set=cfg.open_set)
    report = evaluate(
        engine, cfg.method, gold,
        trials=cfg.trials, seed_size=cfg.seed_size, rng_seed=cfg.rng,
        top_n=cfg.top_n, config=cfg.snapshot(),
    )
    path = _out_path(cfg, "report.json")
    write_report_json(report, path)
    print(report.table())
    logger.info("wrote %s (mean MAP %.4f)", path, report.mean_map)
    return 0


def _cmd_grid(cfg: RunConfig) -> int:
    from termset.evaluation import grid_experiment, load_gold, write_report_json

    engine = _engine(cfg)
    gold = load_gold(cfg.gold, open_set=cfg.open_set)
    report = grid_experiment(
        engine, gold, cfg.sent_counts, cfg.patt_counts,
        trials=cfg.trials, seed_size=cfg.seed_size, rng_seed=cfg.rng,
        top_n=cfg.top_n, config=cfg.snapshot(),
    )
    path = _out_path(cfg, "grid.json")
    write_report_json(report, path)
    print(report.table())
    return 0


def _cmd_sweep_q(cfg: RunConfig) -> int:
    from termset.evaluation import load_gold, q_sweep, write_report_json

    engine = _engine(cfg)
    gold = load_gold(cfg.gold, open_set=cfg.open_set)
    report = q_sweep(
        engine, gold, cfg.q_values,
        trials=cfg.trials, seed_size=cfg.seed_size, rng_seed=cfg.rng,
        top_n=cfg.top_n, method=cfg.method or "mpb2o", config=cfg.snapshot(),
    )
    path = _out_path(cfg, "sweep_q.json")
    write_report_json(report, path)
    print(report.table())
    return 0


def _cmd_subset(cfg: RunConfig) -> int:
    from termset.evaluation import load_gold, subset_experiment, write_report_json

    engine = _engine(cfg)
    subset_gold = load_gold(cfg.subset)
    superset_gold = load_gold(cfg.superset)
    report = subset_experiment(
        engine, subset_gold, superset_gold, cfg.method,
        trials=cfg.trials, seed_size=cfg.seed_size, rng_seed=cfg.rng,
        top_n=cfg.top_n, config=cfg.snapshot(),
    )
    path = _out_path(cfg, "subset.json")
    write_report_json(report, path)
    print(report.table())
    return 0


def _cmd_synth(cfg: RunConfig) -> int:
    from termset.synth import write_bundle

    paths = write_bundle(cfg.out, noisy=cfg.noisy, rng_seed=cfg.rng)
    for name, path in sorted(paths.items()):
        logger.info("wrote %s -> %s", name, path)
    return 0


def _cmd_serve(cfg: RunConfig) -> int:
    import uvicorn

    from termset.service import create_app

    backend = _load_backend(cfg)
    index = _load_index(cfg)
    table = _load_table(cfg)
    engine = None
    if index is not None:
        engine = Engine(backend=backend, index=index, table=table,
                        config=_engine_config_only(cfg))
    app = create_app(backend, engine)
    logger.info("serving fill-mask protocol on http://%s:%d", cfg.host, cfg.port)
    uvicorn.run(app, host=cfg.host, port=cfg.port, log_level="warning")
    return 0


def _engine_config_only(cfg: RunConfig) -> EngineConfig:
    return EngineConfig(
        sentence_budget=cfg.sentences,
        diversity_fraction=cfg.diversity,
        q=cfg.q,
        max_occurrences=cfg.max_occ,
        candidates=cfg.candidates,
        freq_cap=cfg.freq_cap,
        allow_truncated=cfg.allow_truncated,
        workers=cfg.workers,
    )


def _cmd_conformance(cfg: RunConfig) -> int:
    import httpx

    from termset.conformance import run_conformance
    from termset.errors import TransportError

    try:
        with httpx.Client(base_url=cfg.backend, timeout=30.0) as client:
            report = run_conformance(client)
    except httpx.HTTPError as exc:
        raise TransportError(f"backend unreachable at {cfg.backend}: {exc}") from exc
    for line in report.lines():
        print(line)
    if report.passed:
        return 0
    logger.error("conformance failed: %d check(s)", sum(1 for c in report.checks if not c.passed))
    return 4


_COMMANDS = {
    "index": _cmd_index,
    "mine": _cmd_mine,
    "expand": _cmd_expand,
    "evaluate": _cmd_evaluate,
    "grid": _cmd_grid,
    "sweep-q": _cmd_sweep_q,
    "subset": _cmd_subset,
    "synth": _cmd_synth,
    "serve": _cmd_serve,
    "conformance": _cmd_conformance,
}


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(
        stream=sys.stderr, level=logging.INFO, format="%(levelname)s %(name)s: %(message)s"
    )
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        file_values = parse_config_file(args.config) if getattr(args, "config", None) else {}
        flag_values = {k: v for k, v in vars(args).items() if k not in ("command", "config")}
        cfg = build_config(args.command, file_values, flag_values)
        return _COMMANDS[args.command](cfg)
    except ConfigError as exc:
        for problem in exc.problems:
            logger.error("config: %s", problem)
        return exc.exit_code
    except TermsetError as exc:
        logger.error("%s", exc)
        return exc.exit_code
    except KeyboardInterrupt:
        return 130
    except Exception:
        logger.exception("internal error")
        return 5


if __name__ == "__main__":
    sys.exit(main())
