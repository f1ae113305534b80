"""Command-line entry points.

Subcommands: synthesize (build a replica dataset), replay (stream
predictions to stdout), evaluate (prequential run with a metrics table),
nested (block-restarted validation), gridsearch (hyperparameter sweep on a
stream prefix), serve (HTTP service), find-cutoff (recover the date filter
from a target row count).
"""

from __future__ import annotations

import argparse
import json
import sys

from .config import AppConfig


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON config file", default=None)
    parser.add_argument("--players", help="players csv path")
    parser.add_argument("--results", help="results csv path")
    parser.add_argument("--scenario", choices=("A", "B"))
    parser.add_argument("--model", choices=("gnb", "hatc", "arfc"))
    parser.add_argument("--seed", type=int)
    parser.add_argument("--decimation", type=int)
    parser.add_argument("--phase", type=int)
    parser.add_argument("--block-size", type=int, dest="block_size")
    parser.add_argument("--cold-start-fraction", type=float, dest="cold_start_fraction")
    parser.add_argument("--target-matches", type=int, default=None,
                        help="recover a date cutoff retaining this many result rows")


def _config_from(args) -> AppConfig:
    config = AppConfig.load(args.config)
    for key in ("scenario", "model", "seed", "decimation", "phase",
                "block_size", "cold_start_fraction"):
        value = getattr(args, key, None)
        if value is not None:
            setattr(config, key, value)
    if args.players:
        config.players_path = args.players
    if args.results:
        config.results_path = args.results
    return config.validate()


def _build(config: AppConfig, target_matches):
    from .service import build_pipeline

    if not config.players_path or not config.results_path:
        sys.exit("dataset paths required (--players/--results or config file)")
    return build_pipeline(config, target_matches)


def _scenario_pieces(builder, config):
    from .evaluation import SCENARIOS, make_selector
    from .learners import make_learner

    scenario = SCENARIOS[config.scenario]
    n_features = len(scenario.feature_indices(builder.manifest))
    learner = make_learner(config.model, n_features=n_features, seed=config.seed,
                           **config.hyperparameters)
    selector = make_selector(builder.chunk_matrix, scenario, builder.manifest)
    return scenario, learner, selector


def cmd_synthesize(args) -> int:
    from .synth import ReplicaSpec, generate_replica, small_replica_spec

    spec = ReplicaSpec(seed=args.seed) if args.full else small_replica_spec(args.games, args.seed)
    meta = generate_replica(spec, args.out)
    print(json.dumps(meta, indent=2))
    return 0


def cmd_find_cutoff(args) -> int:
    from .ingest import load_matches, recover_cutoff

    matches = load_matches(args.results)
    cutoff = recover_cutoff(matches, args.target)
    print(json.dumps({"cutoff": str(cutoff), "target": args.target}))
    return 0


def cmd_evaluate(args) -> int:
    from .evaluation import TABLE_HEADER, run_prequential

    config = _config_from(args)
    builder = _build(config, args.target_matches)
    scenario, learner, selector = _scenario_pieces(builder, config)
    metrics, _ = run_prequential(builder.stream(), learner, selector, scenario,
                                 builder.manifest, decimation=config.decimation,
                                 phase=config.phase)
    print(TABLE_HEADER)
    print(metrics.table_row(config.model))
    if args.json:
        print(json.dumps(metrics.to_dict(), indent=2))
    return 0


def cmd_nested(args) -> int:
    from .evaluation import TABLE_HEADER, make_selector, run_nested
    from .learners import make_learner

    config = _config_from(args)
    builder = _build(config, args.target_matches)
    from .evaluation import SCENARIOS

    scenario = SCENARIOS[config.scenario]
    n_features = len(scenario.feature_indices(builder.manifest))
    result = run_nested(
        builder.stream(),
        lambda: make_learner(config.model, n_features=n_features, seed=config.seed,
                             **config.hyperparameters),
        lambda: make_selector(builder.chunk_matrix, scenario, builder.manifest),
        scenario, builder.manifest,
        block_size=config.block_size, decimation=config.decimation,
    )
    print(TABLE_HEADER)
    for i, block in enumerate(result.per_block):
        print(block.table_row(f"blk{i}"))
    print(result.mean.table_row("mean"))
    return 0


def cmd_replay(args) -> int:
    from .evaluation import PrequentialRunner

    config = _config_from(args)
    builder = _build(config, args.target_matches)
    scenario, learner, selector = _scenario_pieces(builder, config)
    runner = PrequentialRunner(builder.stream(), learner, selector, scenario,
                               builder.manifest, decimation=config.decimation,
                               phase=config.phase)
    count = 0
    while True:
        entry = runner.step()
        if entry is None or (args.limit and count >= args.limit):
            break
        count += 1
        print(json.dumps({
            "index": entry.index,
            "key": list(entry.key),
            "label": entry.label,
            "predicted": entry.predicted,
            "confidence": round(entry.confidence, 4),
            "active_features": entry.n_active,
        }))
    return 0


def cmd_gridsearch(args) -> int:
    from .evaluation import SCENARIOS, grid_search, make_selector
    from .learners import ARFC_GRID, HATC_GRID

    config = _config_from(args)
    if config.model == "gnb":
        sys.exit("gnb has no hyperparameters to tune")
    builder = _build(config, args.target_matches)
    scenario = SCENARIOS[config.scenario]
    n_features = len(scenario.feature_indices(builder.manifest))
    grid = HATC_GRID if config.model == "hatc" else ARFC_GRID
    best, results = grid_search(
        config.model, grid,
        lambda: builder.stream(),
        lambda: make_selector(builder.chunk_matrix, scenario, builder.manifest),
        n_features=n_features, scenario=scenario, manifest=builder.manifest,
        seed=config.seed, decimation=config.decimation, max_steps=args.prefix,
    )
    for point, accuracy in results:
        print(json.dumps({"point": point, "accuracy": round(accuracy, 4)}))
    print(json.dumps({"selected": best}))
    return 0


def cmd_serve(args) -> int:
    from .service import serve

    config = _config_from(args)
    if args.port:
        config.port = args.port
    serve(config, target_matches=args.target_matches)
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="winstream",
                                     description="streaming CS:GO win prediction")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synthesize", help="generate a replica dataset")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=20250810)
    p.add_argument("--games", type=int, default=600)
    p.add_argument("--full", action="store_true", help="full paper-scale replica")
    p.set_defaults(func=cmd_synthesize)

    p = sub.add_parser("find-cutoff", help="recover the date cutoff for a target count")
    p.add_argument("--results", required=True)
    p.add_argument("--target", type=int, required=True)
    p.set_defaults(func=cmd_find_cutoff)

    p = sub.add_parser("evaluate", help="prequential run with a metrics table")
    _add_common(p)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("nested", help="block-restarted nested validation")
    _add_common(p)
    p.set_defaults(func=cmd_nested)

    p = sub.add_parser("replay", help="stream predictions as JSON lines")
    _add_common(p)
    p.add_argument("--limit", type=int, default=None)
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("gridsearch", help="hyperparameter sweep on a stream prefix")
    _add_common(p)
    p.add_argument("--prefix", type=int, default=500,
                   help="evaluated samples per grid point")
    p.set_defaults(func=cmd_gridsearch)

    p = sub.add_parser("serve", help="run the HTTP service")
    _add_common(p)
    p.add_argument("--port", type=int, default=None)
    p.set_defaults(func=cmd_serve)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
