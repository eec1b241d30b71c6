"""Command-line entry point: evolve, bench, nash and match workflows."""

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import bench as bench_mod
from . import reporting
from .evolution import ConfigError, EvolutionConfig, evolve, extract_population_strategy
from .game import GameError, builtin_game, load_game
from .interaction import (InteractionConfig, InteractionError, horizon_values,
                          simulate_match)
from .nash_oracle import (OracleError, distance_to_nearest_equilibrium,
                          equilibrium_report, regret, support_enumeration)
from .smm import SmmError, load_smm, save_smm

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_RUNTIME = 3

ORACLE_CAP = 8

_CONFIG_ERRORS = (ConfigError, GameError, SmmError, OracleError,
                  bench_mod.BenchError, InteractionError)


def _resolve_game(ident):
    if ident is None:
        raise GameError("no game given")
    if os.path.exists(ident):
        return load_game(ident)
    return builtin_game(ident)


def _resolve_seed(args, config_doc=None):
    """Precedence: --seed flag, config file, EVONASH_SEED, default 0."""
    if getattr(args, "seed", None) is not None:
        return args.seed
    if config_doc and "seed" in config_doc:
        return int(config_doc["seed"])
    env = os.environ.get("EVONASH_SEED")
    if env is not None:
        return int(env)
    return 0


def _load_config_doc(path):
    if path is None:
        return {}
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError("cannot parse config %s: %s" % (path, exc)) from exc
    if not isinstance(doc, dict):
        raise ConfigError("config %s must be a JSON object" % path)
    return doc


def cmd_evolve(args):
    doc = _load_config_doc(args.config)
    doc["seed"] = _resolve_seed(args, doc)
    config = EvolutionConfig.from_dict(doc)
    game = _resolve_game(args.game)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    population, history = evolve(config, game, workers=args.workers)
    strategy = extract_population_strategy(population, game, config.interaction)
    reg_row, reg_col = regret(game, strategy, strategy)

    agent_files = []
    for i, agent in enumerate(population):
        name = "agent_%03d.json" % i
        save_smm(agent, out / name)
        agent_files.append(name)

    summary = {
        "game": game.name,
        "config": config.to_dict(),
        "seed": config.seed,
        "strategy": strategy.probs.tolist(),
        "regret": {"row": reg_row, "col": reg_col},
        "final_mean_fitness": history.records[-1].mean_fitness,
        "final_max_fitness": history.records[-1].max_fitness,
        "agents": agent_files,
        "history_csv": "history.csv",
        "timings_csv": "timings.csv",
    }
    if game.actions_row <= ORACLE_CAP and game.actions_col <= ORACLE_CAP:
        equilibria = support_enumeration(game)
        if equilibria:
            summary["distance_to_nearest_equilibrium"] = (
                distance_to_nearest_equilibrium((strategy, strategy), equilibria))
            summary["equilibria"] = [eq.to_dict() for eq in equilibria]

    reporting.write_history_csv(history, out / "history.csv")
    reporting.write_timings_csv(history, out / "timings.csv")
    reporting.write_summary_json(summary, out / "summary.json")
    print(json.dumps({"out": str(out), "seed": config.seed,
                      "strategy": strategy.probs.tolist(),
                      "regret": [reg_row, reg_col]}))
    return EXIT_OK


def cmd_bench(args):
    doc = _load_config_doc(args.config)
    doc["seed"] = _resolve_seed(args, doc)
    interaction_doc = doc.setdefault("interaction", {})
    interaction_doc["method"] = args.method
    config = EvolutionConfig.from_dict(doc)
    game = None
    if args.sweep != "A":
        game = _resolve_game(args.game or "prisoners_dilemma")
    values = tuple(int(v) for v in args.values.split(","))
    spec = bench_mod.SweepSpec(
        base_config=config, sweep_variable=args.sweep, values=values,
        repetitions=args.reps, game=game, workers=args.workers)

    records = bench_mod.run_sweep(spec)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    stem = "sweep_%s" % args.sweep
    bench_mod.write_sweep_csv(records, out / ("%s.csv" % stem))
    verdict = bench_mod.verdict(records, args.sweep,
                                noise_floor_ms=args.noise_floor_ms)
    bench_mod.write_sweep_svg(records, out / ("%s.svg" % stem),
                              exponent=verdict["exponent"],
                              r_squared=verdict["r_squared"])
    reporting.write_summary_json(verdict, out / ("%s_verdict.json" % stem))
    print(json.dumps(verdict))
    return EXIT_OK


def cmd_nash(args):
    game = _resolve_game(args.game)
    report = equilibrium_report(game, max_actions=ORACLE_CAP)
    print(json.dumps(report, indent=2))
    return EXIT_OK


def cmd_match(args):
    m1 = load_smm(args.agent1)
    m2 = load_smm(args.agent2)
    game = _resolve_game(args.game)
    result = {"game": game.name, "k_steps": args.k}
    for method in ("joint", "factored"):
        for mode in ("last", "average"):
            cfg = InteractionConfig(k_steps=args.k, method=method, horizon_mode=mode)
            v1, v2 = horizon_values(m1, m2, game, cfg)
            result["%s_%s" % (method, mode)] = [v1, v2]
    if args.simulate:
        seed = _resolve_seed(args)
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
        sim = {}
        for mode in ("last", "average"):
            mean1, mean2, se1, se2 = simulate_match(
                m1, m2, game, args.k, args.simulate, rng, horizon_mode=mode)
            sim[mode] = {"mean": [mean1, mean2], "stderr": [se1, se2]}
        result["simulate"] = sim
        result["rollouts"] = args.simulate
        result["seed"] = seed
    print(json.dumps(result, indent=2))
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="evonash",
        description="Evolutionary Nash-equilibrium approximation for "
                    "normal-form games, with an exact oracle and benchmarks.")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p_evolve = sub.add_parser("evolve", help="run the genetic algorithm")
    p_evolve.add_argument("--game", required=True,
                          help="builtin game id or game file path")
    p_evolve.add_argument("--config", help="JSON config file")
    p_evolve.add_argument("--seed", type=int)
    p_evolve.add_argument("--out", required=True, help="output directory")
    p_evolve.add_argument("--workers", type=int,
                          default=os.cpu_count() or 1)
    p_evolve.set_defaults(func=cmd_evolve)

    p_bench = sub.add_parser("bench", help="run a scaling sweep")
    p_bench.add_argument("--sweep", required=True,
                         choices=list(bench_mod.SWEEP_VARIABLES))
    p_bench.add_argument("--values", required=True,
                         help="comma-separated ascending integers")
    p_bench.add_argument("--reps", type=int, default=5)
    p_bench.add_argument("--method", choices=["joint", "factored"],
                         default="joint")
    p_bench.add_argument("--game", help="builtin game id or path (non-A sweeps)")
    p_bench.add_argument("--config", help="JSON config file")
    p_bench.add_argument("--seed", type=int)
    p_bench.add_argument("--out", required=True)
    p_bench.add_argument("--workers", type=int, default=1)
    p_bench.add_argument("--noise-floor-ms", type=float,
                         default=bench_mod.NOISE_FLOOR_MS,
                         help="exclude sweep points faster than this from the fit")
    p_bench.set_defaults(func=cmd_bench)

    p_nash = sub.add_parser("nash", help="print the exact equilibrium report")
    p_nash.add_argument("--game", required=True)
    p_nash.set_defaults(func=cmd_nash)

    p_match = sub.add_parser("match", help="inspect a single agent pair")
    p_match.add_argument("--agent1", required=True)
    p_match.add_argument("--agent2", required=True)
    p_match.add_argument("--game", required=True)
    p_match.add_argument("--k", type=int, default=5)
    p_match.add_argument("--simulate", type=int, metavar="ROLLOUTS")
    p_match.add_argument("--seed", type=int)
    p_match.set_defaults(func=cmd_match)

    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except _CONFIG_ERRORS as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001 - runtime failures map to exit 3
        print("runtime error: %s" % exc, file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
