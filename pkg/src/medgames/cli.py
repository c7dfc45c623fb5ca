"""Command line entry point: `sim <scenario> [flags]`.

Simulation scenarios (random-games, matching, restaurant) write windowed CSV
curves and, when an output file is given, a companion PNG figure.  The
remaining scenarios are one-shot reports: `nash` enumerates pure equilibria
of a serialized game, `mediated-table` prints an explicit mediated payoff
matrix, and `verify-props` checks the delegation-dominance and
equilibrium-welfare properties on random games.

Flags may also be supplied through a JSON config file (`--config`); explicit
flags win over file values.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import fields
from pathlib import Path

from .errors import MedgamesError
from .experiments import (
    ExperimentConfig,
    format_mediated_table,
    run_scenario,
    verify_propositions,
)
from .games import enumerate_pure_nash, load_game, prisoners_dilemma, utility

SIM_SCENARIOS = ("random-games", "matching", "restaurant")


def parse_seeds(text: str) -> tuple[int, ...]:
    """Parse '0,1,2' style lists; 'a-b' expands to the inclusive range."""
    seeds: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part[1:]:
            lo_text, hi_text = part.split("-", 1) if not part.startswith("-") else part[1:].split("-", 1)
            lo, hi = int(lo_text), int(hi_text)
            if hi < lo:
                raise argparse.ArgumentTypeError(f"bad seed range {part!r}")
            seeds.extend(range(lo, hi + 1))
        else:
            seeds.append(int(part))
    if not seeds:
        raise argparse.ArgumentTypeError("need at least one seed")
    return tuple(seeds)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sim", description="Mediated-game simulations and property checks."
    )
    sub = parser.add_subparsers(dest="scenario", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", type=Path, help="JSON file with default flag values")
        p.add_argument("--mediator", choices=["none", "pareto", "punish"])
        p.add_argument("--seeds", type=parse_seeds, help="e.g. 0,1,2 or 0-49")
        p.add_argument("--out", type=Path, help="CSV output path (default: stdout)")

    def add_learning(p: argparse.ArgumentParser) -> None:
        p.add_argument("--horizon", type=int)
        p.add_argument("--window", type=int)
        p.add_argument("--jobs", type=int, help="seed-parallel worker processes")
        p.add_argument("--no-plot", action="store_true", help="skip the PNG next to --out")

    p = sub.add_parser("random-games", help="epsilon-greedy learners on random games")
    add_common(p)
    add_learning(p)
    p.add_argument("--players", type=int)
    p.add_argument("--actions", type=int)

    p = sub.add_parser("matching", help="mutual-matching game")
    add_common(p)
    add_learning(p)
    p.add_argument("--agents", type=int)

    p = sub.add_parser("restaurant", help="restaurant reservation game")
    add_common(p)
    add_learning(p)
    p.add_argument("--agents", type=int)
    p.add_argument("--restaurants", type=int)
    p.add_argument("--alpha", type=float)
    p.add_argument("--ratings", type=Path, help="user_id,restaurant_id,rating CSV")
    p.add_argument("--capacities", type=Path, help="restaurant_id,capacity CSV")

    p = sub.add_parser("mediated-table", help="print an explicit mediated payoff matrix")
    p.add_argument("--config", type=Path, help="JSON file with default flag values")
    p.add_argument("--mediator", choices=["none", "pareto", "punish"])
    p.add_argument("--game", type=Path, help="serialized game (default: prisoner's dilemma)")

    p = sub.add_parser("nash", help="enumerate pure Nash equilibria of a game")
    p.add_argument("--config", type=Path, help="JSON file with default flag values")
    p.add_argument("--game", type=Path, help="serialized game (default: prisoner's dilemma)")

    p = sub.add_parser("verify-props", help="property checks on random 2-player games")
    add_common(p)

    return parser


# Defaults applied after merging config-file values; scenario-specific.
SCENARIO_DEFAULTS = {
    "random-games": {"mediator": "none", "horizon": 10_000, "seeds": tuple(range(5))},
    "matching": {"mediator": "none", "horizon": 20_000, "seeds": tuple(range(5))},
    "restaurant": {"mediator": "none", "horizon": 20_000, "seeds": tuple(range(5))},
    "verify-props": {"mediator": "pareto", "seeds": tuple(range(100))},
    "mediated-table": {"mediator": "pareto"},
    "nash": {},
}


def _merge_config(args: argparse.Namespace) -> dict:
    """Layer values: scenario defaults < config file < explicit flags."""
    merged = dict(SCENARIO_DEFAULTS.get(args.scenario, {}))
    config_path = getattr(args, "config", None)
    if config_path is not None:
        try:
            file_values = json.loads(Path(config_path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise MedgamesError(f"cannot read config file {config_path}: {exc}") from exc
        if not isinstance(file_values, dict):
            raise MedgamesError(f"config file {config_path} must hold a JSON object")
        if "seeds" in file_values and isinstance(file_values["seeds"], str):
            file_values["seeds"] = parse_seeds(file_values["seeds"])
        if "seeds" in file_values and isinstance(file_values["seeds"], list):
            file_values["seeds"] = tuple(int(s) for s in file_values["seeds"])
        merged.update(file_values)
    for key, value in vars(args).items():
        if key in ("scenario", "config") or value is None or value is False:
            continue
        merged[key] = value
    return merged


def _experiment_config(args: argparse.Namespace, merged: dict) -> ExperimentConfig:
    known = {f.name for f in fields(ExperimentConfig)}
    kwargs = {k: v for k, v in merged.items() if k in known}
    for key in ("out", "ratings", "capacities"):
        if kwargs.get(key) is not None:
            kwargs[key] = str(kwargs[key])
    if "seeds" in kwargs:
        kwargs["seeds"] = tuple(kwargs["seeds"])
    return ExperimentConfig(scenario=args.scenario, **kwargs).validated()


def _load_game_arg(merged: dict):
    game_path = merged.get("game")
    return load_game(game_path) if game_path else prisoners_dilemma()


def _run_simulation(args: argparse.Namespace, merged: dict) -> int:
    config = _experiment_config(args, merged)
    summary = run_scenario(config)
    csv_text = summary.to_csv()
    if config.out is None:
        sys.stdout.write(csv_text)
        return 0
    out_path = Path(config.out)
    out_path.write_text(csv_text, encoding="utf-8")
    messages = [f"wrote {out_path} ({len(summary.rows)} rows)"]
    if not merged.get("no_plot"):
        from .plotting import render_summary_figure

        figure_path = out_path.with_suffix(".png")
        render_summary_figure(summary, figure_path)
        messages.append(f"wrote {figure_path}")
    print("; ".join(messages), file=sys.stderr)
    return 0


def _run_verify_props(args: argparse.Namespace, merged: dict) -> int:
    config = _experiment_config(args, merged)
    report = verify_propositions(config)
    print(
        f"delegation dominance [{report.mediator}]: "
        f"{'PASS' if not report.dominance_counterexamples else 'FAIL'} "
        f"({report.games_checked} games, "
        f"{len(report.dominance_counterexamples)} counterexamples)"
    )
    print(
        f"equilibrium welfare  [{report.mediator}]: "
        f"{'PASS' if not report.welfare_counterexamples else 'FAIL'} "
        f"({report.welfare_games_compared} games compared, "
        f"{len(report.welfare_counterexamples)} counterexamples)"
    )
    for line in report.dominance_counterexamples + report.welfare_counterexamples:
        print(f"  counterexample: {line}")
    return 0 if report.passed else 1


def _run_nash(merged: dict) -> int:
    game = _load_game_arg(merged)
    equilibria = enumerate_pure_nash(game)
    if not equilibria:
        print("no pure Nash equilibrium")
        return 0
    for profile in equilibria:
        payoff = utility(game, profile)
        actions = " ".join(str(a) for a in profile)
        values = ", ".join(repr(float(v)) for v in payoff)
        print(f"{actions}  ->  ({values})")
    return 0


def _run_mediated_table(merged: dict) -> int:
    game = _load_game_arg(merged)
    print(format_mediated_table(game, merged.get("mediator", "pareto")), end="")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        merged = _merge_config(args)
        if args.scenario in SIM_SCENARIOS:
            return _run_simulation(args, merged)
        if args.scenario == "verify-props":
            return _run_verify_props(args, merged)
        if args.scenario == "nash":
            return _run_nash(merged)
        if args.scenario == "mediated-table":
            return _run_mediated_table(merged)
        raise MedgamesError(f"unhandled scenario {args.scenario!r}")
    except MedgamesError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
