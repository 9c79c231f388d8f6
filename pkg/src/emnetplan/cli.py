"""Command-line surface: scenario generation, simulation, optimization, reports.

Exit codes: 0 success, 2 validation/schema error, 3 runtime error. Errors
are emitted as one JSON object on stderr so callers can parse them.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from . import scenario_gen
from .geometry import CoverageGrid, build_grid
from .metric import time_weighted_coverage
from .model import (
    DeploymentPlan,
    Scenario,
    WeightFunction,
    load_plan,
    load_scenario,
    plan_to_dict,
    save_plan,
    save_scenario,
    validate,
    validate_plan,
)
from .opt_ga import GaConfig, optimize_aerial
from .opt_gvbs import GvbsSearchConfig, effective_time_threshold, optimize_gvbs
from .simulator import run_simulation, write_events_csv, write_trace_csv


class ValidationFailure(Exception):
    """Bad inputs: schema violations, invariant violations, missing files."""

    def __init__(self, message: str, violations: list[str] | None = None):
        super().__init__(message)
        self.violations = violations or []


@dataclass(frozen=True)
class RunManifest:
    """Resolved inputs for one CLI invocation."""

    scenario_path: Path
    plan_path: Path | None
    cell_size: float
    weight: WeightFunction | None  # None = keep the scenario's weight
    horizon: float | None  # None = keep the scenario's horizon
    out_dir: Path
    seed: int
    force: bool


def _weight_from_args(args: argparse.Namespace) -> WeightFunction | None:
    if args.weight is None and args.alpha is None:
        return None
    if args.weight == "constant":
        return WeightFunction.constant()
    return WeightFunction.exponential(args.alpha if args.alpha is not None else 0.0)


def _manifest_from_args(args: argparse.Namespace, needs_plan: bool) -> RunManifest:
    scenario_path = Path(args.scenario)
    if not scenario_path.is_file():
        raise ValidationFailure(f"scenario file not found: {scenario_path}")
    plan_path = None
    if needs_plan:
        if args.plan is None:
            raise ValidationFailure("a --plan file is required")
        plan_path = Path(args.plan)
        if not plan_path.is_file():
            raise ValidationFailure(f"plan file not found: {plan_path}")
    return RunManifest(
        scenario_path=scenario_path,
        plan_path=plan_path,
        cell_size=args.cell_size,
        weight=_weight_from_args(args),
        horizon=args.horizon,
        out_dir=Path(args.out_dir),
        seed=args.seed,
        force=args.force,
    )


def _load_inputs(manifest: RunManifest) -> tuple[Scenario, DeploymentPlan | None]:
    try:
        scenario = load_scenario(manifest.scenario_path)
    except (ValueError, KeyError, json.JSONDecodeError) as exc:
        raise ValidationFailure(f"scenario {manifest.scenario_path}: {exc}") from exc
    if manifest.weight is not None:
        scenario = dataclasses.replace(scenario, weight=manifest.weight)
    if manifest.horizon is not None:
        scenario = dataclasses.replace(scenario, horizon=manifest.horizon)
    problems = validate(scenario)
    if problems:
        raise ValidationFailure(f"invalid scenario {manifest.scenario_path}", problems)

    plan = None
    if manifest.plan_path is not None:
        try:
            plan = load_plan(manifest.plan_path)
        except (ValueError, KeyError, json.JSONDecodeError) as exc:
            raise ValidationFailure(f"plan {manifest.plan_path}: {exc}") from exc
        problems = validate_plan(scenario, plan)
        if problems:
            raise ValidationFailure(f"invalid plan {manifest.plan_path}", problems)
    return scenario, plan


def _output_path(manifest: RunManifest, name: str) -> Path:
    manifest.out_dir.mkdir(parents=True, exist_ok=True)
    path = manifest.out_dir / name
    if path.exists() and not manifest.force:
        raise ValidationFailure(f"output {path} exists; pass --force to overwrite")
    return path


def _grid_for(scenario: Scenario, manifest: RunManifest) -> CoverageGrid:
    return build_grid(scenario.disaster_radius, manifest.cell_size)


def _hourly_samples(trace, horizon: float) -> dict[str, float]:
    return {str(h): trace.value_at(float(h)) for h in range(int(horizon) + 1) if h <= horizon}


def cmd_simulate(manifest: RunManifest) -> None:
    """Simulate one plan: writes trace.csv, events.csv and summary.json."""
    scenario, plan = _load_inputs(manifest)
    assert plan is not None
    trace_path = _output_path(manifest, "trace.csv")
    events_path = _output_path(manifest, "events.csv")
    summary_path = _output_path(manifest, "summary.json")

    run = run_simulation(scenario, plan, _grid_for(scenario, manifest))
    score = time_weighted_coverage(run.trace, scenario.weight)

    write_trace_csv(run.trace, trace_path)
    write_events_csv(run.events, events_path)
    summary = {"c_w": score.c_w, "fraction_at": _hourly_samples(run.trace, scenario.horizon)}
    summary_path.write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
    print(f"c_w = {score.c_w:.6f} over [0, {scenario.horizon}] h -> {manifest.out_dir}")


def cmd_report(manifest: RunManifest) -> None:
    """Figure-style data for one plan: trace, arrive/active pairs, summary."""
    scenario, plan = _load_inputs(manifest)
    assert plan is not None
    trace_path = _output_path(manifest, "trace.csv")
    pairs_path = _output_path(manifest, "arrive_active.csv")
    summary_path = _output_path(manifest, "summary.json")

    run = run_simulation(scenario, plan, _grid_for(scenario, manifest))
    score = time_weighted_coverage(run.trace, scenario.weight)
    write_trace_csv(run.trace, trace_path)

    with open(pairs_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["kind", "unit", "arrival", "first_active"])
        for node, window in sorted(run.windows.items()):
            if node[0] == "GVBS":
                continue
            first = run.first_activation.get(node)
            writer.writerow(
                [node[0], node[1], repr(window.arrive), "" if first is None else repr(first)]
            )

    summary = {"c_w": score.c_w, "fraction_at": _hourly_samples(run.trace, scenario.horizon)}
    summary_path.write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
    print(f"report written to {manifest.out_dir} (c_w = {score.c_w:.6f})")


def _gvbs_config_from_args(args: argparse.Namespace) -> GvbsSearchConfig:
    return GvbsSearchConfig(
        time_threshold=args.gvbs_time_threshold,
        max_evaluations=args.gvbs_max_evaluations,
    )


def cmd_optimize_gvbs(manifest: RunManifest, cfg: GvbsSearchConfig) -> None:
    """Stage one alone: writes gvbs_plan.json and gvbs_report.json."""
    scenario, _ = _load_inputs(manifest)
    plan_path = _output_path(manifest, "gvbs_plan.json")
    report_path = _output_path(manifest, "gvbs_report.json")

    result = optimize_gvbs(scenario, cfg, _grid_for(scenario, manifest))
    save_plan(result.plan, plan_path)
    report = {
        "assignment": {str(g): n for g, n in sorted(result.plan.gvbs_assignment.items())},
        "c_w": result.score.c_w,
        "evaluations": result.evaluations,
        "truncated": result.truncated,
        "time_threshold": effective_time_threshold(scenario, cfg),
    }
    report_path.write_text(json.dumps(report, indent=2) + "\n", encoding="utf-8")
    print(
        f"ground stage: c_w = {result.score.c_w:.6f}, "
        f"assignment {report['assignment']} ({result.evaluations} evaluations)"
    )


def cmd_optimize(manifest: RunManifest, gvbs_cfg: GvbsSearchConfig, ga_cfg: GaConfig) -> None:
    """Two-stage pipeline: writes plan.json, report.json and ga_history.csv."""
    scenario, _ = _load_inputs(manifest)
    plan_path = _output_path(manifest, "plan.json")
    report_path = _output_path(manifest, "report.json")
    history_path = _output_path(manifest, "ga_history.csv")

    grid = _grid_for(scenario, manifest)
    try:
        ground = optimize_gvbs(scenario, gvbs_cfg, grid)
    except Exception as exc:
        raise RuntimeError(f"ground stage failed: {exc}") from exc
    try:
        aerial = optimize_aerial(scenario, ground.plan, ga_cfg, grid)
    except Exception as exc:
        raise RuntimeError(f"aerial stage failed: {exc}") from exc

    save_plan(aerial.plan, plan_path)
    with open(history_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["generation", "best_c_w"])
        for generation, value in enumerate(aerial.history):
            writer.writerow([generation, repr(value)])
    report = {
        "gvbs_stage": {
            "assignment": {str(g): n for g, n in sorted(ground.plan.gvbs_assignment.items())},
            "c_w": ground.score.c_w,
            "evaluations": ground.evaluations,
            "truncated": ground.truncated,
        },
        "aerial_stage": {
            "c_w": aerial.score.c_w,
            "generations": ga_cfg.generations,
            "population_size": ga_cfg.population_size,
            "rng_seed": ga_cfg.rng_seed,
        },
        "plan": plan_to_dict(aerial.plan),
    }
    report_path.write_text(json.dumps(report, indent=2) + "\n", encoding="utf-8")
    print(
        f"ground stage c_w = {ground.score.c_w:.6f}; "
        f"final c_w = {aerial.score.c_w:.6f} -> {plan_path}"
    )


def cmd_generate_scenario(args: argparse.Namespace) -> None:
    out_path = Path(args.output)
    if out_path.exists() and not args.force:
        raise ValidationFailure(f"output {out_path} exists; pass --force to overwrite")
    weight = _weight_from_args(args) or WeightFunction.constant()
    try:
        scenario = scenario_gen.generate_scenario(
            tbs_count=args.tbs,
            gvbs_count=args.gvbs,
            gvbs_location_count=args.gvbs_locations,
            fbs_count=args.fbs,
            dbs_count=args.dbs,
            seed=args.seed,
            horizon=args.horizon if args.horizon is not None else scenario_gen.DEFAULT_HORIZON,
            weight=weight,
        )
    except ValueError as exc:
        raise ValidationFailure(str(exc)) from exc
    problems = validate(scenario)
    if problems:  # generator bug if this trips
        raise ValidationFailure("generated scenario is invalid", problems)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    save_scenario(scenario, out_path)
    print(f"scenario written to {out_path}")


def _add_common_io_args(parser: argparse.ArgumentParser, needs_plan: bool) -> None:
    parser.add_argument("--scenario", required=True, help="scenario JSON file")
    if needs_plan:
        parser.add_argument("--plan", required=True, help="plan JSON file")
    parser.add_argument("--out-dir", default="out", help="output directory (default: out)")
    parser.add_argument(
        "--cell-size", type=float, default=0.1, help="coverage grid cell size, km (default: 0.1)"
    )
    parser.add_argument(
        "--weight", choices=["constant", "exponential"], default=None,
        help="override the scenario's weight family",
    )
    parser.add_argument(
        "--alpha", type=float, default=None, help="decay rate for --weight exponential (1/h)"
    )
    parser.add_argument(
        "--horizon", type=float, default=None, help="override the scenario's horizon (h)"
    )
    parser.add_argument("--seed", type=int, default=0, help="RNG seed (default: 0)")
    parser.add_argument("--force", action="store_true", help="overwrite existing outputs")


def _add_gvbs_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--gvbs-time-threshold", type=float, default=None,
        help="max vehicle travel time, h (default: horizon / 4)",
    )
    parser.add_argument(
        "--gvbs-max-evaluations", type=int, default=100_000,
        help="cap on assignment evaluations (default: 100000)",
    )


def _add_ga_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--population", type=int, default=100)
    parser.add_argument("--generations", type=int, default=200)
    parser.add_argument("--crossover-rate", type=float, default=0.9)
    parser.add_argument(
        "--mutation-rate", type=float, default=None, help="per-gene (default: 1/genome length)"
    )
    parser.add_argument("--mutation-scale", type=float, default=0.1)
    parser.add_argument("--elite", type=int, default=2)
    parser.add_argument("--tournament", type=int, default=3)
    parser.add_argument(
        "--no-heuristic", action="store_true", help="skip the constructed initial individual"
    )


def _ga_config_from_args(args: argparse.Namespace) -> GaConfig:
    return GaConfig(
        population_size=args.population,
        generations=args.generations,
        crossover_rate=args.crossover_rate,
        mutation_rate=args.mutation_rate,
        mutation_scale=args.mutation_scale,
        elite_count=args.elite,
        tournament_size=args.tournament,
        rng_seed=args.seed,
        seed_heuristic=not args.no_heuristic,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="emnetplan",
        description="Post-disaster emergency network deployment planning",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate-scenario", help="write a seeded scenario file")
    gen.add_argument("--tbs", type=int, default=scenario_gen.DEFAULT_COUNTS["tbs"])
    gen.add_argument("--gvbs", type=int, default=scenario_gen.DEFAULT_COUNTS["gvbs"])
    gen.add_argument(
        "--gvbs-locations", type=int, default=scenario_gen.DEFAULT_COUNTS["gvbs_locations"]
    )
    gen.add_argument("--fbs", type=int, default=scenario_gen.DEFAULT_COUNTS["fbs"])
    gen.add_argument("--dbs", type=int, default=scenario_gen.DEFAULT_COUNTS["dbs"])
    gen.add_argument("--seed", type=int, default=scenario_gen.DEFAULT_SEED)
    gen.add_argument("--horizon", type=float, default=None)
    gen.add_argument("--weight", choices=["constant", "exponential"], default=None)
    gen.add_argument("--alpha", type=float, default=None)
    gen.add_argument("-o", "--output", required=True, help="scenario JSON to write")
    gen.add_argument("--force", action="store_true")

    sim = sub.add_parser("simulate", help="trace + score of a scenario/plan pair")
    _add_common_io_args(sim, needs_plan=True)

    rep = sub.add_parser("report", help="figure data: trace and arrive/active pairs")
    _add_common_io_args(rep, needs_plan=True)

    og = sub.add_parser("optimize-gvbs", help="stage one: ground vehicle assignment")
    _add_common_io_args(og, needs_plan=False)
    _add_gvbs_args(og)

    opt = sub.add_parser("optimize", help="two-stage pipeline (ground, then aerial GA)")
    _add_common_io_args(opt, needs_plan=False)
    _add_gvbs_args(opt)
    _add_ga_args(opt)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "generate-scenario":
            cmd_generate_scenario(args)
        elif args.command == "simulate":
            cmd_simulate(_manifest_from_args(args, needs_plan=True))
        elif args.command == "report":
            cmd_report(_manifest_from_args(args, needs_plan=True))
        elif args.command == "optimize-gvbs":
            cmd_optimize_gvbs(
                _manifest_from_args(args, needs_plan=False), _gvbs_config_from_args(args)
            )
        elif args.command == "optimize":
            cmd_optimize(
                _manifest_from_args(args, needs_plan=False),
                _gvbs_config_from_args(args),
                _ga_config_from_args(args),
            )
        else:  # pragma: no cover - argparse enforces the choices
            raise ValidationFailure(f"unknown command {args.command!r}")
    except ValidationFailure as exc:
        _emit_error("validation", str(exc), exc.violations)
        return 2
    except ValueError as exc:
        _emit_error("validation", str(exc), [])
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        _emit_error("runtime", str(exc), [])
        return 3
    return 0


def _emit_error(stage: str, message: str, violations: list[str]) -> None:
    payload = {"error": {"stage": stage, "message": message, "violations": violations}}
    print(json.dumps(payload), file=sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
