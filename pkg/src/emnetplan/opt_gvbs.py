"""Stage-one optimizer: ground-vehicle placement by pruned enumeration.

Vehicle-to-location assignments are enumerated exhaustively over the pairs
that satisfy the travel-time threshold, scoring each candidate with the
simulator (aerial fleets absent). Placing a vehicle never reduces coverage,
so a vehicle is left unassigned only when no feasible location remains.
"""

from __future__ import annotations

from dataclasses import dataclass

from .geometry import CoverageGrid
from .metric import WeightedScore, time_weighted_coverage
from .model import DeploymentPlan, Scenario
from .simulator import simulate


@dataclass(frozen=True)
class GvbsSearchConfig:
    """Search controls.

    ``time_threshold`` prunes slow deployments: pairs with travel time at or
    above it are discarded. None defaults to horizon / 4; real deployments
    should set it explicitly from response-time requirements.
    ``max_evaluations`` caps simulator calls; the search then returns the
    best candidate seen so far, flagged as truncated.
    """

    time_threshold: float | None = None
    max_evaluations: int = 100_000


@dataclass(frozen=True)
class GvbsResult:
    plan: DeploymentPlan  # ground fields only; aerial lists empty
    score: WeightedScore
    evaluations: int
    truncated: bool


def effective_time_threshold(scenario: Scenario, cfg: GvbsSearchConfig) -> float:
    return cfg.time_threshold if cfg.time_threshold is not None else scenario.horizon / 4.0


def feasible_pairs(scenario: Scenario, cfg: GvbsSearchConfig) -> set[tuple[int, int]]:
    """(vehicle, location) pairs fast enough to deploy: travel time strictly
    below the threshold."""
    threshold = effective_time_threshold(scenario, cfg)
    return {
        (g, n)
        for g in range(scenario.gvbs_count)
        for n in range(len(scenario.gvbs_reachable_locations))
        if scenario.gvbs_travel_time[g][n] < threshold
    }


def _candidate_assignments(scenario: Scenario, pairs: set[tuple[int, int]]):
    """Yield all injective assignments over feasible pairs, lexicographic order.

    A vehicle takes any still-free feasible location; it stays unassigned
    only when none remains. Generated in increasing (g, n) order so the
    first-seen maximum is the lexicographically smallest argmax.
    """
    feasible_by_vehicle = {
        g: sorted(n for gg, n in pairs if gg == g) for g in range(scenario.gvbs_count)
    }
    current: dict[int, int] = {}
    taken: set[int] = set()

    def extend(g: int):
        if g == scenario.gvbs_count:
            yield dict(current)
            return
        options = [n for n in feasible_by_vehicle[g] if n not in taken]
        if not options:
            yield from extend(g + 1)
            return
        for n in options:
            current[g] = n
            taken.add(n)
            yield from extend(g + 1)
            taken.discard(n)
            del current[g]

    yield from extend(0)


def optimize_gvbs(scenario: Scenario, cfg: GvbsSearchConfig, grid: CoverageGrid) -> GvbsResult:
    """Enumerate assignments and return the one maximizing weighted coverage.

    Ties break to the lexicographically smallest assignment vector. When the
    evaluation cap trips, the best candidate evaluated so far is returned
    with ``truncated=True``.
    """
    if cfg.max_evaluations < 1:
        raise ValueError("max_evaluations must be >= 1")
    pairs = feasible_pairs(scenario, cfg)
    candidates = _candidate_assignments(scenario, pairs)

    best_plan: DeploymentPlan | None = None
    best_score: WeightedScore | None = None
    evaluations = 0
    truncated = False
    for assignment in candidates:
        if evaluations >= cfg.max_evaluations:
            truncated = True
            break
        plan = DeploymentPlan(gvbs_assignment=assignment)
        trace = simulate(scenario, plan, grid)
        score = time_weighted_coverage(trace, scenario.weight)
        evaluations += 1
        if best_score is None or score.c_w > best_score.c_w:
            best_plan, best_score = plan, score

    assert best_plan is not None and best_score is not None
    return GvbsResult(plan=best_plan, score=best_score, evaluations=evaluations, truncated=truncated)
