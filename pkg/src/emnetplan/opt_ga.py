"""Stage-two optimizer: real-coded GA over aerial targets and dispatch times.

Each candidate is a normalized vector in [0, 1]^(3*(U+K)): per flying BS an
(x, y, dispatch) triple, then per dropped-off BS the same. Coordinates map
affinely onto [-R, R], dispatch onto [0, horizon). Fitness is the weighted
coverage of the combined plan with the stage-one ground assignment fixed.

Generational loop: tournament selection, whole-arithmetic (blend) crossover,
per-gene Gaussian mutation clamped to [0, 1], elitism. A single seeded RNG
drives the run, so results depend only on (scenario, config, seed).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import CoverageGrid
from .metric import WeightedScore, time_weighted_coverage
from .model import DeploymentPlan, Point, Scenario, distance, merge_aerial
from .simulator import simulate

# Genomes are 1-D float arrays in [0, 1]; see decode() for the gene layout.
Genome = np.ndarray

# Dispatch gene 1.0 maps to horizon * (1 - _HALF_OPEN_EPS), keeping the
# decoded time strictly below the horizon.
_HALF_OPEN_EPS = 1e-9


@dataclass(frozen=True)
class GaConfig:
    population_size: int = 100
    generations: int = 200
    crossover_rate: float = 0.9
    mutation_rate: float | None = None  # None -> 1 / genome length
    mutation_scale: float = 0.1  # std-dev in normalized units
    elite_count: int = 2
    tournament_size: int = 3
    rng_seed: int = 0
    seed_heuristic: bool = True  # include one constructed individual

    def check(self) -> None:
        if self.population_size < 2:
            raise ValueError("population_size must be >= 2")
        if not 0 <= self.elite_count < self.population_size:
            raise ValueError("elite_count must be in [0, population_size)")
        for name in ("crossover_rate", "mutation_rate"):
            value = getattr(self, name)
            if value is not None and not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must be in [0, 1]")
        if self.generations < 0:
            raise ValueError("generations must be >= 0")
        if self.tournament_size < 1:
            raise ValueError("tournament_size must be >= 1")


@dataclass(frozen=True)
class GaResult:
    plan: DeploymentPlan  # ground assignment plus optimized aerial fields
    score: WeightedScore
    history: tuple[float, ...]  # best fitness: initial population, then per generation


def genome_length(scenario: Scenario) -> int:
    return 3 * (scenario.fbs_count + scenario.dbs_count)


def decode(genome: Genome, scenario: Scenario) -> DeploymentPlan:
    """Map a normalized genome to aerial plan fields (ground fields empty)."""
    if len(genome) != genome_length(scenario):
        raise ValueError(f"genome length {len(genome)} != {genome_length(scenario)}")
    r = scenario.disaster_radius
    horizon = scenario.horizon

    def triple(base: int) -> tuple[Point, float]:
        x = -r + 2.0 * r * float(genome[base])
        y = -r + 2.0 * r * float(genome[base + 1])
        t = min(float(genome[base + 2]), 1.0 - _HALF_OPEN_EPS) * horizon
        return Point(x, y), t

    fbs = [triple(3 * u) for u in range(scenario.fbs_count)]
    offset = 3 * scenario.fbs_count
    dbs = [triple(offset + 3 * k) for k in range(scenario.dbs_count)]
    return DeploymentPlan(
        fbs_targets=tuple(p for p, _ in fbs),
        fbs_dispatch=tuple(t for _, t in fbs),
        dbs_targets=tuple(p for p, _ in dbs),
        dbs_dispatch=tuple(t for _, t in dbs),
    )


def encode(plan: DeploymentPlan, scenario: Scenario) -> Genome:
    """Inverse of decode for in-bounds plans."""
    r = scenario.disaster_radius
    horizon = scenario.horizon
    genes: list[float] = []
    for targets, dispatch in (
        (plan.fbs_targets, plan.fbs_dispatch),
        (plan.dbs_targets, plan.dbs_dispatch),
    ):
        for p, t in zip(targets, dispatch):
            genes.extend(((p.x + r) / (2.0 * r), (p.y + r) / (2.0 * r), t / horizon))
    return np.asarray(genes, dtype=float)


def fitness(
    genome: Genome,
    scenario: Scenario,
    fixed_gvbs_plan: DeploymentPlan,
    grid: CoverageGrid,
) -> WeightedScore:
    """Weighted coverage of the combined (fixed ground + decoded aerial) plan."""
    aerial = decode(genome, scenario)
    plan = merge_aerial(
        fixed_gvbs_plan,
        aerial.fbs_targets,
        aerial.fbs_dispatch,
        aerial.dbs_targets,
        aerial.dbs_dispatch,
    )
    return time_weighted_coverage(simulate(scenario, plan, grid), scenario.weight)


def heuristic_genome(scenario: Scenario, fixed_gvbs_plan: DeploymentPlan) -> Genome:
    """Constructed individual: dispatch everything at t=0, aim each unit at
    the deepest point toward the disaster center that still has an anchor
    within direct backhaul range.

    Falls back to the disaster center when no anchor is reachable anywhere
    on the inbound ray. Purely a convergence accelerator; the GA is free to
    move away from it.
    """
    anchors: list[tuple[str, Point]] = [("TBS", p) for p in scenario.tbs_locations]
    anchors.extend(
        ("GVBS", scenario.gvbs_reachable_locations[n])
        for n in fixed_gvbs_plan.gvbs_assignment.values()
    )
    r = scenario.disaster_radius
    center = Point(0.0, 0.0)

    def best_target(initial: Point, kind: str) -> Point:
        best: Point | None = None
        for step in range(201):
            s = step / 200.0
            candidate = Point(
                min(max(initial.x + s * (center.x - initial.x), -r), r),
                min(max(initial.y + s * (center.y - initial.y), -r), r),
            )
            reachable = any(
                distance(candidate, p) <= scenario.backhaul_threshold(kind, anchor_kind)
                for anchor_kind, p in anchors
            )
            if reachable and (best is None or distance(candidate, center) < distance(best, center)):
                best = candidate
        return best if best is not None else center

    genes: list[float] = []
    for initial in scenario.fbs_initial:
        target = best_target(initial, "FBS")
        genes.extend(((target.x + r) / (2 * r), (target.y + r) / (2 * r), 0.0))
    for initial in scenario.dbs_initial:
        target = best_target(initial, "DBS")
        genes.extend(((target.x + r) / (2 * r), (target.y + r) / (2 * r), 0.0))
    return np.asarray(genes, dtype=float)


def _tournament(rng: np.random.Generator, scores: np.ndarray, k: int) -> int:
    contenders = rng.integers(0, len(scores), size=k)
    best = contenders[0]
    for idx in contenders[1:]:
        if scores[idx] > scores[best]:
            best = idx
    return int(best)


def optimize_aerial(
    scenario: Scenario,
    fixed_gvbs_plan: DeploymentPlan,
    cfg: GaConfig,
    grid: CoverageGrid,
) -> GaResult:
    """Run the GA and return the best combined plan, its score, and the
    best-fitness history (non-decreasing whenever elite_count >= 1).
    """
    cfg.check()
    n_genes = genome_length(scenario)
    ground_plan = merge_aerial(fixed_gvbs_plan, (), (), (), ())

    if n_genes == 0:
        score = time_weighted_coverage(simulate(scenario, ground_plan, grid), scenario.weight)
        return GaResult(plan=ground_plan, score=score, history=())

    rng = np.random.default_rng(cfg.rng_seed)
    mutation_rate = cfg.mutation_rate if cfg.mutation_rate is not None else 1.0 / n_genes

    population = rng.random((cfg.population_size, n_genes))
    if cfg.seed_heuristic:
        population[0] = heuristic_genome(scenario, fixed_gvbs_plan)

    def evaluate(genome: Genome) -> float:
        return fitness(genome, scenario, fixed_gvbs_plan, grid).c_w

    scores = np.array([evaluate(genome) for genome in population])
    history = [float(scores.max())]

    for _ in range(cfg.generations):
        elite_order = np.argsort(-scores, kind="stable")[: cfg.elite_count]
        next_population = [population[i].copy() for i in elite_order]
        next_scores = [float(scores[i]) for i in elite_order]

        while len(next_population) < cfg.population_size:
            p1 = population[_tournament(rng, scores, cfg.tournament_size)]
            p2 = population[_tournament(rng, scores, cfg.tournament_size)]
            if rng.random() < cfg.crossover_rate:
                blend = rng.random(n_genes)
                c1 = blend * p1 + (1.0 - blend) * p2
                c2 = blend * p2 + (1.0 - blend) * p1
            else:
                c1, c2 = p1.copy(), p2.copy()
            for child in (c1, c2):
                if len(next_population) >= cfg.population_size:
                    break
                mutate = rng.random(n_genes) < mutation_rate
                noise = rng.normal(0.0, cfg.mutation_scale, size=n_genes)
                child = np.clip(child + mutate * noise, 0.0, 1.0)
                next_population.append(child)
                next_scores.append(evaluate(child))

        population = np.array(next_population)
        scores = np.array(next_scores)
        history.append(float(scores.max()))

    best = int(np.argmax(scores))
    aerial = decode(population[best], scenario)
    best_plan = merge_aerial(
        fixed_gvbs_plan,
        aerial.fbs_targets,
        aerial.fbs_dispatch,
        aerial.dbs_targets,
        aerial.dbs_dispatch,
    )
    best_score = time_weighted_coverage(simulate(scenario, best_plan, grid), scenario.weight)
    return GaResult(plan=best_plan, score=best_score, history=tuple(history))
