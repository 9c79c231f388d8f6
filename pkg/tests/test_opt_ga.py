from __future__ import annotations

import dataclasses

import numpy as np
import pytest

from emnetplan.geometry import build_grid
from emnetplan.metric import time_weighted_coverage
from emnetplan.model import DeploymentPlan, Point, validate_plan
from emnetplan.opt_ga import (
    GaConfig,
    decode,
    encode,
    fitness,
    genome_length,
    heuristic_genome,
    optimize_aerial,
)
from emnetplan.simulator import simulate
from factories import make_plan, make_scenario


@pytest.fixture(scope="module")
def grid05():
    return build_grid(20.0, 0.5)


@pytest.fixture(scope="module")
def small_sc():
    return make_scenario(
        tbs=((0.0, 0.0), (8.0, 4.0)),
        gvbs_count=1,
        gvbs_locations=((16.0, 0.0), (0.0, -16.0)),
        travel=((0.5, 0.7),),
        fbs_initial=((22.0, 0.0), (0.0, 22.0)),
        dbs_initial=((22.0, 0.0),),
        horizon=5.0,
    )


@pytest.fixture(scope="module")
def ground_plan():
    return make_plan(gvbs={0: 0})


class TestDecode:
    def test_midpoint_maps_to_center(self, small_sc):
        genome = np.zeros(genome_length(small_sc))
        genome[0:3] = (0.5, 0.5, 0.0)
        plan = decode(genome, small_sc)
        assert plan.fbs_targets[0] == Point(0.0, 0.0)
        assert plan.fbs_dispatch[0] == 0.0

    def test_endpoints(self, small_sc):
        genome = np.zeros(genome_length(small_sc))
        genome[0:3] = (0.0, 1.0, 0.5)
        plan = decode(genome, small_sc)
        assert plan.fbs_targets[0] == Point(-20.0, 20.0)
        assert plan.fbs_dispatch[0] == pytest.approx(2.5)

    def test_dispatch_gene_one_stays_below_horizon(self, small_sc):
        genome = np.ones(genome_length(small_sc))
        plan = decode(genome, small_sc)
        assert all(t < small_sc.horizon for t in plan.fbs_dispatch + plan.dbs_dispatch)

    def test_round_trip(self, small_sc):
        plan = make_plan(
            fbs=((3.0, -7.5, 1.25), (-12.0, 0.0, 0.0)),
            dbs=((5.0, 5.0, 4.5),),
        )
        recovered = decode(encode(plan, small_sc), small_sc)
        for a, b in zip(recovered.fbs_targets, plan.fbs_targets):
            assert a.x == pytest.approx(b.x, abs=1e-12)
            assert a.y == pytest.approx(b.y, abs=1e-12)
        assert recovered.fbs_dispatch == pytest.approx(plan.fbs_dispatch, abs=1e-12)
        assert recovered.dbs_dispatch == pytest.approx(plan.dbs_dispatch, abs=1e-12)

    def test_wrong_length_rejected(self, small_sc):
        with pytest.raises(ValueError):
            decode(np.zeros(4), small_sc)

    def test_every_genome_decodes_to_valid_plan(self, small_sc):
        rng = np.random.default_rng(3)
        for _ in range(50):
            plan = decode(rng.random(genome_length(small_sc)), small_sc)
            assert validate_plan(small_sc, plan) == []


class TestFitness:
    def test_never_serving_genome_scores_ground_baseline(self, small_sc, ground_plan, grid05):
        # dispatch genes at 1.0 with distant targets: every window starts past the horizon
        genome = np.zeros(genome_length(small_sc))
        genome[0::3] = 0.0  # x = -20 (far from both depots)
        genome[1::3] = 0.0
        genome[2::3] = 1.0
        score = fitness(genome, small_sc, ground_plan, grid05)
        baseline = time_weighted_coverage(
            simulate(small_sc, ground_plan, grid05), small_sc.weight
        )
        assert score.c_w == baseline.c_w

    def test_reachable_fbs_beats_baseline(self, small_sc, ground_plan, grid05):
        genome = np.zeros(genome_length(small_sc))
        genome[0::3] = 1.0  # park unused units at (20, -20) with dispatch ~horizon
        genome[2::3] = 1.0
        # FBS 0 at (-4, 0): inside backhaul range of the tower at the origin,
        # covering area the ground network does not
        genome[0:3] = ((-4.0 + 20) / 40, (0.0 + 20) / 40, 0.0)
        score = fitness(genome, small_sc, ground_plan, grid05)
        baseline = time_weighted_coverage(
            simulate(small_sc, ground_plan, grid05), small_sc.weight
        )
        assert score.c_w > baseline.c_w

    def test_deterministic(self, small_sc, ground_plan, grid05):
        rng = np.random.default_rng(5)
        genome = rng.random(genome_length(small_sc))
        a = fitness(genome, small_sc, ground_plan, grid05)
        b = fitness(genome.copy(), small_sc, ground_plan, grid05)
        assert a.c_w == b.c_w


class TestOptimizeAerial:
    def test_history_non_decreasing_with_elitism(self, small_sc, ground_plan, grid05):
        cfg = GaConfig(population_size=12, generations=8, elite_count=2, rng_seed=11)
        result = optimize_aerial(small_sc, ground_plan, cfg, grid05)
        assert len(result.history) == cfg.generations + 1
        assert all(b >= a for a, b in zip(result.history, result.history[1:]))

    def test_final_score_at_least_initial_best(self, small_sc, ground_plan, grid05):
        cfg = GaConfig(population_size=10, generations=5, rng_seed=13)
        result = optimize_aerial(small_sc, ground_plan, cfg, grid05)
        assert result.score.c_w >= result.history[0]

    def test_no_aerial_fleet_returns_ground_baseline(self, grid05):
        sc = make_scenario(tbs=((0.0, 0.0),), gvbs_count=1,
                           gvbs_locations=((15.0, 0.0),), travel=((0.5,),))
        ground = make_plan(gvbs={0: 0})
        result = optimize_aerial(sc, ground, GaConfig(rng_seed=1), grid05)
        assert result.history == ()
        assert result.plan == ground
        baseline = time_weighted_coverage(simulate(sc, ground, grid05), sc.weight)
        assert result.score.c_w == baseline.c_w

    def test_same_seed_bit_identical(self, small_sc, ground_plan, grid05):
        cfg = GaConfig(population_size=10, generations=4, rng_seed=21)
        a = optimize_aerial(small_sc, ground_plan, cfg, grid05)
        b = optimize_aerial(small_sc, ground_plan, cfg, grid05)
        assert a.plan == b.plan
        assert a.score.c_w == b.score.c_w
        assert a.history == b.history

    def test_different_seeds_explore_differently(self, small_sc, ground_plan, grid05):
        cfg_a = GaConfig(population_size=10, generations=3, rng_seed=1, seed_heuristic=False)
        cfg_b = dataclasses.replace(cfg_a, rng_seed=2)
        a = optimize_aerial(small_sc, ground_plan, cfg_a, grid05)
        b = optimize_aerial(small_sc, ground_plan, cfg_b, grid05)
        assert a.plan != b.plan

    def test_reported_score_matches_resimulation(self, small_sc, ground_plan, grid05):
        cfg = GaConfig(population_size=10, generations=4, rng_seed=31)
        result = optimize_aerial(small_sc, ground_plan, cfg, grid05)
        rescore = time_weighted_coverage(
            simulate(small_sc, result.plan, grid05), small_sc.weight
        )
        assert result.score.c_w == rescore.c_w

    def test_emitted_plan_is_valid_and_keeps_ground_assignment(
        self, small_sc, ground_plan, grid05
    ):
        cfg = GaConfig(population_size=8, generations=3, rng_seed=41)
        result = optimize_aerial(small_sc, ground_plan, cfg, grid05)
        assert validate_plan(small_sc, result.plan) == []
        assert result.plan.gvbs_assignment == ground_plan.gvbs_assignment
        assert len(result.plan.fbs_targets) == small_sc.fbs_count
        assert len(result.plan.dbs_targets) == small_sc.dbs_count

    def test_bad_config_rejected(self, small_sc, ground_plan, grid05):
        with pytest.raises(ValueError):
            optimize_aerial(small_sc, ground_plan, GaConfig(population_size=1), grid05)
        with pytest.raises(ValueError):
            optimize_aerial(
                small_sc, ground_plan, GaConfig(population_size=4, elite_count=4), grid05
            )


class TestHeuristicGenome:
    def test_in_bounds_and_reachable_targets(self, small_sc, ground_plan):
        genome = heuristic_genome(small_sc, ground_plan)
        assert genome.shape == (genome_length(small_sc),)
        assert np.all(genome >= 0.0) and np.all(genome <= 1.0)
        plan = decode(genome, small_sc)
        assert validate_plan(small_sc, plan) == []
        assert all(t == 0.0 for t in plan.fbs_dispatch + plan.dbs_dispatch)

    def test_heuristic_seed_respects_config_flag(self, small_sc, ground_plan, grid05):
        with_seed = optimize_aerial(
            small_sc, ground_plan,
            GaConfig(population_size=8, generations=0, rng_seed=5, seed_heuristic=True),
            grid05,
        )
        without = optimize_aerial(
            small_sc, ground_plan,
            GaConfig(population_size=8, generations=0, rng_seed=5, seed_heuristic=False),
            grid05,
        )
        assert with_seed.history[0] != without.history[0]
