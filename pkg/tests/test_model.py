from __future__ import annotations

import dataclasses

import pytest
from hypothesis import given, strategies as st

from emnetplan.model import (
    DeploymentPlan,
    Point,
    WeightFunction,
    dbs_window,
    distance,
    fbs_window,
    gvbs_window,
    load_plan,
    load_scenario,
    plan_from_dict,
    plan_to_dict,
    save_plan,
    save_scenario,
    scenario_from_dict,
    scenario_to_dict,
    validate,
    validate_plan,
)
from factories import make_plan, make_scenario


class TestFbsWindow:
    def test_transit_time_is_distance_over_speed(self):
        # 3-4-5 triangle: 50 km at 50 km/h
        sc = make_scenario(fbs_initial=((0.0, 0.0),), fbs_speed=50.0, fbs_endurance=4.0)
        plan = make_plan(fbs=((30.0, 40.0, 0.0),))
        w = fbs_window(sc, plan, 0)
        assert w.arrive == pytest.approx(1.0)

    def test_service_time_reserves_return_leg(self):
        # transit 0.5 h, endurance 2 h, dispatch 1 -> serve [1.5, 2.5]
        sc = make_scenario(fbs_initial=((0.0, 0.0),), fbs_speed=50.0, fbs_endurance=2.0)
        plan = make_plan(fbs=((25.0, 0.0, 1.0),))
        w = fbs_window(sc, plan, 0)
        assert w.arrive == pytest.approx(1.5)
        assert w.depart == pytest.approx(2.5)
        assert w.length == pytest.approx(1.0)

    def test_transit_half_endurance_gives_empty_window(self):
        sc = make_scenario(fbs_initial=((0.0, 0.0),), fbs_speed=50.0, fbs_endurance=2.0)
        plan = make_plan(fbs=((50.0, 0.0, 0.0),))  # transit exactly 1 h = endurance/2
        w = fbs_window(sc, plan, 0)
        assert w.empty
        assert w.arrive == w.depart

    @given(
        d1=st.floats(0.0, 40.0),
        d2=st.floats(0.0, 40.0),
    )
    def test_window_length_non_increasing_in_distance(self, d1, d2):
        sc = make_scenario(fbs_initial=((0.0, 0.0),), fbs_speed=50.0, fbs_endurance=2.0)
        near, far = sorted((d1, d2))
        w_near = fbs_window(sc, make_plan(fbs=((near, 0.0, 0.0),)), 0)
        w_far = fbs_window(sc, make_plan(fbs=((far, 0.0, 0.0),)), 0)
        assert w_far.length <= w_near.length + 1e-12
        assert w_near.length == pytest.approx(max(0.0, 2.0 - 2 * near / 50.0))


class TestDbsWindow:
    def test_operating_time_starts_at_touchdown(self):
        sc = make_scenario(dbs_initial=((0.0, 0.0),), dbs_speed=50.0, dbs_operating_time=5.0)
        plan = make_plan(dbs=((0.0, 25.0, 0.0),))
        w = dbs_window(sc, plan, 0)
        assert (w.arrive, w.depart) == (pytest.approx(0.5), pytest.approx(5.5))

    def test_dispatch_translates_window(self):
        sc = make_scenario(dbs_initial=((0.0, 0.0),), dbs_speed=50.0, dbs_operating_time=5.0)
        w = dbs_window(sc, make_plan(dbs=((0.0, 25.0, 2.0),)), 0)
        assert (w.arrive, w.depart) == (pytest.approx(2.5), pytest.approx(7.5))

    def test_target_at_depot_serves_immediately(self):
        sc = make_scenario(dbs_initial=((3.0, 4.0),), dbs_operating_time=5.0)
        w = dbs_window(sc, make_plan(dbs=((3.0, 4.0, 1.0),)), 0)
        assert (w.arrive, w.depart) == (1.0, 6.0)

    @given(st.floats(0.0, 25.0), st.floats(0.0, 4.9))
    def test_duration_is_exactly_operating_time(self, dist, dispatch):
        sc = make_scenario(dbs_initial=((0.0, 0.0),), dbs_speed=50.0, dbs_operating_time=5.0)
        w = dbs_window(sc, make_plan(dbs=((dist, 0.0, dispatch),)), 0)
        assert w.depart - w.arrive == pytest.approx(5.0, abs=1e-12)


class TestGvbsWindow:
    def test_assigned_vehicle_serves_until_horizon(self):
        sc = make_scenario(
            gvbs_count=1, gvbs_locations=((18.0, 0.0),), travel=((0.8,),), horizon=5.0
        )
        w = gvbs_window(sc, make_plan(gvbs={0: 0}), 0)
        assert (w.arrive, w.depart) == (0.8, 5.0)
        assert w.location == Point(18.0, 0.0)

    def test_unassigned_vehicle_has_no_window(self):
        sc = make_scenario(gvbs_count=1, gvbs_locations=((18.0, 0.0),), travel=((0.8,),))
        assert gvbs_window(sc, make_plan(), 0) is None

    def test_arrival_past_horizon_clamps_empty(self):
        sc = make_scenario(
            gvbs_count=1, gvbs_locations=((18.0, 0.0),), travel=((6.0,),), horizon=5.0
        )
        w = gvbs_window(sc, make_plan(gvbs={0: 0}), 0)
        assert w.empty
        assert (w.arrive, w.depart) == (5.0, 5.0)


@given(delta=st.floats(0.0, 3.0), base=st.floats(0.0, 1.5))
def test_dispatch_shift_translates_windows(delta, base):
    sc = make_scenario(
        fbs_initial=((0.0, 0.0),),
        dbs_initial=((0.0, 0.0),),
        horizon=10.0,
    )
    w0 = fbs_window(sc, make_plan(fbs=((10.0, 5.0, base),)), 0)
    w1 = fbs_window(sc, make_plan(fbs=((10.0, 5.0, base + delta),)), 0)
    assert w1.arrive - w0.arrive == pytest.approx(delta, abs=1e-12)
    assert w1.depart - w0.depart == pytest.approx(delta, abs=1e-12)
    d0 = dbs_window(sc, make_plan(dbs=((10.0, 5.0, base),)), 0)
    d1 = dbs_window(sc, make_plan(dbs=((10.0, 5.0, base + delta),)), 0)
    assert d1.arrive - d0.arrive == pytest.approx(delta, abs=1e-12)
    assert d1.depart - d0.depart == pytest.approx(delta, abs=1e-12)


class TestValidate:
    def test_default_scenario_is_clean(self, default_sc):
        assert validate(default_sc) == []

    def test_zero_radius_flagged(self, default_sc):
        bad = dataclasses.replace(default_sc, fbs_radius=0.0)
        problems = validate(bad)
        assert any("fbs_radius" in p and "positive" in p for p in problems)

    def test_asymmetric_backhaul_table_flagged(self, default_sc):
        table = dict(default_sc.backhaul_thresholds)
        table[("TBS", "FBS")] = 3.0  # conflicts with FBS-TBS
        bad = dataclasses.replace(default_sc, backhaul_thresholds=table)
        problems = validate(bad)
        assert any("disagree" in p for p in problems)

    def test_missing_threshold_pair_flagged(self, default_sc):
        table = dict(default_sc.backhaul_thresholds)
        del table[("DBS", "GVBS")]
        problems = validate(dataclasses.replace(default_sc, backhaul_thresholds=table))
        assert any("missing" in p and "DBS-GVBS" in p for p in problems)

    def test_negative_travel_time_flagged(self):
        sc = make_scenario(gvbs_count=1, gvbs_locations=((1.0, 1.0),), travel=((-0.5,),))
        problems = validate(sc)
        assert any("gvbs_travel_time[0][0]" in p for p in problems)

    def test_all_violations_reported_not_just_first(self, default_sc):
        bad = dataclasses.replace(default_sc, fbs_radius=0.0, horizon=-1.0)
        problems = validate(bad)
        assert len(problems) >= 2


class TestValidatePlan:
    def test_duplicate_location_rejected(self, default_sc):
        problems = validate_plan(default_sc, make_plan(gvbs={0: 1, 1: 1}))
        assert any("assigned to both" in p for p in problems)

    def test_out_of_range_indices_rejected(self, default_sc):
        problems = validate_plan(default_sc, make_plan(gvbs={9: 0}))
        assert any("out of range" in p for p in problems)

    def test_dispatch_must_be_before_horizon(self, default_sc):
        fbs = tuple((0.0, 0.0, 0.0) for _ in range(default_sc.fbs_count))
        fbs = fbs[:-1] + ((0.0, 0.0, default_sc.horizon),)
        problems = validate_plan(default_sc, make_plan(fbs=fbs))
        assert any("outside [0, horizon)" in p for p in problems)

    def test_target_outside_box_rejected(self, default_sc):
        fbs = ((default_sc.disaster_radius + 1.0, 0.0, 0.0),) + tuple(
            (0.0, 0.0, 0.0) for _ in range(default_sc.fbs_count - 1)
        )
        problems = validate_plan(default_sc, make_plan(fbs=fbs))
        assert any("outside [-R, R]" in p for p in problems)

    def test_partial_fleet_length_rejected(self, default_sc):
        problems = validate_plan(default_sc, make_plan(fbs=((0.0, 0.0, 0.0),)))
        assert any("expected" in p for p in problems)

    def test_empty_fleet_lists_allowed(self, default_sc):
        assert validate_plan(default_sc, DeploymentPlan()) == []


class TestSerialization:
    def test_scenario_round_trip(self, default_sc, tmp_path):
        path = tmp_path / "scenario.json"
        save_scenario(default_sc, path)
        assert load_scenario(path) == default_sc

    def test_scenario_dict_round_trip_preserves_weight(self, default_sc):
        sc = dataclasses.replace(default_sc, weight=WeightFunction.exponential(0.2))
        assert scenario_from_dict(scenario_to_dict(sc)) == sc

    def test_plan_round_trip(self, tmp_path):
        plan = make_plan(
            gvbs={1: 3, 0: 2},
            fbs=((1.0, -2.0, 0.25), (3.5, 4.0, 1.0)),
            dbs=((0.0, 0.0, 4.99),),
        )
        path = tmp_path / "plan.json"
        save_plan(plan, path)
        assert load_plan(path) == plan

    def test_plan_dict_round_trip(self):
        plan = make_plan(gvbs={0: 5})
        assert plan_from_dict(plan_to_dict(plan)) == plan

    def test_missing_field_reports_path(self):
        with pytest.raises(ValueError, match="missing fields"):
            scenario_from_dict({"disaster_radius": 20.0})

    def test_bad_point_reports_path(self, default_sc):
        obj = scenario_to_dict(default_sc)
        obj["tbs_locations"][2] = {"x": 1.0}
        with pytest.raises(ValueError, match=r"tbs_locations\[2\]"):
            scenario_from_dict(obj)

    def test_bad_threshold_key_rejected(self, default_sc):
        obj = scenario_to_dict(default_sc)
        obj["backhaul_thresholds"]["FBS"] = 8.0
        with pytest.raises(ValueError, match="backhaul_thresholds"):
            scenario_from_dict(obj)


def test_distance_is_euclidean():
    assert distance(Point(0.0, 0.0), Point(3.0, 4.0)) == 5.0


def test_weight_constructors():
    assert WeightFunction.constant().kind == "constant"
    w = WeightFunction.exponential(1.5)
    assert (w.kind, w.alpha) == ("exponential", 1.5)


def test_backhaul_threshold_lookup_symmetric(default_sc):
    assert default_sc.backhaul_threshold("FBS", "TBS") == default_sc.backhaul_threshold(
        "TBS", "FBS"
    )
    with pytest.raises(KeyError):
        default_sc.backhaul_threshold("TBS", "TBS")
