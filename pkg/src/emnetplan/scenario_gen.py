"""Seeded scenario generator.

Radii, speeds, endurances and backhaul thresholds follow the reference
emergency-deployment parameter set; placements are seeded-random within
documented annuli, since no published instance pins exact coordinates:

* surviving towers: uniform over the central disk (radius <= 0.6 R)
* vehicle-reachable spots: annulus [0.8 R, R] (vehicles stay near the rim)
* vehicle depots (travel times only): annulus [R, 1.25 R]
* aerial staging: two depot points on the 1.05 R circle, fleets split evenly

Travel times are straight-line distance at 30 km/h; they enter the scenario
as data and downstream code never recomputes them.
"""

from __future__ import annotations

import math
from importlib import resources

import numpy as np

from .model import DBS, FBS, GVBS, TBS, Point, Scenario, WeightFunction, scenario_from_dict

DISASTER_RADIUS = 20.0  # km
TBS_RADIUS = 2.0
GVBS_RADIUS = 3.0
FBS_RADIUS = 6.0
DBS_RADIUS = 3.0
FBS_SPEED = 50.0  # km/h
DBS_SPEED = 50.0
FBS_ENDURANCE = 2.0  # h
DBS_OPERATING_TIME = 5.0
GVBS_SPEED = 30.0
DEFAULT_HORIZON = 5.0

BACKHAUL_THRESHOLDS: dict[tuple[str, str], float] = {
    (FBS, TBS): 8.0,
    (FBS, GVBS): 8.0,
    (FBS, FBS): 10.0,
    (FBS, DBS): 8.0,
    (DBS, TBS): 5.0,
    (DBS, GVBS): 5.0,
    (DBS, DBS): 5.0,
}

# Shipped default fleet sizes (data/default_scenario.json uses these).
DEFAULT_COUNTS = {"tbs": 6, "gvbs": 3, "gvbs_locations": 8, "fbs": 10, "dbs": 5}
DEFAULT_SEED = 7


def _annulus_points(
    rng: np.random.Generator, count: int, r_min: float, r_max: float
) -> tuple[Point, ...]:
    # Uniform over the annulus area.
    radii = np.sqrt(rng.uniform(r_min**2, r_max**2, size=count))
    angles = rng.uniform(0.0, 2.0 * math.pi, size=count)
    return tuple(
        Point(float(r * math.cos(a)), float(r * math.sin(a))) for r, a in zip(radii, angles)
    )


def generate_scenario(
    tbs_count: int,
    gvbs_count: int,
    gvbs_location_count: int,
    fbs_count: int,
    dbs_count: int,
    seed: int,
    horizon: float = DEFAULT_HORIZON,
    weight: WeightFunction = WeightFunction.constant(),
) -> Scenario:
    """Build a scenario with the reference parameters and seeded placements."""
    for name, value in (
        ("tbs_count", tbs_count),
        ("gvbs_count", gvbs_count),
        ("gvbs_location_count", gvbs_location_count),
        ("fbs_count", fbs_count),
        ("dbs_count", dbs_count),
    ):
        if value < 0:
            raise ValueError(f"{name} must be non-negative, got {value}")
    if gvbs_count > gvbs_location_count:
        raise ValueError(
            f"gvbs_count ({gvbs_count}) exceeds reachable locations ({gvbs_location_count})"
        )

    rng = np.random.default_rng(seed)
    r = DISASTER_RADIUS

    tbs_locations = _annulus_points(rng, tbs_count, 0.0, 0.6 * r)
    reachable = _annulus_points(rng, gvbs_location_count, 0.8 * r, r)
    depots = _annulus_points(rng, gvbs_count, r, 1.25 * r)
    travel_time = tuple(
        tuple(math.hypot(d.x - loc.x, d.y - loc.y) / GVBS_SPEED for loc in reachable)
        for d in depots
    )

    staging_angles = rng.uniform(0.0, 2.0 * math.pi, size=2)
    staging = [
        Point(1.05 * r * math.cos(a), 1.05 * r * math.sin(a)) for a in staging_angles
    ]
    fbs_initial = tuple(staging[u % 2] for u in range(fbs_count))
    dbs_initial = tuple(staging[k % 2] for k in range(dbs_count))

    return Scenario(
        disaster_radius=r,
        tbs_locations=tbs_locations,
        tbs_radius=TBS_RADIUS,
        gvbs_count=gvbs_count,
        gvbs_reachable_locations=reachable,
        gvbs_travel_time=travel_time,
        gvbs_radius=GVBS_RADIUS,
        fbs_initial=fbs_initial,
        fbs_speed=FBS_SPEED,
        fbs_endurance=FBS_ENDURANCE,
        fbs_radius=FBS_RADIUS,
        dbs_initial=dbs_initial,
        dbs_speed=DBS_SPEED,
        dbs_operating_time=DBS_OPERATING_TIME,
        dbs_radius=DBS_RADIUS,
        backhaul_thresholds=dict(BACKHAUL_THRESHOLDS),
        horizon=horizon,
        weight=weight,
    )


def default_scenario() -> Scenario:
    """The shipped default instance (same content as data/default_scenario.json)."""
    return generate_scenario(
        tbs_count=DEFAULT_COUNTS["tbs"],
        gvbs_count=DEFAULT_COUNTS["gvbs"],
        gvbs_location_count=DEFAULT_COUNTS["gvbs_locations"],
        fbs_count=DEFAULT_COUNTS["fbs"],
        dbs_count=DEFAULT_COUNTS["dbs"],
        seed=DEFAULT_SEED,
    )


def packaged_scenario() -> Scenario:
    """Load the shipped data/default_scenario.json (equal to default_scenario())."""
    import json

    text = resources.files("emnetplan").joinpath("data/default_scenario.json").read_text()
    return scenario_from_dict(json.loads(text))


def large_scenario(seed: int = DEFAULT_SEED) -> Scenario:
    """Long-horizon variant: 50 FBS (25 per staging point), 20 DBS, 12 h."""
    return generate_scenario(
        tbs_count=DEFAULT_COUNTS["tbs"],
        gvbs_count=DEFAULT_COUNTS["gvbs"],
        gvbs_location_count=DEFAULT_COUNTS["gvbs_locations"],
        fbs_count=50,
        dbs_count=20,
        seed=seed,
        horizon=12.0,
    )
