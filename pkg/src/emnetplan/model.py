"""Domain model: scenario and plan types, service windows, validation, JSON codecs.

Units are kilometers and hours throughout. All types are immutable after
construction and safe to share across concurrent evaluators.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

# Node kinds. TBS and arrived GVBS are backhaul anchors; FBS and DBS need a
# backhaul path to an anchor before they can serve.
TBS = "TBS"
GVBS = "GVBS"
FBS = "FBS"
DBS = "DBS"

NODE_KINDS = (TBS, GVBS, FBS, DBS)

# Type pairs that must be present in a scenario's backhaul threshold table
# (every pair involving an FBS or a DBS; anchors need no backhaul).
REQUIRED_THRESHOLD_PAIRS = (
    (FBS, TBS),
    (FBS, GVBS),
    (FBS, FBS),
    (FBS, DBS),
    (DBS, TBS),
    (DBS, GVBS),
    (DBS, DBS),
)


@dataclass(frozen=True)
class Point:
    """Planar location, km east / km north of the disaster center."""

    x: float
    y: float


def distance(a: Point, b: Point) -> float:
    return math.hypot(a.x - b.x, a.y - b.y)


@dataclass(frozen=True)
class Disk:
    center: Point
    radius: float


@dataclass(frozen=True)
class WeightFunction:
    """Time weighting for the coverage objective.

    Two families ship: constant 1, and exponential decay ``exp(-alpha * t)``.
    An exponential with ``alpha == 0`` evaluates identically to the constant.
    """

    kind: str  # "constant" | "exponential"
    alpha: float = 0.0

    @staticmethod
    def constant() -> "WeightFunction":
        return WeightFunction(kind="constant")

    @staticmethod
    def exponential(alpha: float) -> "WeightFunction":
        return WeightFunction(kind="exponential", alpha=alpha)


@dataclass(frozen=True)
class Scenario:
    """Immutable world description.

    ``gvbs_travel_time[g][n]`` is the time (h) for ground vehicle ``g`` to
    reach reachable location ``n``; it is input data (roads may make it
    non-Euclidean) and is never recomputed from coordinates.

    ``backhaul_thresholds`` maps ordered node-kind pairs to the maximum
    link distance (km). Lookups are symmetric; the table is expected to be
    symmetric under pair swap (``validate`` flags conflicts).
    """

    disaster_radius: float
    tbs_locations: tuple[Point, ...]
    tbs_radius: float
    gvbs_count: int
    gvbs_reachable_locations: tuple[Point, ...]
    gvbs_travel_time: tuple[tuple[float, ...], ...]  # G rows x N cols
    gvbs_radius: float
    fbs_initial: tuple[Point, ...]
    fbs_speed: float
    fbs_endurance: float
    fbs_radius: float
    dbs_initial: tuple[Point, ...]
    dbs_speed: float
    dbs_operating_time: float
    dbs_radius: float
    backhaul_thresholds: dict[tuple[str, str], float]
    horizon: float = 5.0
    weight: WeightFunction = WeightFunction.constant()

    @property
    def fbs_count(self) -> int:
        return len(self.fbs_initial)

    @property
    def dbs_count(self) -> int:
        return len(self.dbs_initial)

    def backhaul_threshold(self, kind_a: str, kind_b: str) -> float:
        """Threshold distance for a type pair, symmetric under swap."""
        table = self.backhaul_thresholds
        if (kind_a, kind_b) in table:
            return table[(kind_a, kind_b)]
        return table[(kind_b, kind_a)]

    def radius_of(self, kind: str) -> float:
        return {
            TBS: self.tbs_radius,
            GVBS: self.gvbs_radius,
            FBS: self.fbs_radius,
            DBS: self.dbs_radius,
        }[kind]


@dataclass(frozen=True)
class DeploymentPlan:
    """Decision variables for one deployment.

    ``gvbs_assignment`` maps GVBS index to reachable-location index and must
    be injective in both directions; unassigned vehicles stay home. Aerial
    target/dispatch lists are either full fleet length or empty (empty means
    the fleet is not dispatched at all).
    """

    gvbs_assignment: dict[int, int] = field(default_factory=dict)
    fbs_targets: tuple[Point, ...] = ()
    fbs_dispatch: tuple[float, ...] = ()
    dbs_targets: tuple[Point, ...] = ()
    dbs_dispatch: tuple[float, ...] = ()


EMPTY_PLAN = DeploymentPlan()


@dataclass(frozen=True)
class ServiceWindow:
    """Half-open-in-spirit service interval [arrive, depart] of one unit.

    ``arrive == depart`` marks a degenerate window: the unit never serves.
    GVBS windows always end at the horizon.
    """

    arrive: float
    depart: float
    unit_kind: str
    location: Point
    radius: float

    @property
    def empty(self) -> bool:
        return self.depart <= self.arrive

    @property
    def length(self) -> float:
        return max(0.0, self.depart - self.arrive)


def fbs_window(scenario: Scenario, plan: DeploymentPlan, u: int) -> ServiceWindow:
    """Service window of flying BS ``u``.

    The aircraft must reserve energy for the return leg, so with transit
    time ``d`` the unit serves on [dispatch + d, dispatch + endurance - d];
    if endurance <= 2d the window collapses and the unit never serves.
    """
    transit = distance(scenario.fbs_initial[u], plan.fbs_targets[u]) / scenario.fbs_speed
    t0 = plan.fbs_dispatch[u]
    arrive = t0 + transit
    depart = max(arrive, t0 + scenario.fbs_endurance - transit)
    return ServiceWindow(arrive, depart, FBS, plan.fbs_targets[u], scenario.fbs_radius)


def dbs_window(scenario: Scenario, plan: DeploymentPlan, k: int) -> ServiceWindow:
    """Service window of dropped-off BS ``k``.

    The delivery aircraft powers the flight; the battery clock starts at
    touchdown, so the unit serves for exactly its operating time.
    """
    transit = distance(scenario.dbs_initial[k], plan.dbs_targets[k]) / scenario.dbs_speed
    arrive = plan.dbs_dispatch[k] + transit
    return ServiceWindow(
        arrive, arrive + scenario.dbs_operating_time, DBS, plan.dbs_targets[k], scenario.dbs_radius
    )


def gvbs_window(scenario: Scenario, plan: DeploymentPlan, g: int) -> ServiceWindow | None:
    """Service window of ground vehicle ``g``, or None if unassigned.

    Vehicles dispatch at t=0 and serve from arrival until the horizon.
    Arrivals at or past the horizon clamp to an empty window at the horizon.
    """
    n = plan.gvbs_assignment.get(g)
    if n is None:
        return None
    arrive = min(scenario.gvbs_travel_time[g][n], scenario.horizon)
    return ServiceWindow(
        arrive,
        scenario.horizon,
        GVBS,
        scenario.gvbs_reachable_locations[n],
        scenario.gvbs_radius,
    )


def validate(scenario: Scenario) -> list[str]:
    """Check every scenario invariant; returns all violations (empty = ok)."""
    out: list[str] = []

    def positive(name: str, value: float) -> None:
        if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
            out.append(f"{name}: must be strictly positive, got {value!r}")

    positive("disaster_radius", scenario.disaster_radius)
    positive("tbs_radius", scenario.tbs_radius)
    positive("gvbs_radius", scenario.gvbs_radius)
    positive("fbs_radius", scenario.fbs_radius)
    positive("dbs_radius", scenario.dbs_radius)
    positive("fbs_speed", scenario.fbs_speed)
    positive("dbs_speed", scenario.dbs_speed)
    positive("fbs_endurance", scenario.fbs_endurance)
    positive("dbs_operating_time", scenario.dbs_operating_time)
    positive("horizon", scenario.horizon)

    if scenario.gvbs_count < 0:
        out.append(f"gvbs_count: must be non-negative, got {scenario.gvbs_count}")
    if len(scenario.gvbs_travel_time) != scenario.gvbs_count:
        out.append(
            f"gvbs_travel_time: expected {scenario.gvbs_count} rows, "
            f"got {len(scenario.gvbs_travel_time)}"
        )
    n_locations = len(scenario.gvbs_reachable_locations)
    for g, row in enumerate(scenario.gvbs_travel_time):
        if len(row) != n_locations:
            out.append(f"gvbs_travel_time[{g}]: expected {n_locations} entries, got {len(row)}")
        for n, t in enumerate(row):
            if not (math.isfinite(t) and t >= 0):
                out.append(f"gvbs_travel_time[{g}][{n}]: must be non-negative, got {t!r}")

    for pts_name in ("tbs_locations", "gvbs_reachable_locations", "fbs_initial", "dbs_initial"):
        for i, p in enumerate(getattr(scenario, pts_name)):
            if not (math.isfinite(p.x) and math.isfinite(p.y)):
                out.append(f"{pts_name}[{i}]: coordinates must be finite")

    table = scenario.backhaul_thresholds
    for (a, b), value in table.items():
        if a not in NODE_KINDS or b not in NODE_KINDS:
            out.append(f"backhaul_thresholds: unknown node kind in pair {a}-{b}")
            continue
        positive(f"backhaul_thresholds[{a}-{b}]", value)
        if (b, a) in table and a != b and table[(b, a)] != value:
            out.append(
                f"backhaul_thresholds: {a}-{b} and {b}-{a} disagree "
                f"({value!r} != {table[(b, a)]!r})"
            )
    for a, b in REQUIRED_THRESHOLD_PAIRS:
        if (a, b) not in table and (b, a) not in table:
            out.append(f"backhaul_thresholds: missing entry for {a}-{b}")

    if scenario.weight.kind not in ("constant", "exponential"):
        out.append(f"weight.kind: must be 'constant' or 'exponential', got {scenario.weight.kind!r}")
    if not (math.isfinite(scenario.weight.alpha) and scenario.weight.alpha >= 0):
        out.append(f"weight.alpha: must be >= 0, got {scenario.weight.alpha!r}")

    return out


def validate_plan(scenario: Scenario, plan: DeploymentPlan) -> list[str]:
    """Check plan consistency against a scenario; returns all violations."""
    out: list[str] = []
    r = scenario.disaster_radius

    seen_locations: dict[int, int] = {}
    for g, n in plan.gvbs_assignment.items():
        if not (0 <= g < scenario.gvbs_count):
            out.append(f"gvbs_assignment: vehicle index {g} out of range")
            continue
        if not (0 <= n < len(scenario.gvbs_reachable_locations)):
            out.append(f"gvbs_assignment[{g}]: location index {n} out of range")
            continue
        if n in seen_locations:
            out.append(
                f"gvbs_assignment: location {n} assigned to both "
                f"vehicles {seen_locations[n]} and {g}"
            )
        seen_locations[n] = g

    for name, targets, dispatch, fleet in (
        ("fbs", plan.fbs_targets, plan.fbs_dispatch, scenario.fbs_count),
        ("dbs", plan.dbs_targets, plan.dbs_dispatch, scenario.dbs_count),
    ):
        if len(targets) != len(dispatch):
            out.append(
                f"{name}_targets/{name}_dispatch: lengths differ "
                f"({len(targets)} != {len(dispatch)})"
            )
            continue
        if len(targets) not in (0, fleet):
            out.append(
                f"{name}_targets: expected {fleet} entries (or none), got {len(targets)}"
            )
            continue
        for i, (p, t) in enumerate(zip(targets, dispatch)):
            if not (-r <= p.x <= r and -r <= p.y <= r):
                out.append(f"{name}_targets[{i}]: ({p.x}, {p.y}) outside [-R, R] x [-R, R]")
            if not (0 <= t < scenario.horizon):
                out.append(f"{name}_dispatch[{i}]: {t} outside [0, horizon)")

    return out


# --- JSON codecs ----------------------------------------------------------
#
# Scenario and DeploymentPlan serialize to JSON with field names matching the
# dataclass definitions. Points are {"x": .., "y": ..}; the travel-time
# matrix is a row-major nested array; threshold keys are "KIND-KIND" strings.


def _point_to_dict(p: Point) -> dict[str, float]:
    return {"x": p.x, "y": p.y}


def _point_from(obj: Any, path: str) -> Point:
    if not isinstance(obj, dict) or "x" not in obj or "y" not in obj:
        raise ValueError(f"{path}: expected an object with 'x' and 'y'")
    return Point(float(obj["x"]), float(obj["y"]))


def _points_from(obj: Any, path: str) -> tuple[Point, ...]:
    if not isinstance(obj, list):
        raise ValueError(f"{path}: expected a list of points")
    return tuple(_point_from(p, f"{path}[{i}]") for i, p in enumerate(obj))


def weight_to_dict(w: WeightFunction) -> dict[str, Any]:
    if w.kind == "constant":
        return {"kind": "constant"}
    return {"kind": "exponential", "alpha": w.alpha}


def weight_from_dict(obj: Any, path: str = "weight") -> WeightFunction:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ValueError(f"{path}: expected an object with 'kind'")
    kind = obj["kind"]
    if kind == "constant":
        return WeightFunction.constant()
    if kind == "exponential":
        return WeightFunction.exponential(float(obj.get("alpha", 0.0)))
    raise ValueError(f"{path}.kind: unknown weight kind {kind!r}")


def scenario_to_dict(scenario: Scenario) -> dict[str, Any]:
    return {
        "disaster_radius": scenario.disaster_radius,
        "tbs_locations": [_point_to_dict(p) for p in scenario.tbs_locations],
        "tbs_radius": scenario.tbs_radius,
        "gvbs_count": scenario.gvbs_count,
        "gvbs_reachable_locations": [
            _point_to_dict(p) for p in scenario.gvbs_reachable_locations
        ],
        "gvbs_travel_time": [list(row) for row in scenario.gvbs_travel_time],
        "gvbs_radius": scenario.gvbs_radius,
        "fbs_initial": [_point_to_dict(p) for p in scenario.fbs_initial],
        "fbs_speed": scenario.fbs_speed,
        "fbs_endurance": scenario.fbs_endurance,
        "fbs_radius": scenario.fbs_radius,
        "dbs_initial": [_point_to_dict(p) for p in scenario.dbs_initial],
        "dbs_speed": scenario.dbs_speed,
        "dbs_operating_time": scenario.dbs_operating_time,
        "dbs_radius": scenario.dbs_radius,
        "backhaul_thresholds": {
            f"{a}-{b}": v for (a, b), v in scenario.backhaul_thresholds.items()
        },
        "horizon": scenario.horizon,
        "weight": weight_to_dict(scenario.weight),
    }


_SCENARIO_FIELDS = (
    "disaster_radius tbs_locations tbs_radius gvbs_count gvbs_reachable_locations "
    "gvbs_travel_time gvbs_radius fbs_initial fbs_speed fbs_endurance fbs_radius "
    "dbs_initial dbs_speed dbs_operating_time dbs_radius backhaul_thresholds "
    "horizon weight"
).split()


def scenario_from_dict(obj: Any) -> Scenario:
    if not isinstance(obj, dict):
        raise ValueError("scenario: expected a JSON object")
    missing = [f for f in _SCENARIO_FIELDS if f not in obj]
    if missing:
        raise ValueError(f"scenario: missing fields {', '.join(missing)}")

    raw_matrix = obj["gvbs_travel_time"]
    if not isinstance(raw_matrix, list) or not all(isinstance(r, list) for r in raw_matrix):
        raise ValueError("scenario.gvbs_travel_time: expected nested arrays")
    matrix = tuple(tuple(float(t) for t in row) for row in raw_matrix)

    raw_table = obj["backhaul_thresholds"]
    if not isinstance(raw_table, dict):
        raise ValueError("scenario.backhaul_thresholds: expected an object")
    table: dict[tuple[str, str], float] = {}
    for key, value in raw_table.items():
        parts = key.split("-")
        if len(parts) != 2:
            raise ValueError(f"scenario.backhaul_thresholds: bad key {key!r}, expected 'KIND-KIND'")
        table[(parts[0], parts[1])] = float(value)

    return Scenario(
        disaster_radius=float(obj["disaster_radius"]),
        tbs_locations=_points_from(obj["tbs_locations"], "scenario.tbs_locations"),
        tbs_radius=float(obj["tbs_radius"]),
        gvbs_count=int(obj["gvbs_count"]),
        gvbs_reachable_locations=_points_from(
            obj["gvbs_reachable_locations"], "scenario.gvbs_reachable_locations"
        ),
        gvbs_travel_time=matrix,
        gvbs_radius=float(obj["gvbs_radius"]),
        fbs_initial=_points_from(obj["fbs_initial"], "scenario.fbs_initial"),
        fbs_speed=float(obj["fbs_speed"]),
        fbs_endurance=float(obj["fbs_endurance"]),
        fbs_radius=float(obj["fbs_radius"]),
        dbs_initial=_points_from(obj["dbs_initial"], "scenario.dbs_initial"),
        dbs_speed=float(obj["dbs_speed"]),
        dbs_operating_time=float(obj["dbs_operating_time"]),
        dbs_radius=float(obj["dbs_radius"]),
        backhaul_thresholds=table,
        horizon=float(obj["horizon"]),
        weight=weight_from_dict(obj["weight"], "scenario.weight"),
    )


def plan_to_dict(plan: DeploymentPlan) -> dict[str, Any]:
    return {
        "gvbs_assignment": {str(g): n for g, n in sorted(plan.gvbs_assignment.items())},
        "fbs_targets": [_point_to_dict(p) for p in plan.fbs_targets],
        "fbs_dispatch": list(plan.fbs_dispatch),
        "dbs_targets": [_point_to_dict(p) for p in plan.dbs_targets],
        "dbs_dispatch": list(plan.dbs_dispatch),
    }


def plan_from_dict(obj: Any) -> DeploymentPlan:
    if not isinstance(obj, dict):
        raise ValueError("plan: expected a JSON object")
    missing = [
        f
        for f in ("gvbs_assignment", "fbs_targets", "fbs_dispatch", "dbs_targets", "dbs_dispatch")
        if f not in obj
    ]
    if missing:
        raise ValueError(f"plan: missing fields {', '.join(missing)}")
    raw_assignment = obj["gvbs_assignment"]
    if not isinstance(raw_assignment, dict):
        raise ValueError("plan.gvbs_assignment: expected an object")
    try:
        assignment = {int(g): int(n) for g, n in raw_assignment.items()}
    except (TypeError, ValueError) as exc:
        raise ValueError(f"plan.gvbs_assignment: non-integer key or value ({exc})") from None
    return DeploymentPlan(
        gvbs_assignment=assignment,
        fbs_targets=_points_from(obj["fbs_targets"], "plan.fbs_targets"),
        fbs_dispatch=tuple(float(t) for t in obj["fbs_dispatch"]),
        dbs_targets=_points_from(obj["dbs_targets"], "plan.dbs_targets"),
        dbs_dispatch=tuple(float(t) for t in obj["dbs_dispatch"]),
    )


def load_scenario(path: str | Path) -> Scenario:
    with open(path, encoding="utf-8") as fh:
        return scenario_from_dict(json.load(fh))


def save_scenario(scenario: Scenario, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(scenario_to_dict(scenario), fh, indent=2)
        fh.write("\n")


def load_plan(path: str | Path) -> DeploymentPlan:
    with open(path, encoding="utf-8") as fh:
        return plan_from_dict(json.load(fh))


def save_plan(plan: DeploymentPlan, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(plan_to_dict(plan), fh, indent=2)
        fh.write("\n")


def merge_aerial(
    base: DeploymentPlan,
    fbs_targets: tuple[Point, ...],
    fbs_dispatch: tuple[float, ...],
    dbs_targets: tuple[Point, ...],
    dbs_dispatch: tuple[float, ...],
) -> DeploymentPlan:
    """Combine a ground-only plan with aerial fields from a second stage."""
    return replace(
        base,
        fbs_targets=fbs_targets,
        fbs_dispatch=fbs_dispatch,
        dbs_targets=dbs_targets,
        dbs_dispatch=dbs_dispatch,
    )
