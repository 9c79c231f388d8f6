"""Event-driven network simulator producing the piecewise-constant coverage trace.

The timeline holds every unit arrival/departure inside the horizon. Between
events the set of serving units is constant, so coverage is evaluated once
per segment. After each batch of simultaneous events the active sets are
re-established as the anchored connected components of the backhaul graph:
an arrived FBS/DBS serves exactly when a path of threshold-feasible hops
through arrived units reaches a TBS or an arrived GVBS.
"""

from __future__ import annotations

import csv
import json
from bisect import bisect_right
from collections import deque
from dataclasses import dataclass
from itertools import groupby
from pathlib import Path
from typing import Any, Iterable

import numpy as np

from .geometry import CoverageGrid
from .model import (
    DBS,
    FBS,
    GVBS,
    TBS,
    DeploymentPlan,
    Disk,
    Point,
    Scenario,
    ServiceWindow,
    dbs_window,
    distance,
    fbs_window,
    gvbs_window,
    validate_plan,
)

# A network node is (kind, index); GVBS indices refer to vehicles, not
# reachable locations.
Node = tuple[str, int]

GVBS_ARRIVAL = "gvbs_arrival"
FBS_ARRIVAL = "fbs_arrival"
FBS_RETURN = "fbs_return"
DBS_ARRIVAL = "dbs_arrival"
DBS_DEATH = "dbs_death"

_REMOVALS = (FBS_RETURN, DBS_DEATH)
_KIND_RANK = {GVBS: 0, FBS: 1, DBS: 2}
_EVENT_UNIT_KIND = {
    GVBS_ARRIVAL: GVBS,
    FBS_ARRIVAL: FBS,
    FBS_RETURN: FBS,
    DBS_ARRIVAL: DBS,
    DBS_DEATH: DBS,
}


@dataclass(frozen=True)
class Event:
    """A timestamped network-state change for one unit."""

    time: float
    kind: str
    unit: int

    def sort_key(self) -> tuple[float, int, int, int]:
        # Ties: removals before additions, then unit kind, then index.
        return (
            self.time,
            0 if self.kind in _REMOVALS else 1,
            _KIND_RANK[_EVENT_UNIT_KIND[self.kind]],
            self.unit,
        )


@dataclass(frozen=True)
class NetworkState:
    """Live unit sets at a simulation instant.

    Arrived FBS/DBS are partitioned into active (backhaul path to an anchor
    exists) and inactive. Arrived GVBS are always active anchors.
    """

    arrived_gvbs: frozenset[int] = frozenset()
    active_fbs: frozenset[int] = frozenset()
    inactive_fbs: frozenset[int] = frozenset()
    active_dbs: frozenset[int] = frozenset()
    inactive_dbs: frozenset[int] = frozenset()

    @property
    def arrived_fbs(self) -> frozenset[int]:
        return self.active_fbs | self.inactive_fbs

    @property
    def arrived_dbs(self) -> frozenset[int]:
        return self.active_dbs | self.inactive_dbs


@dataclass(frozen=True)
class BackhaulGraph:
    """Static geometry of potential backhaul links for one (scenario, plan).

    Nodes are all TBSs, all assigned GVBSs (at their assigned locations) and
    all FBSs/DBSs at their designated targets. Edges join pairs within the
    type-pair threshold; anchor-anchor pairs carry no edges since anchors
    reach the core network on their own.
    """

    nodes: tuple[Node, ...]
    neighbors: dict[Node, tuple[Node, ...]]

    def anchor_nodes(self, state: NetworkState) -> list[Node]:
        return [
            node
            for node in self.nodes
            if node[0] == TBS or (node[0] == GVBS and node[1] in state.arrived_gvbs)
        ]


@dataclass(frozen=True)
class TraceSegment:
    t_start: float
    t_end: float
    fraction: float


@dataclass(frozen=True)
class CoverageTrace:
    """Piecewise-constant covered fraction over [0, horizon]."""

    segments: tuple[TraceSegment, ...]

    @property
    def t_end(self) -> float:
        return self.segments[-1].t_end

    def violations(self) -> list[str]:
        out: list[str] = []
        if not self.segments:
            return ["trace has no segments"]
        if self.segments[0].t_start != 0.0:
            out.append(f"first segment starts at {self.segments[0].t_start}, expected 0")
        for i, seg in enumerate(self.segments):
            if not seg.t_start < seg.t_end:
                out.append(f"segment {i}: empty or inverted [{seg.t_start}, {seg.t_end}]")
            if not 0.0 <= seg.fraction <= 1.0:
                out.append(f"segment {i}: fraction {seg.fraction} outside [0, 1]")
            if i > 0 and seg.t_start != self.segments[i - 1].t_end:
                out.append(
                    f"segment {i}: starts at {seg.t_start}, "
                    f"previous ends at {self.segments[i - 1].t_end}"
                )
        return out

    def value_at(self, t: float) -> float:
        """Fraction at time t; the closing instant belongs to the last segment."""
        if not 0.0 <= t <= self.t_end:
            raise ValueError(f"t={t} outside trace span [0, {self.t_end}]")
        starts = [seg.t_start for seg in self.segments]
        idx = min(bisect_right(starts, t) - 1, len(self.segments) - 1)
        return self.segments[max(idx, 0)].fraction


@dataclass(frozen=True)
class EventRecord:
    """One processed event plus the network state once its batch settled."""

    time: float
    kind: str
    unit: int
    state: NetworkState


@dataclass(frozen=True)
class SimulationRun:
    """Full simulation output: trace plus per-event diagnostics."""

    trace: CoverageTrace
    events: tuple[EventRecord, ...]
    first_activation: dict[Node, float]
    windows: dict[Node, ServiceWindow]


def build_timeline(scenario: Scenario, plan: DeploymentPlan) -> list[Event]:
    """All unit arrivals/departures strictly inside the horizon, sorted.

    Units whose service window is empty never serve and emit no events.
    Departures at or past the horizon are dropped (the unit serves to the
    end); ties order removals before additions, then GVBS/FBS/DBS, then
    unit index.
    """
    horizon = scenario.horizon
    events: list[Event] = []
    for g in sorted(plan.gvbs_assignment):
        window = gvbs_window(scenario, plan, g)
        if window is None or window.empty:
            continue
        if window.arrive < horizon:
            events.append(Event(window.arrive, GVBS_ARRIVAL, g))
    for u in range(len(plan.fbs_targets)):
        window = fbs_window(scenario, plan, u)
        if window.empty or window.arrive >= horizon:
            continue
        events.append(Event(window.arrive, FBS_ARRIVAL, u))
        if window.depart < horizon:
            events.append(Event(window.depart, FBS_RETURN, u))
    for k in range(len(plan.dbs_targets)):
        window = dbs_window(scenario, plan, k)
        if window.empty or window.arrive >= horizon:
            continue
        events.append(Event(window.arrive, DBS_ARRIVAL, k))
        if window.depart < horizon:
            events.append(Event(window.depart, DBS_DEATH, k))
    events.sort(key=Event.sort_key)
    return events


def build_backhaul_graph(scenario: Scenario, plan: DeploymentPlan) -> BackhaulGraph:
    """Distance-thresholded link graph over every potential node."""
    positions: list[tuple[Node, Point]] = []
    for m, p in enumerate(scenario.tbs_locations):
        positions.append(((TBS, m), p))
    for g, n in sorted(plan.gvbs_assignment.items()):
        positions.append(((GVBS, g), scenario.gvbs_reachable_locations[n]))
    for u, p in enumerate(plan.fbs_targets):
        positions.append(((FBS, u), p))
    for k, p in enumerate(plan.dbs_targets):
        positions.append(((DBS, k), p))

    neighbors: dict[Node, list[Node]] = {node: [] for node, _ in positions}
    for i, (node_a, pos_a) in enumerate(positions):
        for node_b, pos_b in positions[i + 1 :]:
            kind_a, kind_b = node_a[0], node_b[0]
            if kind_a in (TBS, GVBS) and kind_b in (TBS, GVBS):
                continue  # anchors need no backhaul between themselves
            if distance(pos_a, pos_b) <= scenario.backhaul_threshold(kind_a, kind_b):
                neighbors[node_a].append(node_b)
                neighbors[node_b].append(node_a)
    return BackhaulGraph(
        nodes=tuple(node for node, _ in positions),
        neighbors={node: tuple(adj) for node, adj in neighbors.items()},
    )


def connectivity_fixed_point(state: NetworkState, graph: BackhaulGraph) -> NetworkState:
    """Re-partition arrived FBS/DBS into active/inactive sets.

    Active units are exactly those reachable from some anchor through edges
    whose endpoints are all present (anchors or arrived units): the anchored
    connected components. Equivalent to iterating the activate/deactivate
    sweeps to their fixed point, in a single traversal.
    """
    present: set[Node] = set()
    for node in graph.nodes:
        kind, idx = node
        if (
            kind == TBS
            or (kind == GVBS and idx in state.arrived_gvbs)
            or (kind == FBS and idx in state.arrived_fbs)
            or (kind == DBS and idx in state.arrived_dbs)
        ):
            present.add(node)

    reached: set[Node] = set()
    queue = deque(node for node in graph.anchor_nodes(state))
    reached.update(queue)
    while queue:
        node = queue.popleft()
        for neighbor in graph.neighbors[node]:
            if neighbor in present and neighbor not in reached:
                reached.add(neighbor)
                queue.append(neighbor)

    active_fbs = frozenset(idx for kind, idx in reached if kind == FBS)
    active_dbs = frozenset(idx for kind, idx in reached if kind == DBS)
    return NetworkState(
        arrived_gvbs=state.arrived_gvbs,
        active_fbs=active_fbs,
        inactive_fbs=state.arrived_fbs - active_fbs,
        active_dbs=active_dbs,
        inactive_dbs=state.arrived_dbs - active_dbs,
    )


def _unit_window(scenario: Scenario, plan: DeploymentPlan, node: Node) -> ServiceWindow:
    kind, idx = node
    if kind == GVBS:
        window = gvbs_window(scenario, plan, idx)
        assert window is not None
        return window
    if kind == FBS:
        return fbs_window(scenario, plan, idx)
    return dbs_window(scenario, plan, idx)


def run_simulation(scenario: Scenario, plan: DeploymentPlan, grid: CoverageGrid) -> SimulationRun:
    """Simulate one deployment plan and return trace plus diagnostics.

    Pure function of (scenario, plan, grid); raises ValueError when the plan
    is inconsistent with the scenario (wrong list lengths, out-of-range
    indices or bounds).

    Coverage bookkeeping is incremental: each serving unit adds 1 to a
    per-cell counter over its disk, so every segment's fraction equals
    ``coverage_fraction`` over the disks of all TBSs, arrived GVBSs and
    active FBSs/DBSs at that time.
    """
    problems = validate_plan(scenario, plan)
    if problems:
        raise ValueError("invalid plan: " + "; ".join(problems))

    timeline = build_timeline(scenario, plan)
    graph = build_backhaul_graph(scenario, plan)

    cover_count = np.zeros(grid.cell_count, dtype=np.int32)
    for p in scenario.tbs_locations:
        cover_count[grid.covered_indices(Disk(p, scenario.tbs_radius))] += 1

    # Disk cells per unit that can ever arrive, computed once per run.
    windows: dict[Node, ServiceWindow] = {}
    unit_cells: dict[Node, np.ndarray] = {}
    for event in timeline:
        node = (_EVENT_UNIT_KIND[event.kind], event.unit)
        if node not in windows:
            window = _unit_window(scenario, plan, node)
            windows[node] = window
            unit_cells[node] = grid.covered_indices(Disk(window.location, window.radius))

    def fraction() -> float:
        return float(np.count_nonzero(cover_count)) / grid.cell_count

    state = NetworkState()
    counted: set[Node] = set()
    segments: list[TraceSegment] = []
    records: list[EventRecord] = []
    first_activation: dict[Node, float] = {}
    t_prev = 0.0

    for t_event, batch_iter in groupby(timeline, key=lambda e: e.time):
        batch = list(batch_iter)
        if t_event > t_prev:
            segments.append(TraceSegment(t_prev, t_event, fraction()))

        arrived_gvbs = set(state.arrived_gvbs)
        arrived_fbs = set(state.arrived_fbs)
        arrived_dbs = set(state.arrived_dbs)
        for event in batch:  # removals sort first within a batch
            if event.kind == FBS_RETURN:
                arrived_fbs.discard(event.unit)
            elif event.kind == DBS_DEATH:
                arrived_dbs.discard(event.unit)
            elif event.kind == GVBS_ARRIVAL:
                arrived_gvbs.add(event.unit)
            elif event.kind == FBS_ARRIVAL:
                arrived_fbs.add(event.unit)
            elif event.kind == DBS_ARRIVAL:
                arrived_dbs.add(event.unit)

        state = connectivity_fixed_point(
            NetworkState(
                arrived_gvbs=frozenset(arrived_gvbs),
                inactive_fbs=frozenset(arrived_fbs),
                inactive_dbs=frozenset(arrived_dbs),
            ),
            graph,
        )

        serving: set[Node] = {(GVBS, g) for g in state.arrived_gvbs}
        serving |= {(FBS, u) for u in state.active_fbs}
        serving |= {(DBS, k) for k in state.active_dbs}
        for node in serving - counted:
            cover_count[unit_cells[node]] += 1
            if node[0] != GVBS and node not in first_activation:
                first_activation[node] = t_event
        for node in counted - serving:
            cover_count[unit_cells[node]] -= 1
        counted = serving

        records.extend(EventRecord(event.time, event.kind, event.unit, state) for event in batch)
        t_prev = t_event

    segments.append(TraceSegment(t_prev, scenario.horizon, fraction()))
    return SimulationRun(
        trace=CoverageTrace(segments=tuple(segments)),
        events=tuple(records),
        first_activation=first_activation,
        windows=windows,
    )


def simulate(scenario: Scenario, plan: DeploymentPlan, grid: CoverageGrid) -> CoverageTrace:
    """Coverage trace of one deployment plan (see run_simulation)."""
    return run_simulation(scenario, plan, grid).trace


# --- serialization ---------------------------------------------------------


def write_trace_csv(trace: CoverageTrace, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t_start", "t_end", "fraction"])
        for seg in trace.segments:
            writer.writerow([repr(seg.t_start), repr(seg.t_end), repr(seg.fraction)])


def trace_to_dict(trace: CoverageTrace) -> dict[str, Any]:
    return {
        "segments": [
            {"t_start": seg.t_start, "t_end": seg.t_end, "fraction": seg.fraction}
            for seg in trace.segments
        ]
    }


def trace_from_dict(obj: Any) -> CoverageTrace:
    segments = tuple(
        TraceSegment(float(s["t_start"]), float(s["t_end"]), float(s["fraction"]))
        for s in obj["segments"]
    )
    return CoverageTrace(segments=segments)


def write_trace_json(trace: CoverageTrace, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(trace_to_dict(trace), fh, indent=2)
        fh.write("\n")


def write_events_csv(events: Iterable[EventRecord], path: str | Path) -> None:
    """Debug log: one row per event with the resulting active-set sizes."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["time", "kind", "unit", "arrived_gvbs", "active_fbs", "active_dbs"])
        for rec in events:
            writer.writerow(
                [
                    repr(rec.time),
                    rec.kind,
                    rec.unit,
                    len(rec.state.arrived_gvbs),
                    len(rec.state.active_fbs),
                    len(rec.state.active_dbs),
                ]
            )
