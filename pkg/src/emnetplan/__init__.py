"""Deployment planning for post-disaster emergency networks.

Simulates the dynamic coverage of a mixed fleet of surviving towers (TBS),
vehicle-mounted stations (GVBS), flying stations (FBS) and dropped-off
stations (DBS), scores deployments by time-weighted coverage, and optimizes
plans in two stages: exhaustive ground-vehicle assignment, then a genetic
algorithm over aerial targets and dispatch times.
"""

from .geometry import CoverageGrid, build_grid, coverage_fraction, union_area
from .metric import WeightedScore, segment_weight_integral, time_weighted_coverage
from .model import (
    DeploymentPlan,
    Disk,
    Point,
    Scenario,
    ServiceWindow,
    WeightFunction,
    dbs_window,
    fbs_window,
    gvbs_window,
    load_plan,
    load_scenario,
    save_plan,
    save_scenario,
    validate,
    validate_plan,
)
from .opt_ga import GaConfig, GaResult, decode, encode, fitness, optimize_aerial
from .opt_gvbs import GvbsResult, GvbsSearchConfig, feasible_pairs, optimize_gvbs
from .scenario_gen import default_scenario, generate_scenario, large_scenario
from .simulator import (
    BackhaulGraph,
    CoverageTrace,
    Event,
    NetworkState,
    TraceSegment,
    build_backhaul_graph,
    build_timeline,
    connectivity_fixed_point,
    run_simulation,
    simulate,
)

__all__ = [
    "BackhaulGraph",
    "CoverageGrid",
    "CoverageTrace",
    "DeploymentPlan",
    "Disk",
    "Event",
    "GaConfig",
    "GaResult",
    "GvbsResult",
    "GvbsSearchConfig",
    "NetworkState",
    "Point",
    "Scenario",
    "ServiceWindow",
    "TraceSegment",
    "WeightFunction",
    "WeightedScore",
    "build_backhaul_graph",
    "build_grid",
    "build_timeline",
    "connectivity_fixed_point",
    "coverage_fraction",
    "dbs_window",
    "decode",
    "default_scenario",
    "encode",
    "fbs_window",
    "feasible_pairs",
    "fitness",
    "generate_scenario",
    "gvbs_window",
    "large_scenario",
    "load_plan",
    "load_scenario",
    "optimize_aerial",
    "optimize_gvbs",
    "run_simulation",
    "save_plan",
    "save_scenario",
    "segment_weight_integral",
    "simulate",
    "time_weighted_coverage",
    "union_area",
    "validate",
    "validate_plan",
]

__version__ = "0.1.0"
