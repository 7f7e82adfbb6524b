"""Intrinsic dimension estimation from the local homology of nested Rips pairs."""

from .complexes import (DEFAULT_BUDGET, BudgetExceeded, LocalPairComplex, RipsComplex, build_local_blocks,
                        build_local_pair, build_rips, pair_from_simplices)
from .geometry import (PointCloud, ball_query, build_neighborhood_graph, component_centers,
                       farthest_point_subsample, inner_vertex_set, outer_vertex_set)
from .homology import assemble_boundary, cone_oracle_rank, image_rank, reduce, relative_betti
from .pipeline import (BasePointResult, Classification, DimensionReport, Kind, ParamSchedule, ScheduleError,
                       Strategy, classify, estimate_dimension, estimate_local, manual_schedule,
                       parameter_schedule, relaxed_schedule, repeated_center_estimate)
from .pointio import read_points, write_points

__all__ = [
    "DEFAULT_BUDGET", "BudgetExceeded", "LocalPairComplex", "RipsComplex", "build_local_blocks",
    "build_local_pair", "build_rips", "pair_from_simplices",
    "PointCloud", "ball_query", "build_neighborhood_graph", "component_centers",
    "farthest_point_subsample", "inner_vertex_set", "outer_vertex_set",
    "assemble_boundary", "cone_oracle_rank", "image_rank", "reduce", "relative_betti",
    "BasePointResult", "Classification", "DimensionReport", "Kind", "ParamSchedule", "ScheduleError",
    "Strategy", "classify", "estimate_dimension", "estimate_local", "manual_schedule",
    "parameter_schedule", "relaxed_schedule", "repeated_center_estimate",
    "read_points", "write_points",
]
