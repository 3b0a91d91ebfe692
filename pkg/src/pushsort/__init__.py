"""Planar tabletop sorting with forearm pushes and pick&place."""

from .geometry import Capsule2, Disc2, Point2, Segment2
from .planner import EpisodeTrace, Method, Params, Termination, greedy_step, run_baseline, run_sorter
from .push_physics import PushOutcome, PushSpec, SimParams, predict_push, swept_band
from .world import GoalRegion, ObjectKind, RobotModel, SceneObject, Table, WorldState, heuristic, validate

__all__ = [
    "Capsule2",
    "Disc2",
    "EpisodeTrace",
    "GoalRegion",
    "Method",
    "ObjectKind",
    "Params",
    "Point2",
    "PushOutcome",
    "PushSpec",
    "RobotModel",
    "SceneObject",
    "Segment2",
    "SimParams",
    "Table",
    "Termination",
    "WorldState",
    "greedy_step",
    "heuristic",
    "predict_push",
    "run_baseline",
    "run_sorter",
    "swept_band",
    "validate",
]
