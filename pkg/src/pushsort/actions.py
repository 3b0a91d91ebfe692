"""The per-object action set: one pick&place and one forearm push per object."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from typing import NamedTuple, Union

import numpy as np

from .geometry import Point2, capsule_disc_penetration, disc_disc_penetration, unit
from .push_physics import PushOutcome, PushSpec, SimParams, predict_push
from .world import SceneObject, WorldState, validate


class Reason(str, enum.Enum):
    DEGENERATE_DIRECTION = "DegenerateDirection"
    NO_COLLISION_FREE_START = "NoCollisionFreeStart"
    OUT_OF_REACH = "OutOfReach"
    REGION_FULL = "RegionFull"
    OFF_TABLE = "OffTable"
    RESIDUAL_OVERLAP = "ResidualOverlap"


class Infeasible(Exception):
    def __init__(self, reason: Reason, detail: str = ""):
        super().__init__(f"{reason.value}: {detail}" if detail else reason.value)
        self.reason = reason


class InvalidTarget(ValueError):
    pass


@dataclass(frozen=True)
class TimeParams:
    v_move: float = 0.5
    v_push: float = 0.1
    t_grasp: float = 2.0
    t_release: float = 2.0
    t_approach: float = 2.0
    t_retract: float = 2.0

    def __post_init__(self) -> None:
        for name, v in vars(self).items():
            if not v > 0:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True)
class ActionParams:
    clearance: float = 0.01
    backoff_step: float = 0.01
    backoff_max: float = 0.50
    place_attempts: int = 1000
    # Pusher axis angle relative to the push direction; pi/2 sweeps broadside.
    axis_offset: float = math.pi / 2

    def __post_init__(self) -> None:
        for name in ("clearance", "backoff_step", "backoff_max", "place_attempts"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True)
class PickPlace:
    object_id: int
    target: Point2
    est_time: float = 0.0


@dataclass(frozen=True)
class Push:
    object_id: int
    spec: PushSpec
    est_time: float = 0.0


Action = Union[PickPlace, Push]


class Candidate(NamedTuple):
    action: Action
    predicted: WorldState
    ordinal: int
    displaced_ids: frozenset = frozenset()


class Rejection(NamedTuple):
    object_id: int
    action: str  # "pick_place" or "push"
    reason: Reason


def _pose_free(spec: PushSpec, ref, w: WorldState) -> bool:
    cap = spec.capsule_at(ref)
    return all(capsule_disc_penetration(cap, o.footprint) is None for o in w.objects)


def find_push_start(desired, direction, template: PushSpec, w: WorldState, ap: ActionParams) -> Point2:
    """Back the pusher off along -direction until it clears every object."""
    kmax = math.floor(ap.backoff_max / ap.backoff_step + 1e-9)
    for k in range(kmax + 1):
        d = k * ap.backoff_step
        ref = Point2(desired[0] - d * direction[0], desired[1] - d * direction[1])
        if _pose_free(template, ref, w):
            if not w.robot.reachable(ref):
                raise Infeasible(Reason.OUT_OF_REACH, f"push start {ref} outside reach")
            return ref
    raise Infeasible(Reason.NO_COLLISION_FREE_START, f"no free start within {ap.backoff_max} m")


def make_push_spec(obj: SceneObject, w: WorldState, ap: ActionParams, eps: float = SimParams.penetration_eps) -> PushSpec:
    goal = w.goal_for(obj.kind)
    to_goal = goal.center - obj.center
    if to_goal.norm() < eps:
        raise Infeasible(Reason.DEGENERATE_DIRECTION, f"object {obj.id} already at goal center")
    u = unit(to_goal)
    pr = w.robot.pusher_radius
    back = obj.radius + ap.clearance + pr
    desired = obj.center - u.scale(back)
    end = goal.center - u.scale(obj.radius + pr)
    if not w.robot.reachable(end):
        raise Infeasible(Reason.OUT_OF_REACH, f"push end {end} outside reach")
    template = PushSpec(
        start=desired,
        end=end,
        pusher_length=w.robot.pusher_length,
        pusher_radius=pr,
        axis_angle=math.atan2(u.y, u.x) + ap.axis_offset,
    )
    start = find_push_start(desired, u, template, w, ap)
    return template.moved_to(start)


def sample_place_pose(obj: SceneObject, w: WorldState, rng: np.random.Generator, ap: ActionParams) -> Point2:
    goal = w.goal_for(obj.kind)
    room = goal.radius - obj.radius
    others = [o for o in w.objects if o.id != obj.id]
    for _ in range(ap.place_attempts):
        u, v = rng.random(2)
        rad = room * math.sqrt(u)
        theta = 2.0 * math.pi * v
        p = Point2(goal.center.x + rad * math.cos(theta), goal.center.y + rad * math.sin(theta))
        if p.dist(goal.center) > room or not w.robot.reachable(p):
            continue
        moved = obj.moved_to(p)
        if all(disc_disc_penetration(moved.footprint, o.footprint) is None for o in others):
            return p
    raise Infeasible(Reason.REGION_FULL, f"no free spot for object {obj.id} after {ap.place_attempts} tries")


def apply_pick_place(w: WorldState, object_id: int, target) -> WorldState:
    out = w.with_positions({object_id: Point2(target[0], target[1])})
    problems = validate(out)
    if problems:
        raise InvalidTarget("; ".join(v.message for v in problems))
    return out


def estimate_time(a: Action, w: WorldState, tp: TimeParams) -> float:
    home = w.robot.home
    if isinstance(a, PickPlace):
        obj = w.object(a.object_id).center
        return (
            home.dist(obj) / tp.v_move
            + tp.t_grasp
            + obj.dist(a.target) / tp.v_move
            + tp.t_release
            + Point2(*a.target).dist(home) / tp.v_move
        )
    s = a.spec
    return (
        home.dist(s.start) / tp.v_move
        + tp.t_approach
        + s.start.dist(s.end) / tp.v_push
        + tp.t_retract
        + s.end.dist(home) / tp.v_move
    )


def object_rng(key: int, object_id: int) -> np.random.Generator:
    """Per-object placement stream, independent of enumeration order."""
    return np.random.default_rng([key, object_id])


def enumerate_actions(
    w: WorldState,
    rng: np.random.Generator,
    ap: ActionParams = ActionParams(),
    tp: TimeParams = TimeParams(),
    sp: SimParams = SimParams(),
    *,
    pushes: bool = True,
) -> tuple[list[Candidate], list[Rejection]]:
    """Build every feasible candidate with its predicted successor world.

    Candidates come in object-id order, pick&place before push. Infeasible
    candidates are dropped and reported in the second list.
    """
    key = int(rng.integers(2**63))
    cands: list[Candidate] = []
    rejected: list[Rejection] = []
    for rank, obj in enumerate(sorted(w.objects, key=lambda o: o.id)):
        ordinal = 2 * rank
        try:
            target = sample_place_pose(obj, w, object_rng(key, obj.id), ap)
        except Infeasible as e:
            rejected.append(Rejection(obj.id, "pick_place", e.reason))
        else:
            a = PickPlace(obj.id, target)
            a = replace(a, est_time=estimate_time(a, w, tp))
            cands.append(Candidate(a, apply_pick_place(w, obj.id, target), ordinal, frozenset({obj.id})))
        if not pushes:
            continue
        try:
            spec = make_push_spec(obj, w, ap, sp.penetration_eps)
            outcome = _rollout(w, spec, sp)
        except Infeasible as e:
            rejected.append(Rejection(obj.id, "push", e.reason))
            continue
        a = Push(obj.id, spec)
        a = replace(a, est_time=estimate_time(a, w, tp))
        cands.append(Candidate(a, outcome.final, ordinal + 1, outcome.displaced_ids))
    return cands, rejected


def _rollout(w: WorldState, spec: PushSpec, sp: SimParams) -> PushOutcome:
    outcome = predict_push(w, spec, sp, abort_on_off_table=True)
    if outcome.any_off_table:
        raise Infeasible(Reason.OFF_TABLE, "push drives an object off the table")
    if validate(outcome.final):
        raise Infeasible(Reason.RESIDUAL_OVERLAP, "push leaves unresolved overlap")
    return outcome

