"""Task state for the two-kind sorting problem, plus scenario (de)serialization."""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, NamedTuple

from .geometry import Disc2, Point2, disc_disc_penetration

# Contacts shallower than this are treated as touching, not overlapping. Matches
# the default push-engine penetration tolerance.
CONTACT_TOL = 1e-5


class ObjectKind(str, enum.Enum):
    RED = "red"
    BLUE = "blue"


class ScenarioError(ValueError):
    """Malformed scenario document."""


@dataclass(frozen=True)
class SceneObject:
    id: int
    kind: ObjectKind
    footprint: Disc2

    @property
    def center(self) -> Point2:
        return self.footprint.center

    @property
    def radius(self) -> float:
        return self.footprint.radius

    def moved_to(self, center) -> SceneObject:
        return replace(self, footprint=Disc2(Point2(center[0], center[1]), self.radius))


@dataclass(frozen=True)
class GoalRegion:
    kind: ObjectKind
    center: Point2
    radius: float


@dataclass(frozen=True)
class RobotModel:
    base: Point2 = Point2(0.0, 0.0)
    home: Point2 = Point2(0.3, 0.0)
    reach_min: float = 0.10
    reach_max: float = 1.20
    # Axis length of the pusher capsule; the footprint spans length + 2 * radius.
    pusher_length: float = 0.30
    pusher_radius: float = 0.04

    def reachable(self, p) -> bool:
        d = self.base.dist(p)
        return self.reach_min <= d <= self.reach_max


@dataclass(frozen=True)
class Table:
    min: Point2
    max: Point2

    def contains_disc(self, center, radius: float, tol: float = 0.0) -> bool:
        return (
            center[0] - radius >= self.min.x - tol
            and center[0] + radius <= self.max.x + tol
            and center[1] - radius >= self.min.y - tol
            and center[1] + radius <= self.max.y + tol
        )


class Violation(NamedTuple):
    constraint: str
    ids: tuple
    message: str


@dataclass(frozen=True)
class WorldState:
    table: Table
    robot: RobotModel
    objects: tuple[SceneObject, ...]
    goals: tuple[GoalRegion, ...]

    @property
    def n(self) -> int:
        return len(self.objects)

    def goal_for(self, kind: ObjectKind) -> GoalRegion:
        for g in self.goals:
            if g.kind == kind:
                return g
        raise KeyError(f"no goal region for {kind.value}")

    def object(self, object_id: int) -> SceneObject:
        for o in self.objects:
            if o.id == object_id:
                return o
        raise KeyError(f"no object with id {object_id}")

    def with_positions(self, centers: dict[int, Point2]) -> WorldState:
        """Copy with the given object centers replaced; other objects keep identity."""
        objs = tuple(o.moved_to(centers[o.id]) if o.id in centers else o for o in self.objects)
        return replace(self, objects=objs)


def validate(w: WorldState, tol: float = CONTACT_TOL) -> list[Violation]:
    out: list[Violation] = []
    seen: set[int] = set()
    for o in w.objects:
        if o.id in seen:
            out.append(Violation("duplicate_id", (o.id,), f"object id {o.id} used twice"))
        seen.add(o.id)
        if not o.center.is_finite():
            out.append(Violation("non_finite", (o.id,), f"object {o.id} has non-finite center"))
        elif not w.table.contains_disc(o.center, o.radius, tol):
            out.append(Violation("off_table", (o.id,), f"object {o.id} is not fully on the table"))
    objs = w.objects
    for i in range(len(objs)):
        for j in range(i + 1, len(objs)):
            pen = disc_disc_penetration(objs[i].footprint, objs[j].footprint)
            if pen is not None and pen.depth > tol:
                out.append(
                    Violation(
                        "overlap",
                        (objs[i].id, objs[j].id),
                        f"objects {objs[i].id} and {objs[j].id} overlap by {pen.depth:.6g} m",
                    )
                )
    kinds = [g.kind for g in w.goals]
    for kind in ObjectKind:
        if kinds.count(kind) != 1:
            out.append(Violation("goal_count", (), f"expected one {kind.value} goal, got {kinds.count(kind)}"))
    rmax = max((o.radius for o in objs), default=0.0)
    for g in w.goals:
        if g.radius <= rmax:
            out.append(Violation("goal_too_small", (), f"{g.kind.value} goal radius {g.radius} <= object radius"))
        if not w.table.contains_disc(g.center, g.radius, tol):
            out.append(Violation("goal_off_table", (), f"{g.kind.value} goal is not fully on the table"))
    r = w.robot
    if not r.reach_min < r.reach_max:
        out.append(Violation("reach", (), "reach_min must be below reach_max"))
    elif not r.reachable(r.home):
        out.append(Violation("home_unreachable", (), "home lies outside the reach annulus"))
    return out


def object_distance(obj: SceneObject, w: WorldState) -> float:
    """Distance from obj's center to the boundary of the set of sorted centers."""
    g = w.goal_for(obj.kind)
    return max(0.0, obj.center.dist(g.center) - (g.radius - obj.radius))


def is_sorted(obj: SceneObject, w: WorldState) -> bool:
    g = w.goal_for(obj.kind)
    return obj.center.dist(g.center) <= g.radius - obj.radius


def heuristic(w: WorldState) -> float:
    return sum(object_distance(o, w) for o in w.objects)


def all_sorted(w: WorldState) -> bool:
    return all(is_sorted(o, w) for o in w.objects)


# --- scenario files --------------------------------------------------------

_TOP_KEYS = {"table", "robot", "goals", "objects"}
_ROBOT_KEYS = {"base", "home", "reach_min", "reach_max", "pusher_length", "pusher_radius"}


def _check_keys(d: dict, allowed: set, where: str, required: Iterable[str] | None = None) -> None:
    if not isinstance(d, dict):
        raise ScenarioError(f"{where}: expected an object")
    extra = set(d) - allowed
    if extra:
        raise ScenarioError(f"{where}: unknown keys {sorted(extra)}")
    missing = set(allowed if required is None else required) - set(d)
    if missing:
        raise ScenarioError(f"{where}: missing keys {sorted(missing)}")


def _point(v, where: str) -> Point2:
    if not (isinstance(v, (list, tuple)) and len(v) == 2):
        raise ScenarioError(f"{where}: expected [x, y]")
    try:
        p = Point2(float(v[0]), float(v[1]))
    except (TypeError, ValueError) as e:
        raise ScenarioError(f"{where}: {e}") from None
    if not p.is_finite():
        raise ScenarioError(f"{where}: non-finite coordinate")
    return p


def _kind(v, where: str) -> ObjectKind:
    try:
        return ObjectKind(v)
    except ValueError:
        raise ScenarioError(f"{where}: unknown kind {v!r}") from None


def world_to_dict(w: WorldState) -> dict:
    r = w.robot
    return {
        "table": {"min": list(w.table.min), "max": list(w.table.max)},
        "robot": {
            "base": list(r.base),
            "home": list(r.home),
            "reach_min": r.reach_min,
            "reach_max": r.reach_max,
            "pusher_length": r.pusher_length,
            "pusher_radius": r.pusher_radius,
        },
        "goals": [
            {"kind": g.kind.value, "center": list(g.center), "radius": g.radius} for g in w.goals
        ],
        "objects": [
            {"id": o.id, "kind": o.kind.value, "center": list(o.center), "radius": o.radius}
            for o in w.objects
        ],
    }


def world_from_dict(d: dict) -> WorldState:
    _check_keys(d, _TOP_KEYS, "scenario")
    _check_keys(d["table"], {"min", "max"}, "table")
    table = Table(_point(d["table"]["min"], "table.min"), _point(d["table"]["max"], "table.max"))
    rd = d["robot"]
    _check_keys(rd, _ROBOT_KEYS, "robot")
    try:
        robot = RobotModel(
            base=_point(rd["base"], "robot.base"),
            home=_point(rd["home"], "robot.home"),
            reach_min=float(rd["reach_min"]),
            reach_max=float(rd["reach_max"]),
            pusher_length=float(rd["pusher_length"]),
            pusher_radius=float(rd["pusher_radius"]),
        )
    except (TypeError, ValueError) as e:
        raise ScenarioError(f"robot: {e}") from None
    goals = []
    for i, gd in enumerate(d["goals"]):
        _check_keys(gd, {"kind", "center", "radius"}, f"goals[{i}]")
        goals.append(GoalRegion(_kind(gd["kind"], f"goals[{i}]"), _point(gd["center"], f"goals[{i}].center"), float(gd["radius"])))
    objects = []
    for i, od in enumerate(d["objects"]):
        _check_keys(od, {"id", "kind", "center", "radius"}, f"objects[{i}]")
        if not isinstance(od["id"], int) or isinstance(od["id"], bool):
            raise ScenarioError(f"objects[{i}]: id must be an integer")
        try:
            disc = Disc2(_point(od["center"], f"objects[{i}].center"), float(od["radius"]))
        except ValueError as e:
            raise ScenarioError(f"objects[{i}]: {e}") from None
        objects.append(SceneObject(od["id"], _kind(od["kind"], f"objects[{i}]"), disc))
    return WorldState(table, robot, tuple(objects), tuple(goals))


def dumps_world(w: WorldState) -> str:
    return json.dumps(world_to_dict(w), indent=2) + "\n"


def load_world(path: str | Path) -> WorldState:
    try:
        d = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise ScenarioError(f"{path}: {e}") from None
    return world_from_dict(d)


def round_point(p, places: int = 6) -> list[float]:
    return [round(p[0], places), round(p[1], places)]
