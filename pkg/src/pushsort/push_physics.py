"""Quasi-static prediction of a straight-line pusher sweep through a field of discs.

The pusher is a capsule translated in small substeps with a fixed axis
orientation. After every substep, overlaps are removed by iterated projection
(Gauss-Seidel order: discs by ascending id, pusher contacts before disc-disc
contacts). Discs carry no momentum, so anything not in contact stays put.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .geometry import Capsule2, Point2, Segment2, closest_on_segment, dist_point_convex
from .world import WorldState


class InfeasibleStart(Exception):
    """The pusher already penetrates a disc at its start pose."""


@dataclass(frozen=True)
class SimParams:
    substep: float = 0.0005
    max_projection_iters: int = 32
    penetration_eps: float = 1e-5
    post_push_settle_iters: int = 64

    def __post_init__(self) -> None:
        if not self.substep > 0:
            raise ValueError("substep must be positive")
        if self.max_projection_iters < 1 or self.post_push_settle_iters < 1:
            raise ValueError("iteration counts must be >= 1")
        if not self.penetration_eps > 0:
            raise ValueError("penetration_eps must be positive")

    def refined(self, factor: int = 10) -> SimParams:
        """Finer discretization used as a convergence reference."""
        return replace(
            self,
            substep=self.substep / factor,
            max_projection_iters=self.max_projection_iters * factor,
            post_push_settle_iters=self.post_push_settle_iters * factor,
        )


@dataclass(frozen=True)
class PushSpec:
    """Straight sweep of the pusher reference point (the capsule axis midpoint)."""

    start: Point2
    end: Point2
    pusher_length: float
    pusher_radius: float
    axis_angle: float

    @property
    def length(self) -> float:
        return self.start.dist(self.end)

    def half_axis(self) -> tuple[float, float]:
        h = 0.5 * self.pusher_length
        return h * math.cos(self.axis_angle), h * math.sin(self.axis_angle)

    def capsule_at(self, ref) -> Capsule2:
        hx, hy = self.half_axis()
        return Capsule2(
            Segment2(Point2(ref[0] - hx, ref[1] - hy), Point2(ref[0] + hx, ref[1] + hy)),
            self.pusher_radius,
        )

    def moved_to(self, start) -> PushSpec:
        return replace(self, start=Point2(start[0], start[1]))


@dataclass(frozen=True)
class PushOutcome:
    final: WorldState
    displaced_ids: frozenset
    any_off_table: bool
    max_residual_penetration: float
    # Only set when the rollout stopped at the first off-table event.
    aborted: bool = False


def _hull(points: list[Point2]) -> list[Point2]:
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower: list[Point2] = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[Point2] = []
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


@dataclass(frozen=True)
class SweptBand:
    """Region covered by the pusher over its sweep: ``core`` dilated by ``radius``."""

    core: tuple[Point2, ...]
    radius: float

    def distance(self, p) -> float:
        """Distance from p to the band (0 inside)."""
        return max(0.0, dist_point_convex(p, list(self.core)) - self.radius)

    def touches_disc(self, center, disc_radius: float) -> bool:
        return dist_point_convex(center, list(self.core)) < self.radius + disc_radius


def swept_band(spec: PushSpec) -> SweptBand:
    hx, hy = spec.half_axis()
    corners = [
        Point2(p[0] + s * hx, p[1] + s * hy) for p in (spec.start, spec.end) for s in (-1.0, 1.0)
    ]
    return SweptBand(tuple(_hull(corners)), spec.pusher_radius)


def guaranteed_fixed(w: WorldState, spec: PushSpec, tol: float = 1e-9) -> set[int]:
    """Ids of objects no push rollout can move, even through a chain of contacts.

    A disc first moves while touching the pusher or an already moving disc, so
    at that instant its (still original) center lies within the band dilated by
    its own radius plus the diameters of every other disc.
    """
    band = swept_band(spec)
    diam = sum(2.0 * o.radius for o in w.objects)
    out = set()
    for o in w.objects:
        slack = band.radius + o.radius + (diam - 2.0 * o.radius)
        if dist_point_convex(o.center, list(band.core)) > slack + tol:
            out.add(o.id)
    return out


def predict_push(
    w: WorldState,
    spec: PushSpec,
    p: SimParams = SimParams(),
    *,
    abort_on_off_table: bool = False,
    check_motion: bool = False,
) -> PushOutcome:
    """Roll the pusher from ``spec.start`` to ``spec.end`` and return the settled world.

    With ``abort_on_off_table`` the rollout stops at the first table-boundary
    crossing (callers that reject such rollouts anyway save the remaining work).
    ``check_motion`` asserts that no disc moves more per substep than the
    pusher translation plus the deepest penetration resolved in that substep.
    """
    order = sorted(range(w.n), key=lambda k: w.objects[k].id)
    objs = [w.objects[k] for k in order]
    xs = [o.center.x for o in objs]
    ys = [o.center.y for o in objs]
    rs = [o.radius for o in objs]
    lox = [w.table.min.x + r for r in rs]
    hix = [w.table.max.x - r for r in rs]
    loy = [w.table.min.y + r for r in rs]
    hiy = [w.table.max.y - r for r in rs]
    n = len(objs)
    pr = spec.pusher_radius
    hx, hy = spec.half_axis()
    eps = p.penetration_eps
    hypot = math.hypot

    sx, sy = spec.start
    for i in range(n):
        cx, cy = closest_on_segment(xs[i], ys[i], sx - hx, sy - hy, sx + hx, sy + hy)
        if hypot(xs[i] - cx, ys[i] - cy) < pr + rs[i]:
            raise InfeasibleStart(f"pusher at start penetrates object {objs[i].id}")

    state = {"off": False}
    # Discs moved since their pairs were last examined; all start active so
    # contact-tolerance overlaps in the input get resolved once.
    active = [True] * n

    def clamp(i: int) -> None:
        x, y = xs[i], ys[i]
        if x < lox[i]:
            x = lox[i]
        elif x > hix[i]:
            x = hix[i]
        if y < loy[i]:
            y = loy[i]
        elif y > hiy[i]:
            y = hiy[i]
        if x != xs[i] or y != ys[i]:
            xs[i], ys[i] = x, y
            state["off"] = True

    def resolve(qx: float, qy: float, iters: int) -> float:
        """Projection rounds at pusher pose q; returns the deepest correction made."""
        nonlocal active
        ax, ay, bx, by = qx - hx, qy - hy, qx + hx, qy + hy
        sdx, sdy = bx - ax, by - ay
        sdd = sdx * sdx + sdy * sdy
        deepest = 0.0
        for _ in range(iters):
            maxd = 0.0
            for i in range(n):
                px, py = xs[i], ys[i]
                if sdd == 0.0:
                    cx, cy = ax, ay
                else:
                    t = ((px - ax) * sdx + (py - ay) * sdy) / sdd
                    if t <= 0.0:
                        cx, cy = ax, ay
                    elif t >= 1.0:
                        cx, cy = bx, by
                    else:
                        cx, cy = ax + t * sdx, ay + t * sdy
                dx, dy = px - cx, py - cy
                reach = pr + rs[i]
                if dx >= reach or dx <= -reach or dy >= reach or dy <= -reach:
                    continue
                d = hypot(dx, dy)
                if d >= reach:
                    continue
                depth = reach - d
                if d == 0.0:
                    xs[i] = px + depth
                else:
                    xs[i] = px + dx / d * depth
                    ys[i] = py + dy / d * depth
                clamp(i)
                active[i] = True
                if depth > maxd:
                    maxd = depth
            if True in active:
                moved = [False] * n
                for i in range(n):
                    ai = active[i]
                    xi, yi, ri = xs[i], ys[i], rs[i]
                    for j in range(i + 1, n):
                        if not (ai or active[j] or moved[i] or moved[j]):
                            continue
                        dx = xs[j] - xi
                        reach = ri + rs[j]
                        if dx >= reach or dx <= -reach:
                            continue
                        dy = ys[j] - yi
                        if dy >= reach or dy <= -reach:
                            continue
                        d = hypot(dx, dy)
                        if d >= reach:
                            continue
                        depth = reach - d
                        h = 0.5 * depth
                        if d == 0.0:
                            xs[i] -= h
                            xs[j] += h
                        else:
                            nx, ny = dx / d, dy / d
                            xs[i] -= nx * h
                            ys[i] -= ny * h
                            xs[j] += nx * h
                            ys[j] += ny * h
                        clamp(i)
                        clamp(j)
                        xi, yi = xs[i], ys[i]
                        moved[i] = moved[j] = True
                        if depth > maxd:
                            maxd = depth
                active = moved
            if maxd > deepest:
                deepest = maxd
            if maxd <= eps:
                break
        return deepest

    ex, ey = spec.end
    length = hypot(ex - sx, ey - sy)
    nsteps = math.ceil(length / p.substep) if length > 0.0 else 0
    step_len = length / nsteps if nsteps else 0.0
    aborted = False
    for k in range(1, nsteps + 1):
        if k == nsteps:
            qx, qy = ex, ey
        else:
            f = k / nsteps
            qx, qy = sx + (ex - sx) * f, sy + (ey - sy) * f
        if check_motion:
            before = list(zip(xs, ys))
        deepest = resolve(qx, qy, p.max_projection_iters)
        if check_motion:
            bound = step_len + deepest + 1e-12
            for i, (x0, y0) in enumerate(before):
                moved = hypot(xs[i] - x0, ys[i] - y0)
                assert moved <= bound, (
                    f"object {objs[i].id} moved {moved} in one substep (bound {bound})"
                )
        if abort_on_off_table and state["off"]:
            aborted = True
            break
    if not aborted:
        resolve(ex, ey, p.post_push_settle_iters)
        qx, qy = ex, ey

    residual = _max_penetration(xs, ys, rs, qx, qy, hx, hy, pr)

    centers = {}
    displaced = set()
    for i, o in enumerate(objs):
        if xs[i] != o.center.x or ys[i] != o.center.y:
            centers[o.id] = Point2(xs[i], ys[i])
            if hypot(xs[i] - o.center.x, ys[i] - o.center.y) > eps:
                displaced.add(o.id)
    return PushOutcome(
        final=w.with_positions(centers),
        displaced_ids=frozenset(displaced),
        any_off_table=state["off"],
        max_residual_penetration=residual,
        aborted=aborted,
    )


def _max_penetration(xs, ys, rs, qx, qy, hx, hy, pr) -> float:
    worst = 0.0
    n = len(xs)
    for i in range(n):
        cx, cy = closest_on_segment(xs[i], ys[i], qx - hx, qy - hy, qx + hx, qy + hy)
        worst = max(worst, pr + rs[i] - math.hypot(xs[i] - cx, ys[i] - cy))
        for j in range(i + 1, n):
            worst = max(worst, rs[i] + rs[j] - math.hypot(xs[j] - xs[i], ys[j] - ys[i]))
    return worst
