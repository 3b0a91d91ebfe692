"""Planar primitives and penetration queries.

Everything is in meters. The scalar kernels (``closest_on_segment``,
``segment_disc_contact``) take raw floats so the push engine can call them
in its inner loop without building tuples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

# Used whenever a contact normal is undefined (coincident centers, disc on axis).
FALLBACK_NORMAL = (1.0, 0.0)


class Point2(NamedTuple):
    x: float
    y: float

    def __add__(self, other):  # type: ignore[override]
        return Point2(self.x + other[0], self.y + other[1])

    def __sub__(self, other):
        return Point2(self.x - other[0], self.y - other[1])

    def scale(self, k: float) -> Point2:
        return Point2(self.x * k, self.y * k)

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def dist(self, other) -> float:
        return math.hypot(self.x - other[0], self.y - other[1])

    def is_finite(self) -> bool:
        return math.isfinite(self.x) and math.isfinite(self.y)


class Segment2(NamedTuple):
    a: Point2
    b: Point2


@dataclass(frozen=True)
class Disc2:
    center: Point2
    radius: float

    def __post_init__(self) -> None:
        if not self.radius > 0:
            raise ValueError(f"disc radius must be positive, got {self.radius}")


@dataclass(frozen=True)
class Capsule2:
    axis: Segment2
    radius: float

    def __post_init__(self) -> None:
        if not self.radius > 0:
            raise ValueError(f"capsule radius must be positive, got {self.radius}")


class PenetrationResult(NamedTuple):
    depth: float
    normal: Point2


def unit(v) -> Point2:
    n = math.hypot(v[0], v[1])
    if n == 0.0:
        raise ValueError("cannot normalize a zero vector")
    return Point2(v[0] / n, v[1] / n)


def closest_on_segment(
    px: float, py: float, ax: float, ay: float, bx: float, by: float
) -> tuple[float, float]:
    """Closest point of segment ab to p."""
    dx = bx - ax
    dy = by - ay
    dd = dx * dx + dy * dy
    if dd == 0.0:
        return ax, ay
    t = ((px - ax) * dx + (py - ay) * dy) / dd
    if t <= 0.0:
        return ax, ay
    if t >= 1.0:
        return bx, by
    return ax + t * dx, ay + t * dy


def dist_point_segment(p, s: Segment2) -> float:
    cx, cy = closest_on_segment(p[0], p[1], s.a[0], s.a[1], s.b[0], s.b[1])
    return math.hypot(p[0] - cx, p[1] - cy)


def segment_disc_contact(
    ax: float, ay: float, bx: float, by: float, reach: float, px: float, py: float
) -> Optional[tuple[float, float, float]]:
    """Penetration of a point p into the ``reach``-neighbourhood of segment ab.

    Returns ``(depth, nx, ny)`` with the normal pointing from the axis toward
    p, or None when ``dist >= reach``.
    """
    cx, cy = closest_on_segment(px, py, ax, ay, bx, by)
    dx = px - cx
    dy = py - cy
    d = math.hypot(dx, dy)
    if d >= reach:
        return None
    if d == 0.0:
        return reach, FALLBACK_NORMAL[0], FALLBACK_NORMAL[1]
    return reach - d, dx / d, dy / d


def capsule_disc_penetration(c: Capsule2, d: Disc2) -> Optional[PenetrationResult]:
    a, b = c.axis
    hit = segment_disc_contact(
        a[0], a[1], b[0], b[1], c.radius + d.radius, d.center[0], d.center[1]
    )
    if hit is None:
        return None
    return PenetrationResult(hit[0], Point2(hit[1], hit[2]))


def disc_disc_penetration(d1: Disc2, d2: Disc2) -> Optional[PenetrationResult]:
    dx = d2.center[0] - d1.center[0]
    dy = d2.center[1] - d1.center[1]
    dist = math.hypot(dx, dy)
    reach = d1.radius + d2.radius
    if dist >= reach:
        return None
    if dist == 0.0:
        return PenetrationResult(reach, Point2(*FALLBACK_NORMAL))
    return PenetrationResult(reach - dist, Point2(dx / dist, dy / dist))


def dist_point_convex(p, vertices: list[Point2]) -> float:
    """Distance from p to a convex polygon given counter-clockwise.

    Degenerate polygons (a point or a segment, possibly with repeated
    vertices) are handled by falling back to edge distances.
    """
    n = len(vertices)
    if n == 1:
        return Point2(*p).dist(vertices[0])
    if n >= 3:
        inside = True
        for i in range(n):
            a = vertices[i]
            b = vertices[(i + 1) % n]
            cross = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])
            if cross < 0.0:
                inside = False
                break
        area2 = 0.0
        for i in range(n):
            a = vertices[i]
            b = vertices[(i + 1) % n]
            area2 += a[0] * b[1] - b[0] * a[1]
        if inside and area2 > 0.0:
            return 0.0
    return min(
        dist_point_segment(p, Segment2(vertices[i], vertices[(i + 1) % n]))
        for i in range(n)
    )
