"""Planar primitives shared by every other module.

Conventions used throughout the package:

* angles are radians,
* positive turns are to the left (counterclockwise),
* points and vectors are plain ``(x, y)`` tuples.

Coordinates are expected to be desk-scale, O(1)-O(100), so absolute
tolerances are used.
"""

from __future__ import annotations

import math

Vec2 = tuple[float, float]
Point2 = tuple[float, float]

TOL_PARALLEL = 1e-12  # on the normalized cross product
TOL_UNIT = 1e-9       # |norm - 1| allowed for unit headings


class DegenerateGeometryError(ValueError):
    """Raised when an operation receives degenerate input (zero vector, repeated point)."""


def add(p: Point2, v: Vec2) -> Point2:
    return (p[0] + v[0], p[1] + v[1])


def sub(a: Point2, b: Point2) -> Vec2:
    return (a[0] - b[0], a[1] - b[1])


def scale(v: Vec2, c: float) -> Vec2:
    return (v[0] * c, v[1] * c)


def neg(v: Vec2) -> Vec2:
    return (-v[0], -v[1])


def dot(a: Vec2, b: Vec2) -> float:
    return a[0] * b[0] + a[1] * b[1]


def cross(a: Vec2, b: Vec2) -> float:
    return a[0] * b[1] - a[1] * b[0]


def norm(v: Vec2) -> float:
    return math.hypot(v[0], v[1])


def dist(a: Point2, b: Point2) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


def unit(v: Vec2) -> Vec2:
    n = norm(v)
    if n == 0.0 or not math.isfinite(n):
        raise DegenerateGeometryError(f"cannot normalize vector {v!r}")
    return (v[0] / n, v[1] / n)


def is_unit(v: Vec2) -> bool:
    return abs(norm(v) - 1.0) <= TOL_UNIT


def angle_of(v: Vec2) -> float:
    """Direction angle of ``v`` in (-pi, pi]."""
    if v[0] == 0.0 and v[1] == 0.0:
        raise DegenerateGeometryError("zero vector has no direction")
    return math.atan2(v[1], v[0])


def from_angle(a: float) -> Vec2:
    return (math.cos(a), math.sin(a))


def normalize_angle(a: float) -> float:
    """Map any angle into (-pi, pi]."""
    r = math.remainder(a, 2.0 * math.pi)
    if r <= -math.pi:
        r += 2.0 * math.pi
    return r


def turn_angle(incoming: Vec2, outgoing: Vec2) -> float:
    """Signed angle from ``incoming`` to ``outgoing``, left positive, in (-pi, pi].

    Raises DegenerateGeometryError if either vector is (near) zero.
    """
    if norm(incoming) == 0.0 or norm(outgoing) == 0.0:
        raise DegenerateGeometryError("turn angle of a zero vector is undefined")
    return math.atan2(cross(incoming, outgoing), dot(incoming, outgoing))


def rotate(v: Vec2, angle: float) -> Vec2:
    c, s = math.cos(angle), math.sin(angle)
    return (c * v[0] - s * v[1], s * v[0] + c * v[1])


def rotate_about(p: Point2, center: Point2, angle: float) -> Point2:
    return add(center, rotate(sub(p, center), angle))


def line_intersection(p1: Point2, d1: Vec2, p2: Point2, d2: Vec2) -> Point2 | None:
    """Intersection of the lines through p1 along d1 and through p2 along d2.

    Returns None when the lines are parallel (normalized cross product below
    TOL_PARALLEL).
    """
    n1, n2 = norm(d1), norm(d2)
    if n1 == 0.0 or n2 == 0.0:
        raise DegenerateGeometryError("line direction must be nonzero")
    denom = cross(d1, d2)
    if abs(denom) / (n1 * n2) < TOL_PARALLEL:
        return None
    t = cross(sub(p2, p1), d2) / denom
    return add(p1, scale(d1, t))


def point_line_distance(p: Point2, a: Point2, d: Vec2) -> float:
    """Distance from point ``p`` to the line through ``a`` along ``d``."""
    return abs(cross(d, sub(p, a))) / norm(d)


def lerp(a: Point2, b: Point2, t: float) -> Point2:
    return (a[0] + (b[0] - a[0]) * t, a[1] + (b[1] - a[1]) * t)


def circle_circle_intersection(c1: Point2, r1: float, c2: Point2,
                               r2: float) -> tuple[Point2, Point2] | None:
    """Both intersection points of two circles, or None if they do not meet.

    Tangent circles return the same point twice.
    """
    d = dist(c1, c2)
    if d == 0.0:
        return None
    a = (d * d + r1 * r1 - r2 * r2) / (2.0 * d)
    h2 = r1 * r1 - a * a
    if h2 < 0.0:
        if h2 < -1e-12 * max(1.0, r1 * r1):
            return None
        h2 = 0.0
    h = math.sqrt(h2)
    ex = ((c2[0] - c1[0]) / d, (c2[1] - c1[1]) / d)
    ey = (-ex[1], ex[0])
    base = add(c1, scale(ex, a))
    return (add(base, scale(ey, h)), add(base, scale(ey, -h)))
