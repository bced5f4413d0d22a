"""Smooth unit-curvature curves, their discretization, and a Dubins solver.

Smooth paths here are words of unit-radius circular arcs and straight
segments, parameterized by arclength.  Their tangent direction is 1-Lipschitz
in arclength, so the mean-curvature bound holds by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .geometry import (
    Point2,
    Vec2,
    add,
    angle_of,
    dist,
    from_angle,
    rotate,
    scale,
    sub,
    turn_angle,
)
from .model import Configuration, DiscretePath, Params

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class ArcSeg:
    """Unit-radius circular arc: orientation +1 turns left, -1 turns right."""

    orientation: int
    sweep: float

    def __post_init__(self):
        if self.orientation not in (1, -1):
            raise ValueError("orientation must be +1 (left) or -1 (right)")
        if not (self.sweep > 0.0):
            raise ValueError("sweep must be positive")

    @property
    def length(self) -> float:
        return self.sweep


@dataclass(frozen=True)
class LineSeg:
    length: float

    def __post_init__(self):
        if not (self.length > 0.0):
            raise ValueError("length must be positive")


Segment = ArcSeg | LineSeg


@dataclass(frozen=True)
class SmoothPath:
    """Arclength-parameterized word of arcs and lines, C1 at the joints."""

    start: Configuration
    segments: tuple[Segment, ...]

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))

    @property
    def length(self) -> float:
        return sum(seg.length for seg in self.segments)

    def eval(self, t: float) -> tuple[Point2, Vec2]:
        """Point and unit tangent at arclength t in [0, length]."""
        if t < -1e-12 or t > self.length + 1e-12:
            raise ValueError(f"t={t} outside [0, {self.length}]")
        t = min(max(t, 0.0), self.length)
        p, h = self.start.point, self.start.heading
        rest = t
        for seg in self.segments:
            if rest <= seg.length:
                return _advance(p, h, seg, rest)
            p, h = _advance(p, h, seg, seg.length)
            rest -= seg.length
        return p, h

    def end_configuration(self) -> Configuration:
        p, h = self.eval(self.length)
        return Configuration(p, h)


def _advance(p: Point2, h: Vec2, seg: Segment, t: float) -> tuple[Point2, Vec2]:
    if isinstance(seg, LineSeg):
        return add(p, scale(h, t)), h
    o = seg.orientation
    center = add(p, rotate(h, o * math.pi / 2.0))
    swept = o * t
    return add(center, rotate(sub(p, center), swept)), rotate(h, swept)


def chord_bound_check(gamma: SmoothPath, t: float, s: float,
                      slack: float = 1e-9) -> bool:
    """Chord lower bound: |gamma(s) - gamma(t)| >= 2 sin((s-t)/2) - slack."""
    if not (t < s < t + math.pi):
        raise ValueError("requires t < s < t + pi")
    a, _ = gamma.eval(t)
    b, _ = gamma.eval(s)
    return dist(a, b) >= 2.0 * math.sin((s - t) / 2.0) - slack


def angle_bound_check(gamma: SmoothPath, t: float, s: float,
                      slack: float = 1e-9) -> bool:
    """Tangent-to-chord bound: angle(gamma'(t), gamma(t)->gamma(s)) <= (s-t)/2 + slack."""
    if not (t < s < t + math.pi):
        raise ValueError("requires t < s < t + pi")
    a, ha = gamma.eval(t)
    b, _ = gamma.eval(s)
    return abs(turn_angle(ha, sub(b, a))) <= (s - t) / 2.0 + slack


@dataclass(frozen=True)
class DiscretizationPlan:
    """Arclength breakpoints of a theta-discretization.

    The curve length splits as m*theta + delta.  With delta = 0 the
    breakpoints step uniformly by theta; otherwise the first and last steps
    are delta/2 and the m+1 middle steps are theta.
    """

    theta: float
    m: int
    delta: float
    breakpoints: tuple[float, ...]

    @classmethod
    def for_length(cls, total: float, theta: float) -> "DiscretizationPlan":
        if not (theta < total):
            raise ValueError(f"theta={theta} must be smaller than the curve length {total}")
        m = int(math.floor(total / theta))
        delta = total - m * theta
        snap = 1e-12 * max(1.0, total)
        if delta <= snap:
            delta = 0.0
        elif theta - delta <= snap:
            m += 1
            delta = 0.0
        if delta == 0.0:
            ts = [i * theta for i in range(m)] + [total]
        else:
            ts = [0.0, delta / 2.0]
            ts += [delta / 2.0 + i * theta for i in range(1, m + 1)]
            ts.append(total)
        return cls(theta=theta, m=m, delta=delta, breakpoints=tuple(ts))


def discretize(gamma: SmoothPath, theta: float) -> DiscretePath:
    """Sample the curve at the theta-discretization breakpoints.

    The result is a discrete bounded-curvature path for parameters
    (theta, ell = 2 sin(theta/2)): middle edges are chords over arclength
    exactly theta, hence non-short, and every turn stays within theta.
    """
    params = Params(theta=theta, ell=2.0 * math.sin(theta / 2.0))
    plan = DiscretizationPlan.for_length(gamma.length, theta)
    vertices = [gamma.eval(t)[0] for t in plan.breakpoints]
    start = Configuration(vertices[0], gamma.start.heading)
    ep, eh = gamma.eval(gamma.length)
    end = Configuration(vertices[-1], eh)
    path = DiscretePath(start=start, end=end, vertices=tuple(vertices))
    return path


def discretization_params(theta: float) -> Params:
    return Params(theta=theta, ell=2.0 * math.sin(theta / 2.0))


def _mod2pi(a: float) -> float:
    r = math.fmod(a, TWO_PI)
    if r < 0.0:
        r += TWO_PI
    return r


def _center(p: Point2, h: Vec2, orientation: int) -> Point2:
    return add(p, rotate(h, orientation * math.pi / 2.0))


def _assemble(U: Configuration, pieces) -> SmoothPath | None:
    segs = []
    for kind, o, amount in pieces:
        if amount <= 1e-12:
            continue
        if kind == "arc":
            segs.append(ArcSeg(o, amount))
        else:
            segs.append(LineSeg(amount))
    return SmoothPath(U, tuple(segs))


def _closes(path: SmoothPath, V: Configuration, tol: float = 1e-9) -> bool:
    p, h = path.eval(path.length)
    return dist(p, V.point) <= tol and abs(turn_angle(h, V.heading)) <= tol


def _csc_candidates(U: Configuration, V: Configuration):
    psi_u = angle_of(U.heading)
    psi_v = angle_of(V.heading)
    for o1 in (1, -1):
        for o2 in (1, -1):
            c1 = _center(U.point, U.heading, o1)
            c2 = _center(V.point, V.heading, o2)
            d = dist(c1, c2)
            if o1 == o2:
                if d < 1e-12:
                    sweep1 = _mod2pi(o1 * (psi_v - psi_u))
                    yield [("arc", o1, sweep1)]
                    continue
                psi = angle_of(sub(c2, c1))
                straight = d
            else:
                if d < 2.0:
                    continue
                phi = angle_of(sub(c2, c1))
                psi = phi + math.asin(2.0 * o1 / d)
                straight = math.sqrt(max(d * d - 4.0, 0.0))
            sweep1 = _mod2pi(o1 * (psi - psi_u))
            sweep2 = _mod2pi(o2 * (psi_v - psi))
            yield [("arc", o1, sweep1), ("line", 0, straight), ("arc", o2, sweep2)]


def _ccc_candidates(U: Configuration, V: Configuration):
    psi_u = angle_of(U.heading)
    psi_v = angle_of(V.heading)
    for o in (1, -1):
        c1 = _center(U.point, U.heading, o)
        c2 = _center(V.point, V.heading, o)
        d = dist(c1, c2)
        if d < 1e-12 or d > 4.0:
            continue
        phi = angle_of(sub(c2, c1))
        half = d / 2.0
        h = math.sqrt(max(4.0 - half * half, 0.0))
        for side in (1, -1):
            mid = add(c1, scale(from_angle(phi), half))
            c3 = add(mid, scale(rotate(from_angle(phi), side * math.pi / 2.0), h))
            a13 = angle_of(sub(c3, c1))
            a23 = angle_of(sub(c3, c2))
            psi13 = a13 + o * math.pi / 2.0
            psi23 = a23 + o * math.pi / 2.0
            sweep1 = _mod2pi(o * (psi13 - psi_u))
            sweep_mid = _mod2pi(-o * (psi23 - psi13))
            sweep2 = _mod2pi(o * (psi_v - psi23))
            yield [("arc", o, sweep1), ("arc", -o, sweep_mid), ("arc", o, sweep2)]


def dubins_solve(U: Configuration, V: Configuration) -> SmoothPath:
    """Shortest unit-radius arc-line-arc or arc-arc-arc curve from U to V.

    All six classical words are constructed geometrically; candidates that
    fail to reproduce the boundary configurations are discarded, and the
    shortest survivor wins.
    """
    best: SmoothPath | None = None
    for pieces in list(_csc_candidates(U, V)) + list(_ccc_candidates(U, V)):
        path = _assemble(U, pieces)
        if path is None or not _closes(path, V):
            continue
        if best is None or path.length < best.length:
            best = path
    if best is None:
        raise RuntimeError("no Dubins word closed on the boundary configurations")
    return best


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    theta: float
    ell: float
    plan_length: float
    discretized_length: float
    dubins_length: float


def convergence_experiment(U: Configuration, V: Configuration,
                           n_list) -> list[ConvergenceRow]:
    """Lengths of the planned, discretized, and smooth paths per refinement n.

    For each n the discrete parameters are theta = 2 pi / n and
    ell = 2 sin(pi / n); the discretization of the smooth optimum is a
    feasible discrete path, so the planned length can never exceed it.
    """
    from .planner import plan  # local import; the planner uses this module's solver

    gamma = dubins_solve(U, V)
    rows = []
    for n in n_list:
        theta = TWO_PI / n
        if theta >= gamma.length:
            raise ValueError(f"n={n} too coarse for a curve of length {gamma.length}")
        params = Params.from_sides(n, 2.0 * math.sin(math.pi / n))
        disc = discretize(gamma, theta)
        from .model import path_length
        result = plan(U, V, params)
        rows.append(ConvergenceRow(
            n=n,
            theta=theta,
            ell=params.ell,
            plan_length=result.length,
            discretized_length=path_length(disc),
            dubins_length=gamma.length,
        ))
    return rows
