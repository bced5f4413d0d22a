"""Shortest discrete bounded-curvature paths between two configurations.

Shortest paths decompose into at most a discrete arc, a straight bridge, and
a discrete arc (with degenerate variants), or up to three discrete arcs, so
those are the candidate shapes.  A candidate arc is ``k`` edges of length ``ell`` with
turns of exactly ``theta``; the free unknowns are the joint turns at the
endpoints and between elements, plus one bridge length.  Position closure is
solved in closed form (chord geometry and two-link inverse kinematics), and
the leftover one- or two-parameter families are minimized over length by
scanning plus local refinement.

A discretization of the smooth Dubins curve between the configurations is
always included as a candidate, which makes the planned length at most the
discretized smooth length on every instance.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import (
    Point2,
    add,
    angle_of,
    dist,
    from_angle,
    normalize_angle,
    scale,
    sub,
)
from .model import (
    Configuration,
    DiscretePath,
    Params,
    path_length,
    validate,
)
from .structure import find_forbidden_subtype, type_string
from . import smooth as _smooth

log = logging.getLogger("ddgeo.planner")

TWO_PI = 2.0 * math.pi


class PlannerError(RuntimeError):
    """No candidate produced a feasible true-type path (should not happen)."""


@dataclass(frozen=True)
class CandidateSpec:
    """One shooting candidate: a true-type word with arc orientations and
    per-arc edge counts; ``phis`` are the joint turns (at the start, between
    elements, at the end) and ``s`` the bridge length, when known."""

    word: str
    orientations: tuple[int, ...]
    ks: tuple[int, ...]
    phis: tuple[float, ...] | None = None
    s: float | None = None


@dataclass
class CandidateDiag:
    word: str
    orientations: tuple[int, ...]
    ks: tuple[int, ...]
    status: str              # solved | infeasible | failed
    length: float | None = None
    residual: float | None = None


@dataclass
class PlanResult:
    best: DiscretePath
    type_word: str
    length: float
    diagnostics: list[CandidateDiag] = field(default_factory=list)
    residual_norm: float = 0.0


# ---------------------------------------------------------------------------
# arc chord geometry

def _chord(params: Params, k: int) -> float:
    """Distance between the two endpoints of an arc of k ell-edges."""
    return params.ell * math.sin(k * params.theta / 2.0) / math.sin(params.theta / 2.0)


def _arc_points(p: Point2, psi1: float, sigma: int, k: int,
                params: Params) -> list[Point2]:
    """The k successive vertices of an arc starting at p with first edge
    direction psi1 (start point not included)."""
    pts = []
    x, y = p
    for j in range(k):
        a = psi1 + j * sigma * params.theta
        x += params.ell * math.cos(a)
        y += params.ell * math.sin(a)
        pts.append((x, y))
    return pts


def _in_bounds(phi: float, theta: float, slack: float = 5e-10) -> bool:
    return abs(phi) <= theta + slack


# ---------------------------------------------------------------------------
# candidate assembly

class _Instance:
    def __init__(self, U: Configuration, V: Configuration, params: Params):
        self.U, self.V, self.params = U, V, params
        self.psi_u = angle_of(U.heading)
        self.psi_v = angle_of(V.heading)
        self.w = sub(V.point, U.point)
        self.d = dist(U.point, V.point)
        self.snap_tol = 0.3 * params.tol_len

    def finish(self, vertices: list[Point2]) -> DiscretePath | None:
        """Snap the built endpoint onto V, dedup, and validate."""
        if dist(vertices[-1], self.V.point) > self.snap_tol:
            return None
        verts = [self.U.point]
        for p in vertices[1:]:
            if dist(verts[-1], p) > 10.0 * self.params.tol_dedup:
                verts.append(p)
        verts[-1] = self.V.point
        if len(verts) >= 2 and dist(verts[-2], verts[-1]) <= 10.0 * self.params.tol_dedup:
            del verts[-2]
        try:
            path = DiscretePath(self.U, self.V, tuple(verts))
        except ValueError:
            return None
        try:
            if validate(path, self.params):
                return None
        except Exception:
            return None
        return path


def _build_elements(inst: _Instance, elements) -> list[Point2]:
    """elements: ('arc', sigma, k, psi1) or ('bridge', s, psi)."""
    verts = [inst.U.point]
    for el in elements:
        if el[0] == "arc":
            _, sigma, k, psi1 = el
            verts.extend(_arc_points(verts[-1], psi1, sigma, k, inst.params))
        else:
            _, s, psi = el
            if s > 0.0:
                verts.append(add(verts[-1], scale(from_angle(psi), s)))
    return verts


# ---------------------------------------------------------------------------
# per-word solvers (exact position closure by construction)

def _solve_B(inst: _Instance):
    if inst.d <= inst.params.tol_dedup:
        yield 0.0, [inst.U.point]
        return
    yield inst.d, [inst.U.point, inst.V.point]


def _solve_A(inst: _Instance, sigma: int, k: int):
    th = inst.params.theta
    c = _chord(inst.params, k)
    if abs(inst.d - c) > inst.snap_tol:
        return
    if inst.d <= inst.params.tol_dedup:
        return
    base = angle_of(inst.w)
    psi1 = base - (k - 1) * sigma * th / 2.0
    phi_u = normalize_angle(psi1 - inst.psi_u)
    phi_v = normalize_angle(inst.psi_v - (psi1 + (k - 1) * sigma * th))
    if not (_in_bounds(phi_u, th) and _in_bounds(phi_v, th)):
        return
    verts = [inst.U.point] + _arc_points(inst.U.point, psi1, sigma, k, inst.params)
    yield k * inst.params.ell, verts


def _two_link(w: Point2, c1: float, c2: float) -> list[tuple[float, float]]:
    """Chord direction pairs (a1, a2) with c1*e^{i a1} + c2*e^{i a2} = w.

    For a zero displacement and equal chords the solution set is the full
    back-to-back circle; a dense sample of that family is returned (all its
    members have equal length, so callers keep whichever is feasible).
    """
    d = math.hypot(w[0], w[1])
    if c1 <= 0.0 or c2 <= 0.0:
        return []
    if d < 1e-12:
        if abs(c1 - c2) > 1e-12:
            return []
        return [(a, a + math.pi)
                for a in np.linspace(0.0, 2.0 * math.pi, 65, endpoint=False)]
    if d > c1 + c2 + 1e-12 or d < abs(c1 - c2) - 1e-12:
        return []
    cosg = (c1 * c1 + d * d - c2 * c2) / (2.0 * c1 * d)
    cosg = min(1.0, max(-1.0, cosg))
    g = math.acos(cosg)
    base = math.atan2(w[1], w[0])
    out = []
    for a1 in ({base + g, base - g} if g > 1e-15 else {base}):
        rest = (w[0] - c1 * math.cos(a1), w[1] - c1 * math.sin(a1))
        if math.hypot(*rest) < 1e-15:
            # second chord degenerate; only valid if c2 is consumed exactly
            continue
        out.append((a1, math.atan2(rest[1], rest[0])))
    return out


def _solve_AA(inst: _Instance, sigmas, ks):
    th = inst.params.theta
    (s1, s2), (k1, k2) = sigmas, ks
    c1, c2 = _chord(inst.params, k1), _chord(inst.params, k2)
    for a1, a2 in _two_link(inst.w, c1, c2):
        psi1 = a1 - (k1 - 1) * s1 * th / 2.0
        psi2 = a2 - (k2 - 1) * s2 * th / 2.0
        phi_u = normalize_angle(psi1 - inst.psi_u)
        phi_j = normalize_angle(psi2 - (psi1 + (k1 - 1) * s1 * th))
        phi_v = normalize_angle(inst.psi_v - (psi2 + (k2 - 1) * s2 * th))
        if not (_in_bounds(phi_u, th) and _in_bounds(phi_j, th)
                and _in_bounds(phi_v, th)):
            continue
        verts = _build_elements(inst, [("arc", s1, k1, psi1), ("arc", s2, k2, psi2)])
        yield (k1 + k2) * inst.params.ell, verts


def _ab_geometry(inst: _Instance, sigma: int, k: int, phi_u):
    """Arc-then-bridge quantities for an array of phi_u values."""
    th = inst.params.theta
    c = _chord(inst.params, k)
    psi1 = inst.psi_u + phi_u
    mid = psi1 + (k - 1) * sigma * th / 2.0
    px = inst.U.point[0] + c * np.cos(mid)
    py = inst.U.point[1] + c * np.sin(mid)
    dx = inst.V.point[0] - px
    dy = inst.V.point[1] - py
    s = np.hypot(dx, dy)
    psi_b = np.arctan2(dy, dx)
    exit_dir = psi1 + (k - 1) * sigma * th
    phi_j = _norm_arr(psi_b - exit_dir)
    phi_v = _norm_arr(inst.psi_v - psi_b)
    return s, psi1, psi_b, phi_j, phi_v


def _norm_arr(a):
    return (a + math.pi) % TWO_PI - math.pi


def _solve_AB(inst: _Instance, sigma: int, k: int, reverse: bool):
    """AB when reverse is False, BA when True (solved on the reversed instance)."""
    work = inst if not reverse else _Instance(
        Configuration(inst.V.point, scale(inst.V.heading, -1.0)),
        Configuration(inst.U.point, scale(inst.U.heading, -1.0)),
        inst.params)
    th = work.params.theta
    grid = np.linspace(-th, th, 129)
    s, psi1, psi_b, phi_j, phi_v = _ab_geometry(work, sigma, k, grid)
    ok = (np.abs(phi_j) <= th + 5e-10) & (np.abs(phi_v) <= th + 5e-10) & (s > 1e-12)
    if not ok.any():
        return
    idx = int(np.argmin(np.where(ok, s, np.inf)))

    def objective(phi):
        sv, _, _, pj, pv = _ab_geometry(work, sigma, k, np.array([phi]))
        pen = max(0.0, abs(float(pj[0])) - th) + max(0.0, abs(float(pv[0])) - th)
        return float(sv[0]) + 1e6 * pen

    lo = grid[max(0, idx - 1)]
    hi = grid[min(len(grid) - 1, idx + 1)]
    phi = _golden(objective, lo, hi)
    cands = [float(grid[idx]), phi]
    for phi_u in cands:
        sv, p1, pb, pj, pv = _ab_geometry(work, sigma, k, np.array([phi_u]))
        if abs(float(pj[0])) > th + 5e-10 or abs(float(pv[0])) > th + 5e-10:
            continue
        verts = _build_elements(work, [
            ("arc", sigma, k, float(p1[0])),
            ("bridge", float(sv[0]), float(pb[0])),
        ])
        if reverse:
            verts = verts[::-1]
            verts = [inst.U.point] + verts[1:]
        yield k * inst.params.ell + float(sv[0]), verts


def _golden(f, lo: float, hi: float, iters: int = 60) -> float:
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return (a + b) / 2.0


def _aba_geometry(inst: _Instance, sigmas, ks, phi_u, phi_v):
    """Vectorized bridge quantities on a (phi_u x phi_v) grid."""
    th = inst.params.theta
    (s1, s2), (k1, k2) = sigmas, ks
    c1, c2 = _chord(inst.params, k1), _chord(inst.params, k2)
    psi1 = inst.psi_u + phi_u[:, None]
    mid1 = psi1 + (k1 - 1) * s1 * th / 2.0
    px = inst.U.point[0] + c1 * np.cos(mid1)
    py = inst.U.point[1] + c1 * np.sin(mid1)
    psi2 = inst.psi_v - phi_v[None, :] - (k2 - 1) * s2 * th
    mid2 = psi2 + (k2 - 1) * s2 * th / 2.0
    qx = inst.V.point[0] - c2 * np.cos(mid2)
    qy = inst.V.point[1] - c2 * np.sin(mid2)
    dx, dy = qx - px, qy - py
    s = np.hypot(dx, dy)
    psi_b = np.arctan2(dy, dx)
    exit1 = psi1 + (k1 - 1) * s1 * th
    phi_j1 = _norm_arr(psi_b - exit1)
    phi_j2 = _norm_arr(psi2 - psi_b)
    return s, psi1, psi2, psi_b, phi_j1, phi_j2


def _solve_ABA(inst: _Instance, sigmas, ks, length_cap: float = math.inf):
    th = inst.params.theta
    (k1, k2) = ks
    arcs_len = (k1 + k2) * inst.params.ell
    grid = np.linspace(-th, th, 33)
    s, psi1, psi2, psi_b, pj1, pj2 = _aba_geometry(inst, sigmas, ks, grid, grid)
    ok = (np.abs(pj1) <= th + 5e-10) & (np.abs(pj2) <= th + 5e-10) & (s > 1e-12)
    if not ok.any():
        return
    masked = np.where(ok, s, np.inf)
    i, j = np.unravel_index(int(np.argmin(masked)), masked.shape)
    points = [(float(grid[i]), float(grid[j]))]

    # only refine combos whose scanned minimum can still beat the incumbent
    c1, c2 = _chord(inst.params, k1), _chord(inst.params, k2)
    margin = (c1 + c2 + inst.d) * (grid[1] - grid[0])
    if arcs_len + float(masked[i, j]) <= length_cap + margin:
        def objective(x):
            pu = np.array([min(th, max(-th, x[0]))])
            pv = np.array([min(th, max(-th, x[1]))])
            sv, *_, j1, j2 = _aba_geometry(inst, sigmas, ks, pu, pv)
            pen = max(0.0, abs(float(j1[0, 0])) - th) + max(0.0, abs(float(j2[0, 0])) - th)
            return float(sv[0, 0]) + 1e6 * pen

        from scipy.optimize import minimize
        x0 = np.array([grid[i], grid[j]])
        res = minimize(objective, x0, method="Nelder-Mead",
                       options={"xatol": 1e-13, "fatol": 1e-14, "maxiter": 250})
        if res.fun < float(masked[i, j]):
            points.append((float(min(th, max(-th, res.x[0]))),
                           float(min(th, max(-th, res.x[1])))))
    for pu, pv in points:
        sv, p1, p2, pb, j1, j2 = _aba_geometry(
            inst, sigmas, ks, np.array([pu]), np.array([pv]))
        if abs(float(j1[0, 0])) > th + 5e-10 or abs(float(j2[0, 0])) > th + 5e-10:
            continue
        s1, s2 = sigmas
        verts = _build_elements(inst, [
            ("arc", s1, k1, float(p1[0, 0])),
            ("bridge", float(sv[0, 0]), float(pb[0, 0])),
            ("arc", s2, k2, float(p2[0, 0])),
        ])
        yield (k1 + k2) * inst.params.ell + float(sv[0, 0]), verts


def _solve_AAA(inst: _Instance, sigmas, ks):
    th = inst.params.theta
    (s1, s2, s3), (k1, k2, k3) = sigmas, ks
    c1 = _chord(inst.params, k1)
    c2, c3 = _chord(inst.params, k2), _chord(inst.params, k3)
    total = (k1 + k2 + k3) * inst.params.ell
    for phi_u in np.linspace(-th, th, 65):
        psi1 = inst.psi_u + phi_u
        mid1 = psi1 + (k1 - 1) * s1 * th / 2.0
        p1 = add(inst.U.point, scale(from_angle(mid1), c1))
        rest = sub(inst.V.point, p1)
        for a2, a3 in _two_link(rest, c2, c3):
            psi2 = a2 - (k2 - 1) * s2 * th / 2.0
            psi3 = a3 - (k3 - 1) * s3 * th / 2.0
            phi_j1 = normalize_angle(psi2 - (psi1 + (k1 - 1) * s1 * th))
            phi_j2 = normalize_angle(psi3 - (psi2 + (k2 - 1) * s2 * th))
            phi_v = normalize_angle(inst.psi_v - (psi3 + (k3 - 1) * s3 * th))
            if not (_in_bounds(phi_j1, th) and _in_bounds(phi_j2, th)
                    and _in_bounds(phi_v, th)):
                continue
            verts = _build_elements(inst, [
                ("arc", s1, k1, psi1),
                ("arc", s2, k2, psi2),
                ("arc", s3, k3, psi3),
            ])
            yield total, verts
            return  # all AAA solutions for these (sigmas, ks) have equal length


# ---------------------------------------------------------------------------
# enumeration

def _band_values(target: float, sign: int, theta: float, slack: float,
                 k_cap: int) -> list[int]:
    """Edge counts k with sign*(k-1)*theta within slack of target (mod 2pi)."""
    out = set()
    for wind in (-2, -1, 0, 1, 2):
        x = sign * (target + wind * TWO_PI) / theta
        lo = math.floor(x - slack / theta) + 1
        hi = math.ceil(x + slack / theta)
        for km1 in range(max(0, lo - 1), hi + 1):
            k = km1 + 1
            if 1 <= k <= k_cap:
                out.add(k)
    return sorted(out)


def _dubins_seed(U: Configuration, V: Configuration,
                 params: Params) -> DiscretePath | None:
    """Scaled discretization of the smooth Dubins curve; always feasible
    (chords over arclength steps theta keep every constraint), so it both
    seeds the incumbent and guarantees the planned length never exceeds the
    discretized smooth length."""
    r = params.circumradius
    try:
        Us = Configuration(scale(U.point, 1.0 / r), U.heading)
        Vs = Configuration(scale(V.point, 1.0 / r), V.heading)
        gamma = _smooth.dubins_solve(Us, Vs)
        if gamma.length <= params.theta * (1.0 + 1e-9):
            return None
        disc = _smooth.discretize(gamma, params.theta)
    except Exception:
        return None
    verts = [scale(p, r) for p in disc.vertices]
    verts[0] = U.point
    verts[-1] = V.point
    dedup = [verts[0]]
    for p in verts[1:]:
        if dist(dedup[-1], p) > 10.0 * params.tol_dedup:
            dedup.append(p)
    dedup[-1] = V.point
    try:
        path = DiscretePath(U, V, tuple(dedup))
    except ValueError:
        return None
    if validate(path, params):
        log.warning("dubins discretization seed failed validation; skipped")
        return None
    return path


def _smooth_guess(U: Configuration, V: Configuration, params: Params):
    """Arc sweep estimates from the smooth solution, for guided enumeration."""
    r = params.circumradius
    try:
        Us = Configuration(scale(U.point, 1.0 / r), U.heading)
        Vs = Configuration(scale(V.point, 1.0 / r), V.heading)
        gamma = _smooth.dubins_solve(Us, Vs)
    except Exception:
        return None
    sweeps = []
    for seg in gamma.segments:
        if isinstance(seg, _smooth.ArcSeg):
            sweeps.append((seg.orientation, seg.sweep))
        else:
            sweeps.append((0, seg.length))
    return sweeps


def plan(U: Configuration, V: Configuration, params: Params,
         k_max: int | None = None) -> PlanResult:
    """Minimum-length feasible path over all true-type candidates.

    Ties are broken by shorter type word, then lexicographically.  The result
    always validates and carries a true type.
    """
    inst = _Instance(U, V, params)
    th = params.theta
    k_cap = params.n_sides - 1
    if k_max is not None:
        k_cap = min(k_cap, k_max)
    diags: list[CandidateDiag] = []
    found: list[tuple[float, DiscretePath, str]] = []
    incumbent = math.inf

    def push(word, sigmas, ks, gen):
        nonlocal incumbent
        got = False
        for length, verts in gen:
            path = inst.finish(verts)
            if path is None:
                diags.append(CandidateDiag(word, sigmas, ks, "failed", length))
                continue
            got = True
            real = path_length(path)
            found.append((real, path, word))
            diags.append(CandidateDiag(word, sigmas, ks, "solved", real,
                                       dist(verts[-1], V.point)))
            if real < incumbent:
                incumbent = real
        if not got:
            diags.append(CandidateDiag(word, sigmas, ks, "infeasible"))

    seed = _dubins_seed(U, V, params)
    if seed is not None:
        length = path_length(seed)
        incumbent = length
        found.append((length, seed, "(seed)"))
        diags.append(CandidateDiag("(seed)", (), (), "solved", length))

    push("B", (), (), _solve_B(inst))

    dpsi = normalize_angle(inst.psi_v - inst.psi_u)

    # A
    for sigma in (1, -1):
        for k in _band_values(dpsi, sigma, th, 2.0 * th, k_cap):
            if k * params.ell > incumbent + params.tol_len:
                continue
            push("A", (sigma,), (k,), _solve_A(inst, sigma, k))

    # AA
    for s1 in (1, -1):
        for s2 in (1, -1):
            for k1 in range(1, k_cap + 1):
                if k1 * params.ell > incumbent + params.tol_len:
                    break
                t1 = dpsi - s1 * (k1 - 1) * th
                for k2 in _band_values(t1, s2, th, 3.0 * th, k_cap):
                    if (k1 + k2) * params.ell > incumbent + params.tol_len:
                        continue
                    c1, c2 = _chord(params, k1), _chord(params, k2)
                    if inst.d > c1 + c2 + inst.snap_tol:
                        continue
                    if inst.d < abs(c1 - c2) - inst.snap_tol:
                        continue
                    push("AA", (s1, s2), (k1, k2), _solve_AA(inst, (s1, s2), (k1, k2)))

    # AB / BA (BA is solved on the reversed instance, whose heading
    # difference is -dpsi)
    for word, rev in (("AB", False), ("BA", True)):
        base = -dpsi if rev else dpsi
        for sigma in (1, -1):
            for k in _band_values(base, sigma, th, 3.0 * th, k_cap):
                if k * params.ell > incumbent + params.tol_len:
                    continue
                push(word, (sigma,), (k,), _solve_AB(inst, sigma, k, rev))

    # ABA
    guided = params.n_sides > 48
    guess = _smooth_guess(U, V, params) if guided else None
    for s1 in (1, -1):
        for s2 in (1, -1):
            k1_range = (range(1, k_cap + 1) if not guided
                        else _guided_range(guess, th, k_cap))
            for k1 in k1_range:
                if (k1 + 1) * params.ell > incumbent + params.tol_len:
                    continue
                t1 = dpsi - s1 * (k1 - 1) * th
                k2s = _band_values(t1, s2, th, 4.0 * th, k_cap)
                if guided:
                    allowed = set(_guided_range(guess, th, k_cap))
                    k2s = [k for k in k2s if k in allowed]
                for k2 in k2s:
                    c1, c2 = _chord(params, k1), _chord(params, k2)
                    floor = (k1 + k2) * params.ell + max(0.0, inst.d - c1 - c2)
                    if floor > incumbent + params.tol_len:
                        continue
                    push("ABA", (s1, s2), (k1, k2),
                         _solve_ABA(inst, (s1, s2), (k1, k2),
                                    incumbent + params.tol_len))

    # AAA (only relevant for nearby configurations)
    if inst.d <= 4.5 * params.circumradius + 2.0 * params.ell:
        sigma_triples = [(a, b, c) for a in (1, -1) for b in (1, -1)
                         for c in (1, -1)]
        for sigmas in sigma_triples:
            s1, s2, s3 = sigmas
            if guided and not (s1 == -s2 == s3):
                continue  # fine grids: smooth-limit CCC shape only
            k1_range = (range(1, k_cap + 1) if not guided
                        else _guided_range(guess, th, k_cap))
            for k1 in k1_range:
                if (k1 + 2) * params.ell > incumbent + params.tol_len:
                    continue
                k2_range = (range(1, k_cap + 1) if not guided
                            else _guided_range(guess, th, k_cap))
                for k2 in k2_range:
                    if (k1 + k2 + 1) * params.ell > incumbent + params.tol_len:
                        continue
                    t2 = dpsi - s1 * (k1 - 1) * th - s2 * (k2 - 1) * th
                    for k3 in _band_values(t2, s3, th, 4.0 * th, k_cap):
                        if (k1 + k2 + k3) * params.ell > incumbent + params.tol_len:
                            continue
                        push("AAA", sigmas, (k1, k2, k3),
                             _solve_AAA(inst, sigmas, (k1, k2, k3)))

    if not found:
        raise PlannerError("no candidate solved; this instance needs investigation")

    found.sort(key=lambda t: t[0])
    best_len = found[0][0]
    tol = 1e-9 * max(1.0, best_len)
    tied = [f for f in found if f[0] <= best_len + tol]

    def tie_key(entry):
        _, path, _ = entry
        word = type_string(path, params)
        return (len(word), word, len(path.vertices))

    ordered = sorted(tied, key=tie_key) + [f for f in found if f[0] > best_len + tol]
    for length, path, _ in ordered:
        word = type_string(path, params)
        if word == "" or find_forbidden_subtype(word) is None:
            return PlanResult(best=path, type_word=word, length=length,
                              diagnostics=diags,
                              residual_norm=0.0)
        # not true-type (e.g. the raw seed won): polish with the rewriter
        from .rewrite import shorten
        polished, _trace = shorten(path, params, budget=4000)
        pword = type_string(polished, params)
        plen = path_length(polished)
        if plen <= length + tol and (pword == "" or
                                     find_forbidden_subtype(pword) is None):
            return PlanResult(best=polished, type_word=pword, length=plen,
                              diagnostics=diags, residual_norm=0.0)
    raise PlannerError("no candidate produced a true-type feasible path")


def _guided_range(guess, theta: float, k_cap: int) -> list[int]:
    """Edge counts within a few steps of the smooth arc sweeps, plus the
    small counts (used on fine grids, where full enumeration is wasteful)."""
    if not guess:
        return list(range(1, k_cap + 1))
    ks = set(range(1, min(8, k_cap) + 1))
    for o, sweep in guess:
        if o == 0:
            continue
        center = int(sweep / theta)
        for k in range(center - 4, center + 6):
            if 1 <= k <= k_cap:
                ks.add(k)
    return sorted(ks)


# ---------------------------------------------------------------------------
# shooting map (diagnostic surface)

def forward_construct(spec: CandidateSpec, U: Configuration, V: Configuration,
                      params: Params) -> tuple[DiscretePath, tuple[float, float, float]]:
    """Build the polyline of a fully specified candidate and report how far
    its endpoint misses the target configuration (dx, dy, dheading)."""
    if spec.phis is None:
        raise ValueError("forward_construct needs explicit joint turns")
    psi = angle_of(U.heading)
    phis = list(spec.phis)
    verts = [U.point]
    arc_i = 0
    for letter in spec.word:
        phi = phis.pop(0)
        psi += phi
        if letter == "A":
            sigma = spec.orientations[arc_i]
            k = spec.ks[arc_i]
            arc_i += 1
            verts.extend(_arc_points(verts[-1], psi, sigma, k, params))
            psi += max(0, k - 1) * sigma * params.theta
        elif letter == "B":
            s = spec.s if spec.s is not None else 0.0
            if s > 0.0:
                verts.append(add(verts[-1], scale(from_angle(psi), s)))
        else:
            raise ValueError(f"unknown letter {letter!r} in word {spec.word!r}")
    psi += phis.pop(0)
    end = Configuration(verts[-1], from_angle(psi))
    path = DiscretePath(Configuration(U.point, U.heading), end, tuple(verts))
    res = (verts[-1][0] - V.point[0], verts[-1][1] - V.point[1],
           normalize_angle(psi - angle_of(V.heading)))
    return path, res


def solve_candidate(spec: CandidateSpec, U: Configuration, V: Configuration,
                    params: Params) -> DiscretePath | None:
    """Best feasible realization of one (word, orientations, ks) candidate."""
    inst = _Instance(U, V, params)
    gens = {
        "B": lambda: _solve_B(inst),
        "A": lambda: _solve_A(inst, spec.orientations[0], spec.ks[0]),
        "AA": lambda: _solve_AA(inst, spec.orientations, spec.ks),
        "AB": lambda: _solve_AB(inst, spec.orientations[0], spec.ks[0], False),
        "BA": lambda: _solve_AB(inst, spec.orientations[0], spec.ks[0], True),
        "ABA": lambda: _solve_ABA(inst, spec.orientations, spec.ks),
        "AAA": lambda: _solve_AAA(inst, spec.orientations, spec.ks),
    }
    if spec.word not in gens:
        raise ValueError(f"not a true type word: {spec.word!r}")
    best = None
    for _, verts in gens[spec.word]():
        path = inst.finish(verts)
        if path is None:
            continue
        if best is None or path_length(path) < path_length(best):
            best = path
    return best


# ---------------------------------------------------------------------------
# independent check: randomized search

def oracle_search(U: Configuration, V: Configuration, params: Params,
                  n_vertices_max: int | None = None, budget: int = 4000,
                  rng=None) -> DiscretePath:
    """Best path found by perturb-and-polish search; an independent check on
    the planner, never the primary answer."""
    from .rewrite import shorten

    rng = np.random.default_rng(rng)
    seeds: list[DiscretePath] = []
    r = params.circumradius
    for factor in (1.0, 1.12, 1.3):
        try:
            Us = Configuration(scale(U.point, 1.0 / (r * factor)), U.heading)
            Vs = Configuration(scale(V.point, 1.0 / (r * factor)), V.heading)
            gamma = _smooth.dubins_solve(Us, Vs)
            if gamma.length <= params.theta:
                continue
            disc = _smooth.discretize(gamma, params.theta)
            verts = [scale(p, r * factor) for p in disc.vertices]
            verts[0], verts[-1] = U.point, V.point
            dedup = [verts[0]]
            for p in verts[1:]:
                if dist(dedup[-1], p) > 10.0 * params.tol_dedup:
                    dedup.append(p)
            dedup[-1] = V.point
            path = DiscretePath(U, V, tuple(dedup))
            if not validate(path, params):
                seeds.append(path)
        except Exception:
            continue
    if not seeds:
        straight = DiscretePath(U, V, (U.point, V.point))
        if not validate(straight, params):
            seeds.append(straight)
    if not seeds:
        raise PlannerError("oracle could not build any feasible seed")

    per = max(200, budget // (2 * len(seeds) + 6))
    best = None
    best_len = math.inf
    for s in seeds:
        polished, _ = shorten(s, params, budget=per)
        ln = path_length(polished)
        if ln < best_len:
            best, best_len = polished, ln

    for _ in range(6):
        sigma = params.ell * rng.uniform(0.01, 0.08)
        verts = list(best.vertices)
        for i in range(1, len(verts) - 1):
            verts[i] = (verts[i][0] + rng.normal(0.0, sigma),
                        verts[i][1] + rng.normal(0.0, sigma))
        try:
            jittered = best.with_vertices(verts)
        except ValueError:
            continue
        if validate(jittered, params):
            continue
        polished, _ = shorten(jittered, params, budget=per)
        ln = path_length(polished)
        if ln < best_len:
            best, best_len = polished, ln
    return best
