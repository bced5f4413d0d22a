import math

import numpy as np
import pytest

from ddgeo.geometry import (
    DegenerateGeometryError,
    add,
    from_angle,
    line_intersection,
    scale,
    sub,
    turn_angle,
    unit,
)
from ddgeo.model import (
    Configuration,
    DiscretePath,
    EdgeClass,
    Params,
    ViolationKind,
    augmented,
    classify_edge,
    is_inflection,
    path_length,
    reverse,
    validate,
    vertex_turns,
)
from ddgeo.rewrite import RewriteRule, RuleKind, apply as apply_rule
from ddgeo.structure import canonicalize

from gen import build_path, random_feasible_path

P8 = Params.from_sides(8, 1.0)
TH = P8.theta


def ngon_path(n, ell=1.0, sides=None):
    params = Params.from_sides(n, ell)
    sides = sides if sides is not None else n
    turns = [0.0] + [params.theta] * (sides - 1) + [0.0]
    return build_path(turns, [ell] * sides), params


def test_params_validation():
    with pytest.raises(ValueError):
        Params(theta=1.0, ell=1.0)  # does not divide 2 pi
    with pytest.raises(ValueError):
        Params.from_sides(3, 1.0)   # theta > pi/2
    with pytest.raises(ValueError):
        Params.from_sides(8, -1.0)
    p = Params.from_sides(8, 2.0)
    assert p.n_sides == 8
    assert p.circumradius == pytest.approx(1.0 / math.sin(p.theta / 2.0))


def test_classify_edge_examples():
    assert classify_edge(1.0, P8) is EdgeClass.NORMAL
    assert classify_edge(0.5, P8) is EdgeClass.SHORT
    assert classify_edge(3.0, P8) is EdgeClass.LONG
    with pytest.raises(DegenerateGeometryError):
        classify_edge(0.0, P8)


def test_classify_edge_partitions():
    for ln in np.linspace(1e-6, 5.0, 997):
        hits = [classify_edge(float(ln), P8)]
        assert len(hits) == 1  # total function, one class per length


def test_is_inflection_zigzag():
    path = build_path([0.0, 0.3, -0.5, 0.0],
                      [1.0, math.hypot(1.0, 0.3), 1.0])
    assert is_inflection(path, 1)


def test_is_inflection_convex_and_straight():
    convex = build_path([0.0, 0.4, 0.4, 0.0], [1.0, 1.0, 1.0])
    assert not any(is_inflection(convex, j) for j in range(3))
    straight = build_path([0.0, 0.0, 0.0], [1.0, 1.0])
    assert not is_inflection(straight, 0)
    with pytest.raises(IndexError):
        is_inflection(straight, 5)


def test_augmented_examples():
    u = Configuration((0.0, 0.0), (1.0, 0.0))
    single = DiscretePath(u, u, ((0.0, 0.0),))
    assert augmented(single, P8) == [(-1.0, 0.0), (0.0, 0.0), (1.0, 0.0)]

    two = DiscretePath(u, Configuration((5.0, 0.0), (1.0, 0.0)),
                       ((0.0, 0.0), (5.0, 0.0)))
    assert augmented(two, P8) == [(-1.0, 0.0), (0.0, 0.0), (5.0, 0.0), (6.0, 0.0)]

    p2 = Params.from_sides(8, 2.0)
    up = Configuration((0.0, 0.0), (0.0, 1.0))
    vert = DiscretePath(up, Configuration((0.0, 3.0), (0.0, 1.0)),
                        ((0.0, 0.0), (0.0, 3.0)))
    assert augmented(vert, p2)[0] == (0.0, -2.0)


def test_validate_straight():
    path = build_path([0.0, 0.0], [5.0])
    assert validate(path, P8) == []


def test_validate_regular_ngon():
    for n in (8, 12, 360):
        path, params = ngon_path(n)
        assert validate(path, params) == []


def test_validate_turn_violation_magnitude():
    turns = [0.0, TH, TH + 0.1, TH, 0.0]
    path = build_path(turns, [1.0] * 4)
    vs = validate(path, P8)
    assert len(vs) == 1
    v = vs[0]
    assert v.kind is ViolationKind.TURN
    assert v.location == 2
    assert v.magnitude == pytest.approx(0.1, abs=1e-9)


def test_validate_adjacent_shorts():
    path = build_path([0.0, 0.1, 0.1, 0.0], [1.0, 0.5, 0.5])
    vs = validate(path, P8)
    assert any(v.kind is ViolationKind.LENGTH for v in vs)


def test_validate_turn_over_length():
    # short non-inflection edge whose neighbor turns sum past theta
    turns = [0.0, 0.8 * TH, 0.8 * TH, 0.0]
    path = build_path(turns, [1.0, 0.5, 1.0])
    vs = validate(path, P8)
    kinds = {v.kind for v in vs}
    assert ViolationKind.TURN_OVER_LENGTH in kinds
    [v] = [v for v in vs if v.kind is ViolationKind.TURN_OVER_LENGTH]
    assert v.magnitude == pytest.approx(0.6 * TH, abs=1e-9)


def test_validate_short_inflection_exempt():
    turns = [0.0, 0.8 * TH, -0.8 * TH, 0.0]
    path = build_path(turns, [1.0, 0.5, 1.0])
    assert validate(path, P8) == []


def test_validate_terminal_short_edge_against_pre_edge():
    # short first edge: the pre-edge acts as its non-short neighbor
    bad = build_path([0.7 * TH, 0.7 * TH, 0.0], [0.5, 1.0])
    vs = validate(bad, P8)
    assert any(v.kind is ViolationKind.TURN_OVER_LENGTH for v in vs)
    ok = build_path([0.7 * TH, -0.7 * TH, 0.0], [0.5, 1.0])
    assert validate(ok, P8) == []


def test_validate_pre_post_kinds():
    path = build_path([TH + 0.2, 0.0], [2.0])
    vs = validate(path, P8)
    assert vs[0].kind is ViolationKind.PRE_EDGE
    path2 = build_path([0.0, TH + 0.2], [2.0])
    vs2 = validate(path2, P8)
    assert vs2[0].kind is ViolationKind.POST_EDGE


def test_validate_degenerate_vertices():
    u = Configuration((0.0, 0.0), (1.0, 0.0))
    path = DiscretePath(u, Configuration((1.0, 0.0), (1.0, 0.0)),
                        ((0.0, 0.0), (0.0, 0.0), (1.0, 0.0)))
    with pytest.raises(DegenerateGeometryError):
        validate(path, P8)


def test_validate_opposite_heading_point_path():
    u = Configuration((0.0, 0.0), (1.0, 0.0))
    v = Configuration((0.0, 0.0), (-1.0, 0.0))
    path = DiscretePath(u, v, ((0.0, 0.0),))
    vs = validate(path, P8)  # accepted as input, infeasible for theta <= pi/2
    assert len(vs) == 1 and vs[0].magnitude == pytest.approx(math.pi - TH)


def test_validate_deterministic():
    rng = np.random.default_rng(3)
    for _ in range(20):
        p = random_feasible_path(P8, rng)
        assert validate(p, P8) == validate(p, P8) == []


def test_path_length_examples():
    assert path_length(build_path([0.0, 0.0], [5.0])) == pytest.approx(5.0)
    u = Configuration((0.0, 0.0), (1.0, 0.0))
    assert path_length(DiscretePath(u, u, ((0.0, 0.0),))) == 0.0
    square3 = build_path([0.0, math.pi / 2, math.pi / 2, 0.0], [1.0, 1.0, 1.0])
    assert path_length(square3) == pytest.approx(3.0)


def test_reverse_preserves_feasibility_and_length():
    rng = np.random.default_rng(4)
    for _ in range(25):
        p = random_feasible_path(P8, rng)
        r = reverse(p)
        assert validate(r, P8) == []
        assert path_length(r) == pytest.approx(path_length(p))
        assert reverse(r).vertices == p.vertices


def test_subpath_slicing_of_canonical_paths():
    # any subpath between vertices whose outer edges are normal-or-long,
    # with boundary headings taken from those edges, stays feasible
    rng = np.random.default_rng(5)
    checked = 0
    while checked < 60:
        p = random_feasible_path(P8, rng)
        cp = canonicalize(p, P8)
        v = cp.vertices
        if len(v) < 4:
            continue
        for i in range(1, len(v) - 2):
            for j in range(i + 1, len(v) - 1):
                lead = sub(v[i], v[i - 1])
                tail = sub(v[j + 1], v[j])
                if math.hypot(*lead) < P8.ell - P8.tol_len:
                    continue
                if math.hypot(*tail) < P8.ell - P8.tol_len:
                    continue
                sliced = DiscretePath(
                    Configuration(v[i], unit(lead)),
                    Configuration(v[j], unit(tail)),
                    v[i:j + 1])
                assert validate(sliced, P8) == []
                checked += 1


def test_long_long_shortcut_soundness():
    # a feasible path with two adjacent long edges admits the corner shortcut
    rng = np.random.default_rng(6)
    for _ in range(20):
        t = rng.uniform(0.2, 1.0) * TH
        lengths = [float(rng.uniform(1.3, 3.0)), float(rng.uniform(1.3, 3.0))]
        path = build_path([0.0, t, 0.0], lengths)
        assert validate(path, P8) == []
        out = apply_rule(path, RewriteRule(RuleKind.LONG_LONG_SHORTCUT, 0.0),
                         (0,), P8)
        assert validate(out, P8) == []
        assert path_length(out) < path_length(path)


def test_turn_over_length_matches_supporting_line_angle():
    # the signed-turn sum equals the supplementary angle at the intersection
    # of the neighbor supporting lines, for short non-inflection edges
    rng = np.random.default_rng(7)
    for _ in range(50):
        t_a = float(rng.uniform(0.05, 0.45)) * TH
        t_b = float(rng.uniform(0.05, 0.45)) * TH
        base = float(rng.uniform(0, 2 * math.pi))
        path = build_path([0.0, t_a, t_b, 0.0], [1.2, 0.6, 1.2],
                          base_angle=base)
        v = path.vertices
        a, b = v[1], v[2]
        c = line_intersection(a, sub(a, v[0]), b, sub(v[3], b))
        assert c is not None
        ang_acb = abs(turn_angle(sub(a, c), sub(b, c)))
        supplement = math.pi - ang_acb
        assert supplement == pytest.approx(t_a + t_b, abs=1e-9)
