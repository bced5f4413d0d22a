"""Minimal SVG rendering of paths and their arc/bridge structure."""

from __future__ import annotations

from .geometry import add, scale, sub
from .model import DiscretePath, Params
from .smooth import SmoothPath
from .structure import PathStructure


def _viewbox(points, margin_frac=0.05):
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    w = max(x1 - x0, 1e-6)
    h = max(y1 - y0, 1e-6)
    m = margin_frac * max(w, h)
    return x0 - m, y0 - m, w + 2 * m, h + 2 * m


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def _polyline(points, color, width, dashed=False):
    pts = " ".join(f"{_fmt(p[0])},{_fmt(-p[1])}" for p in points)
    dash = ' stroke-dasharray="0.12 0.08"' if dashed else ""
    return (f'<polyline points="{pts}" fill="none" stroke="{color}" '
            f'stroke-width="{width}" stroke-linecap="round"{dash}/>')


def render_path_svg(path: DiscretePath, params: Params,
                    structure: PathStructure | None = None) -> str:
    """SVG picture of a discrete path: arcs highlighted, bridges dashed,
    boundary headings as small arrows."""
    pre = sub(path.start.point, scale(path.start.heading, params.ell))
    post = add(path.end.point, scale(path.end.heading, params.ell))
    pts = [pre, *path.vertices, post]
    x, y, w, h = _viewbox(pts)
    stroke = 0.012 * max(w, h)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" '
        f'viewBox="{_fmt(x)} {_fmt(-y - h)} {_fmt(w)} {_fmt(h)}">',
        _polyline([pre, path.vertices[0]], "#bbbbbb", stroke * 0.7, dashed=True),
        _polyline([path.vertices[-1], post], "#bbbbbb", stroke * 0.7, dashed=True),
        _polyline(path.vertices, "#1f3b57", stroke),
    ]
    if structure is not None:
        for arc in structure.arcs:
            seg = _structure_points(path, arc.start_s, arc.end_s)
            parts.append(_polyline(seg, "#d9822b", stroke * 1.4))
        for b in structure.bridges:
            seg = _structure_points(path, b.start_s, b.end_s)
            parts.append(_polyline(seg, "#2b7bd9", stroke * 1.1, dashed=True))
    for p in path.vertices:
        parts.append(f'<circle cx="{_fmt(p[0])}" cy="{_fmt(-p[1])}" '
                     f'r="{_fmt(stroke)}" fill="#1f3b57"/>')
    parts.append("</svg>")
    return "\n".join(parts)


def _structure_points(path: DiscretePath, s0: float, s1: float):
    from .geometry import dist, lerp
    pts = []
    acc = 0.0
    v = path.vertices
    for i in range(len(v) - 1):
        ln = dist(v[i], v[i + 1])
        lo, hi = acc, acc + ln
        if hi < s0 or lo > s1 or ln == 0.0:
            acc = hi
            continue
        a = max(lo, s0)
        b = min(hi, s1)
        pa = lerp(v[i], v[i + 1], (a - lo) / ln)
        pb = lerp(v[i], v[i + 1], (b - lo) / ln)
        if not pts or pts[-1] != pa:
            pts.append(pa)
        pts.append(pb)
        acc = hi
    return pts


def render_smooth_svg(gamma: SmoothPath, samples: int = 256,
                      overlay: DiscretePath | None = None) -> str:
    """SVG of a smooth path (sampled) with an optional discrete overlay."""
    pts = [gamma.eval(t * gamma.length / samples)[0] for t in range(samples + 1)]
    every = list(pts) + (list(overlay.vertices) if overlay is not None else [])
    x, y, w, h = _viewbox(every)
    stroke = 0.012 * max(w, h)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" '
        f'viewBox="{_fmt(x)} {_fmt(-y - h)} {_fmt(w)} {_fmt(h)}">',
        _polyline(pts, "#777777", stroke),
    ]
    if overlay is not None:
        parts.append(_polyline(overlay.vertices, "#1f3b57", stroke * 0.8, dashed=True))
    parts.append("</svg>")
    return "\n".join(parts)
