"""JSON path-exchange documents.

The on-disk surface uses degrees for angles and either ``n_sides`` or
``theta_degrees`` for the turn bound; everything is radians internally.
"""

from __future__ import annotations

import json
import math
from typing import Any

from .geometry import from_angle, angle_of
from .model import Configuration, DiscretePath, Params
from .structure import PathStructure

VERSION = 1


class DocumentError(ValueError):
    """Malformed or schema-invalid path document."""


def params_to_json(params: Params) -> dict:
    return {"n_sides": params.n_sides, "ell": params.ell}


def params_from_json(obj: Any) -> Params:
    if not isinstance(obj, dict):
        raise DocumentError("params must be an object")
    ell = obj.get("ell")
    if not isinstance(ell, (int, float)) or not ell > 0:
        raise DocumentError("params.ell must be a positive number")
    if "n_sides" in obj:
        n = obj["n_sides"]
        if not isinstance(n, int) or n < 4:
            raise DocumentError("params.n_sides must be an integer >= 4")
        return Params.from_sides(n, float(ell))
    if "theta_degrees" in obj:
        theta = math.radians(float(obj["theta_degrees"]))
        return Params(theta=theta, ell=float(ell))
    raise DocumentError("params needs n_sides or theta_degrees")


def _config_to_json(c: Configuration) -> dict:
    return {"point": [c.point[0], c.point[1]],
            "heading_degrees": math.degrees(angle_of(c.heading))}


def _config_from_json(obj: Any, name: str) -> Configuration:
    if not isinstance(obj, dict):
        raise DocumentError(f"{name} must be an object")
    pt = obj.get("point")
    if (not isinstance(pt, list) or len(pt) != 2
            or not all(isinstance(x, (int, float)) for x in pt)):
        raise DocumentError(f"{name}.point must be [x, y]")
    deg = obj.get("heading_degrees")
    if not isinstance(deg, (int, float)):
        raise DocumentError(f"{name}.heading_degrees must be a number")
    return Configuration((float(pt[0]), float(pt[1])),
                         from_angle(math.radians(float(deg))))


def structure_to_json(st: PathStructure) -> dict:
    return {
        "type": st.type_word,
        "arcs": [{
            "start": list(a.start_pt),
            "end": list(a.end_pt),
            "orientation": a.orientation.name.lower(),
            "edge_count": a.edge_count,
            "start_s": a.start_s,
            "end_s": a.end_s,
        } for a in st.arcs],
        "bridges": [{
            "start": list(b.start_pt),
            "end": list(b.end_pt),
            "host_edge": b.host_edge,
            "start_s": b.start_s,
            "end_s": b.end_s,
        } for b in st.bridges],
    }


def path_to_json(path: DiscretePath, params: Params,
                 structure: PathStructure | None = None,
                 trace: list | None = None) -> dict:
    doc = {
        "version": VERSION,
        "params": params_to_json(params),
        "start": _config_to_json(path.start),
        "end": _config_to_json(path.end),
        "vertices": [[p[0], p[1]] for p in path.vertices],
    }
    if structure is not None:
        doc["structure"] = structure_to_json(structure)
    if trace is not None:
        doc["trace"] = trace
    return doc


def path_from_json(doc: Any) -> tuple[DiscretePath, Params]:
    if not isinstance(doc, dict):
        raise DocumentError("document must be a JSON object")
    if doc.get("version") != VERSION:
        raise DocumentError(f"unsupported document version {doc.get('version')!r}")
    params = params_from_json(doc.get("params"))
    start = _config_from_json(doc.get("start"), "start")
    end = _config_from_json(doc.get("end"), "end")
    verts = doc.get("vertices")
    if not isinstance(verts, list) or not verts:
        raise DocumentError("vertices must be a non-empty list")
    pts = []
    for i, v in enumerate(verts):
        if (not isinstance(v, list) or len(v) != 2
                or not all(isinstance(x, (int, float)) for x in v)):
            raise DocumentError(f"vertices[{i}] must be [x, y]")
        pts.append((float(v[0]), float(v[1])))
    # anchor the boundary configurations on the actual vertices
    start = Configuration(pts[0], start.heading)
    end = Configuration(pts[-1], end.heading)
    try:
        path = DiscretePath(start, end, tuple(pts))
    except ValueError as exc:
        raise DocumentError(str(exc)) from exc
    return path, params


def save(doc: dict, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def load(path: str) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)
