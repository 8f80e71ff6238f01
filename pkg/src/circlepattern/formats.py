"""JSON input/output for triangulations, angle data, and patterns.

Schemas (all angles in radians, edge keys canonicalized (min, max)):

  triangulation: {"vertices": n, "faces": [[a, b, c], ...]}
  theta:         {"theta": [{"edge": [i, j], "value": v}, ...]}
  polyhedron:    {"vertices": n, "faces": [[cycle ...], ...]}
  pattern:       {"mode": "euclidean" | "spherical",
                  "marked_face": [a, b, c] | null,
                  "circles": [{"center": [...], "radius": r}, ...],
                  "residuals": {...},
                  "triangulation": {...}, "theta": {...}}
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Dict, Optional, Tuple, Union

import numpy as np

from .conditions import AngleAssignment
from .errors import UsageError
from .triangulation import Triangulation, build_triangulation, canonical_edge
from .verify import CirclePattern
from . import triples

Source = Union[str, Path, dict]


def _load(source: Source) -> dict:
    if isinstance(source, dict):
        return source
    path = Path(source)
    try:
        return json.loads(path.read_text())
    except FileNotFoundError:
        raise UsageError(f"no such file: {path}")
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON ({exc})")


def dumps(obj: dict) -> str:
    """Deterministic JSON text: sorted keys, shortest round-trip floats."""
    return json.dumps(obj, sort_keys=True, indent=1)


def load_triangulation(source: Source) -> Triangulation:
    data = _load(source)
    if "faces" not in data:
        raise UsageError("triangulation JSON needs a 'faces' key")
    return build_triangulation(data["faces"], vertex_count=data.get("vertices"))


def triangulation_to_dict(t: Triangulation) -> dict:
    return {"vertices": t.vertex_count, "faces": [list(f) for f in t.faces]}


def load_polyhedron(source: Source):
    data = _load(source)
    if "faces" not in data:
        raise UsageError("polyhedron JSON needs a 'faces' key")
    return [tuple(int(v) for v in cycle) for cycle in data["faces"]]


def load_theta_map(source: Source) -> Dict[Tuple[int, int], float]:
    data = _load(source)
    if "theta" not in data:
        raise UsageError("theta JSON needs a 'theta' key")
    out: Dict[Tuple[int, int], float] = {}
    for item in data["theta"]:
        e = canonical_edge(int(item["edge"][0]), int(item["edge"][1]))
        if e in out:
            raise UsageError(f"edge {list(e)} specified twice")
        out[e] = float(item["value"])
    return out


def load_theta(t: Triangulation, source: Source) -> AngleAssignment:
    try:
        return AngleAssignment.from_dict(t, load_theta_map(source))
    except ValueError as exc:
        raise UsageError(str(exc))


def theta_to_dict(theta: AngleAssignment) -> dict:
    t = theta.triangulation
    return {
        "theta": [
            {"edge": list(e), "value": theta.values[i]} for i, e in enumerate(t.edges)
        ]
    }


def pattern_to_dict(p: CirclePattern, residuals: Optional[dict] = None) -> dict:
    circles = []
    for v in range(len(p.radii)):
        if p.mode == triples.EUCLIDEAN:
            center = [p.centers[v].real, p.centers[v].imag]
        else:
            center = [float(x) for x in p.centers[v]]
        circles.append({"center": center, "radius": float(p.radii[v])})
    return {
        "mode": p.mode,
        "marked_face": list(p.marked_face) if p.marked_face is not None else None,
        "circles": circles,
        "residuals": residuals or {},
        "triangulation": triangulation_to_dict(p.triangulation),
        "theta": theta_to_dict(p.theta),
    }


def load_pattern(source: Source) -> CirclePattern:
    data = _load(source)
    for key in ("mode", "circles", "triangulation", "theta"):
        if key not in data:
            raise UsageError(f"pattern JSON needs a {key!r} key")
    t = load_triangulation(data["triangulation"])
    theta = load_theta(t, data["theta"])
    mode = data["mode"]
    radii = np.array([c["radius"] for c in data["circles"]], dtype=float)
    if mode == triples.EUCLIDEAN:
        centers = np.array(
            [complex(c["center"][0], c["center"][1]) for c in data["circles"]]
        )
    elif mode == triples.SPHERICAL:
        centers = np.array([c["center"] for c in data["circles"]], dtype=float)
    else:
        raise UsageError(f"unknown mode {mode!r}")
    marked = data.get("marked_face")
    return CirclePattern(
        triangulation=t,
        theta=theta,
        mode=mode,
        centers=centers,
        radii=radii,
        marked_face=tuple(marked) if marked else None,
    )
