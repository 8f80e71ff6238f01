"""Compact convex hyperbolic polyhedra dual to spherical circle patterns.

Klein-model construction: each disk's boundary circle spans a Euclidean
plane x . n = cos(r) whose ball chord is the hyperbolic face plane, and
the polyhedron is the intersection of the half-spaces on the far side of
every disk.  Vertices come from 3x3 linear solves, one per pattern face.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np

from .errors import MalformedPattern, SingularTriple, VertexOutsideBall
from .verify import CirclePattern
from . import triples

PI = math.pi
COND_LIMIT = 1e12       # vertex solve condition number treated as singular
IDEAL_TOL = 1e-8        # |q| within this of 1 counts as an ideal vertex


@dataclass(frozen=True)
class HalfSpace:
    normal: Tuple[float, float, float]   # spherical center direction
    offset: float                        # cos of the cap radius

    def to_dict(self) -> dict:
        return {"normal": list(self.normal), "offset": self.offset}


@dataclass
class HyperbolicPolyhedron:
    half_spaces: List[HalfSpace]
    vertices: np.ndarray                 # Klein coordinates, one per pattern face
    faces: List[Tuple[int, ...]]         # vertex cycle per pattern vertex
    edges: List[Tuple[int, int]]         # pattern edge (u, v), canonical
    edge_vertices: List[Tuple[int, int]] # the two polyhedron vertices per edge
    dihedral: np.ndarray                 # interior dihedral angle per edge
    max_vertex_norm: float
    ideal_vertices: List[int] = field(default_factory=list)

    @property
    def vertex_count(self) -> int:
        return len(self.vertices)

    @property
    def face_count(self) -> int:
        return len(self.faces)

    def compactness_margin(self) -> float:
        return 1.0 - self.max_vertex_norm


def build_polyhedron(pattern: CirclePattern, allow_ideal: bool = False) -> HyperbolicPolyhedron:
    """Intersect the half-spaces of a verified interstice-free spherical
    pattern.

    Vertices within IDEAL_TOL of the unit sphere are rejected (the compact
    conclusion needs strict face sums); ``allow_ideal`` downgrades that to
    a diagnostic so boundary cases can still be inspected.
    """
    if pattern.mode != triples.SPHERICAL:
        raise MalformedPattern("polyhedron construction needs a spherical pattern")
    t = pattern.triangulation
    for eid, val in enumerate(pattern.theta.values):
        if not (0.0 < val < PI):
            raise MalformedPattern(
                f"edge {t.edges[eid]} has angle {val} outside (0, pi)"
            )
    normals = np.asarray(pattern.centers, dtype=float)
    offsets = np.cos(pattern.radii)

    vertices = np.empty((t.face_count, 3))
    ideal: List[int] = []
    for fid in range(t.face_count):
        a, b, c = t.faces[fid]
        M = normals[[a, b, c]]
        rhs = offsets[[a, b, c]]
        cond = np.linalg.cond(M)
        if not np.isfinite(cond) or cond > COND_LIMIT:
            raise SingularTriple(
                f"face {t.faces[fid]}: plane normals nearly dependent (cond {cond:.3g})"
            )
        q = np.linalg.solve(M, rhs)
        nq = float(np.linalg.norm(q))
        if nq >= 1.0 + IDEAL_TOL:
            raise VertexOutsideBall(
                f"vertex for face {t.faces[fid]} has norm {nq} > 1"
            )
        if nq >= 1.0 - IDEAL_TOL:
            if not allow_ideal:
                raise VertexOutsideBall(
                    f"vertex for face {t.faces[fid]} is ideal (|q| = {nq}); "
                    "pass allow_ideal to inspect the boundary case"
                )
            ideal.append(fid)
        vertices[fid] = q

    faces = [tuple(pattern.triangulation.vertex_faces[v]) for v in range(t.vertex_count)]

    edges = list(t.edges)
    edge_vertices = [tuple(t.edge_faces[eid]) for eid in range(t.edge_count)]
    dihedral = np.empty(t.edge_count)
    for eid, (u, v) in enumerate(t.edges):
        dihedral[eid] = _plane_dihedral(
            normals[u], offsets[u], normals[v], offsets[v]
        )

    return HyperbolicPolyhedron(
        half_spaces=[
            HalfSpace(tuple(normals[v]), float(offsets[v]))
            for v in range(t.vertex_count)
        ],
        vertices=vertices,
        faces=faces,
        edges=edges,
        edge_vertices=edge_vertices,
        dihedral=dihedral,
        max_vertex_norm=float(np.max(np.linalg.norm(vertices, axis=1))),
        ideal_vertices=ideal,
    )


def _plane_dihedral(n_i, c_i, n_j, c_j) -> float:
    """Interior dihedral angle between two face planes, from their unit
    spacelike Minkowski normals: cos(angle) = -<N_i, N_j>."""
    num = float(np.dot(n_i, n_j)) - c_i * c_j
    den = math.sqrt((1.0 - c_i * c_i) * (1.0 - c_j * c_j))
    val = -num / den
    return math.acos(min(1.0, max(-1.0, val)))


@dataclass
class PolyhedronReport:
    max_dihedral_err: float
    dihedral_inversive_gap: float
    convexity_ok: bool
    convexity_worst: float
    trivalent_ok: bool
    combinatorics_ok: bool
    euler_ok: bool
    passed: bool

    def to_dict(self) -> dict:
        return self.__dict__.copy()


def check_polyhedron(q: HyperbolicPolyhedron, pattern: CirclePattern,
                     tol: float = 1e-9) -> PolyhedronReport:
    """Dihedral accuracy, convexity slack, trivalence and dual counts."""
    t = pattern.triangulation
    target = pattern.theta.array()
    dihedral_err = float(np.max(np.abs(q.dihedral - target)))

    # same angle through the pattern's inversive distances (independent path)
    gap = 0.0
    for eid, (u, v) in enumerate(t.edges):
        inv = triples.inversive_distance(
            triples.SPHERICAL,
            pattern.centers[u], pattern.radii[u],
            pattern.centers[v], pattern.radii[v],
        )
        gap = max(gap, abs(math.cos(q.dihedral[eid]) - inv))

    normals = np.array([h.normal for h in q.half_spaces])
    offsets = np.array([h.offset for h in q.half_spaces])
    slack = offsets[None, :] - q.vertices @ normals.T
    worst = float(np.min(slack))
    convex_ok = worst >= -1e-9

    incidence = [0] * q.vertex_count
    for cyc in q.faces:
        for vid in cyc:
            incidence[vid] += 1
    trivalent_ok = all(k == 3 for k in incidence)

    combinatorics_ok = all(
        len(q.faces[v]) == t.degree(v) for v in range(t.vertex_count)
    )
    euler_ok = (
        q.vertex_count - len(q.edges) + len(q.faces) == 2
        and q.vertex_count == t.face_count
        and len(q.faces) == t.vertex_count
    )
    passed = (
        dihedral_err <= tol and convex_ok and trivalent_ok and combinatorics_ok
        and euler_ok
    )
    return PolyhedronReport(
        max_dihedral_err=dihedral_err,
        dihedral_inversive_gap=gap,
        convexity_ok=convex_ok,
        convexity_worst=worst,
        trivalent_ok=trivalent_ok,
        combinatorics_ok=combinatorics_ok,
        euler_ok=euler_ok,
        passed=passed,
    )


def export_obj(q: HyperbolicPolyhedron) -> bytes:
    """Klein-model mesh in OBJ text form, deterministic ordering."""
    lines = ["# klein-model hyperbolic polyhedron"]
    for v in q.vertices:
        lines.append(f"v {v[0]!r} {v[1]!r} {v[2]!r}")
    for cyc in q.faces:
        lines.append("f " + " ".join(str(i + 1) for i in cyc))
    return ("\n".join(lines) + "\n").encode()


def polyhedron_to_dict(q: HyperbolicPolyhedron) -> dict:
    return {
        "half_spaces": [h.to_dict() for h in q.half_spaces],
        "vertices": [[float(x) for x in v] for v in q.vertices],
        "faces": [list(c) for c in q.faces],
        "edges": [list(e) for e in q.edges],
        "edge_vertices": [list(e) for e in q.edge_vertices],
        "dihedral": [float(d) for d in q.dihedral],
        "max_vertex_norm": q.max_vertex_norm,
        "ideal_vertices": list(q.ideal_vertices),
    }
