"""Oriented triangulations of the 2-sphere and their circuit combinatorics.

Vertices are dense integers 0..n-1; edges are canonicalized as (min, max)
pairs and addressed by dense edge ids.  A Triangulation is immutable after
construction and all queries are read-only.
"""
from __future__ import annotations

import itertools
from collections import defaultdict, deque
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

from .errors import (
    DegenerateFace,
    EmptySubset,
    FullSubset,
    InconsistentOrientation,
    LimitExceeded,
    NonManifold,
    NotASphere,
    NotTrivalent,
)

Edge = Tuple[int, int]
Face = Tuple[int, int, int]

DEFAULT_CYCLE_CAP = 10 ** 6


def canonical_edge(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Triangulation:
    """Validated oriented simplicial triangulation of the 2-sphere."""

    vertex_count: int
    faces: Tuple[Face, ...]
    edges: Tuple[Edge, ...]
    edge_index: Dict[Edge, int]
    edge_faces: Tuple[Tuple[int, int], ...]
    vertex_faces: Tuple[Tuple[int, ...], ...]   # cyclic order around the vertex
    link_cycles: Tuple[Tuple[int, ...], ...]    # neighbor cycle around the vertex
    orientation_flipped: bool

    # -- basic queries ------------------------------------------------

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @property
    def face_count(self) -> int:
        return len(self.faces)

    def edge_id(self, u: int, v: int) -> int:
        return self.edge_index[canonical_edge(u, v)]

    def has_edge(self, u: int, v: int) -> bool:
        return canonical_edge(u, v) in self.edge_index

    def neighbors(self, v: int) -> Tuple[int, ...]:
        return self.link_cycles[v]

    def degree(self, v: int) -> int:
        return len(self.link_cycles[v])

    def face_edge_ids(self, fid: int) -> Tuple[int, int, int]:
        a, b, c = self.faces[fid]
        return (self.edge_id(b, c), self.edge_id(c, a), self.edge_id(a, b))

    def face_id_of(self, verts: Sequence[int]) -> Optional[int]:
        want = frozenset(verts)
        for fid, f in enumerate(self.faces):
            if frozenset(f) == want:
                return fid
        return None

    def is_face(self, verts: Sequence[int]) -> bool:
        return self.face_id_of(verts) is not None

    def degree_sequence(self) -> Tuple[int, ...]:
        return tuple(sorted(self.degree(v) for v in range(self.vertex_count)))


def build_triangulation(faces: Sequence[Sequence[int]], vertex_count: Optional[int] = None) -> Triangulation:
    """Validate a face list and derive all incidence structure.

    The input winding is not trusted: orientation is repaired by a BFS over
    face adjacency, and a flag records whether any face was flipped.
    """
    if not faces:
        raise DegenerateFace("empty face list")
    clean: List[Face] = []
    for f in faces:
        if len(f) != 3:
            raise DegenerateFace(f"face {tuple(f)} is not a triple")
        a, b, c = (int(x) for x in f)
        if len({a, b, c}) != 3:
            raise DegenerateFace(f"face {(a, b, c)} has repeated vertices")
        if min(a, b, c) < 0:
            raise DegenerateFace(f"face {(a, b, c)} has negative vertex ids")
        clean.append((a, b, c))
    n = max(max(f) for f in clean) + 1
    if vertex_count is not None:
        if vertex_count < n:
            raise DegenerateFace("vertex_count smaller than largest face index")
        n = vertex_count

    edge_to_faces: Dict[Edge, List[int]] = defaultdict(list)
    for fid, (a, b, c) in enumerate(clean):
        for u, v in ((a, b), (b, c), (c, a)):
            edge_to_faces[canonical_edge(u, v)].append(fid)
    for e, fs in edge_to_faces.items():
        if len(fs) != 2:
            raise NonManifold(f"edge {e} lies in {len(fs)} faces")

    oriented = _repair_orientation(clean, edge_to_faces)
    flipped = oriented != clean

    # Euler characteristic must be the sphere's
    m = len(edge_to_faces)
    chi = n - m + len(oriented)
    if chi != 2:
        raise NotASphere(f"V - E + F = {chi}, expected 2")

    edges = tuple(sorted(edge_to_faces))
    edge_index = {e: i for i, e in enumerate(edges)}
    edge_faces = tuple(tuple(sorted(edge_to_faces[e])) for e in edges)

    vertex_faces, link_cycles = _vertex_stars(n, oriented, edge_to_faces)

    return Triangulation(
        vertex_count=n,
        faces=tuple(oriented),
        edges=edges,
        edge_index=edge_index,
        edge_faces=edge_faces,
        vertex_faces=vertex_faces,
        link_cycles=link_cycles,
        orientation_flipped=flipped,
    )


def _repair_orientation(faces: List[Face], edge_to_faces) -> List[Face]:
    """Flip faces so every edge is traversed once in each direction."""
    flip = [None] * len(faces)
    for root in range(len(faces)):
        if flip[root] is not None:
            continue
        flip[root] = False
        queue = deque([root])
        while queue:
            fid = queue.popleft()
            a, b, c = faces[fid]
            directed = ((a, b), (b, c), (c, a))
            if flip[fid]:
                directed = tuple((v, u) for (u, v) in directed)
            for (u, v) in directed:
                for gid in edge_to_faces[canonical_edge(u, v)]:
                    if gid == fid:
                        continue
                    ga, gb, gc = faces[gid]
                    gdir = ((ga, gb), (gb, gc), (gc, ga))
                    # the neighbor must traverse (v, u); it traverses (u, v)
                    # in its stored winding iff (u, v) in gdir
                    needs_flip = (u, v) in gdir
                    if flip[gid] is None:
                        flip[gid] = needs_flip
                        queue.append(gid)
                    elif flip[gid] != needs_flip:
                        raise InconsistentOrientation(
                            f"faces {fid} and {gid} cannot be oriented consistently"
                        )
    out = []
    for fid, (a, b, c) in enumerate(faces):
        out.append((a, c, b) if flip[fid] else (a, b, c))
    return out


def _vertex_stars(n, faces, edge_to_faces):
    """Cyclic face and neighbor orders around each vertex.

    Walking the star also proves every vertex link is a single cycle.
    """
    incident: List[List[int]] = [[] for _ in range(n)]
    for fid, f in enumerate(faces):
        for v in f:
            incident[v].append(fid)
    vertex_faces = []
    link_cycles = []
    for v in range(n):
        fs = incident[v]
        if not fs:
            raise NonManifold(f"vertex {v} has no incident faces")
        start = min(fs)
        order = [start]
        a, b = _others(faces[start], v)
        first, cur = a, b
        ring = [a]
        while cur != first:
            ring.append(cur)
            e = canonical_edge(v, cur)
            nxts = [g for g in edge_to_faces[e] if g != order[-1]]
            if len(nxts) != 1:
                raise NonManifold(f"broken star at vertex {v}")
            nxt = nxts[0]
            if nxt in order:
                raise NonManifold(f"vertex {v} link is not a single cycle")
            order.append(nxt)
            x, y = _others(faces[nxt], v)
            cur = y if x == cur else x
        if len(order) != len(fs):
            raise NonManifold(f"vertex {v} link is not a single cycle")
        vertex_faces.append(tuple(order))
        link_cycles.append(tuple(ring))
    return tuple(vertex_faces), tuple(link_cycles)


def _others(face: Face, v: int) -> Tuple[int, int]:
    """The two vertices after v in the face's cyclic order."""
    a, b, c = face
    if v == a:
        return b, c
    if v == b:
        return c, a
    return a, b


# ---------------------------------------------------------------------------
# circuits
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Circuit:
    """A closed simple cycle or open two-edge arc in the 1-skeleton."""

    vertices: Tuple[int, ...]
    edges: Tuple[int, ...]
    kind: str  # "closed" or "arc"
    is_face_boundary: bool = False
    is_two_triangle_boundary: bool = False
    separates_vertices: bool = False
    is_prismatic: bool = False
    is_whitehead: bool = False
    is_essential_whitehead: bool = False
    is_homologically_non_adjacent: bool = False

    def __len__(self) -> int:
        return len(self.edges)


def _canonical_cycle(verts: Tuple[int, ...]) -> Tuple[int, ...]:
    """Lexicographically smallest rotation/reflection of a vertex cycle."""
    best = None
    k = len(verts)
    for seq in (verts, tuple(reversed(verts))):
        for s in range(k):
            cand = seq[s:] + seq[:s]
            if best is None or cand < best:
                best = cand
    return best


def enumerate_simple_cycles(
    t: Triangulation, max_len: int, cap: int = DEFAULT_CYCLE_CAP
) -> List[Circuit]:
    """All simple closed cycles of length <= max_len, with classification.

    DFS anchored at each minimum vertex, deduplicated by canonical form;
    raises LimitExceeded past ``cap`` cycles.
    """
    if max_len < 3:
        raise ValueError("max_len must be at least 3")
    seen: Set[Tuple[int, ...]] = set()
    cycles: List[Tuple[int, ...]] = []
    for s in range(t.vertex_count):
        stack: List[Tuple[int, ...]] = [(s,)]
        while stack:
            path = stack.pop()
            last = path[-1]
            for w in t.neighbors(last):
                if w == s and len(path) >= 3 and path[1] < path[-1]:
                    canon = _canonical_cycle(path)
                    if canon not in seen:
                        seen.add(canon)
                        cycles.append(canon)
                        if len(cycles) > cap:
                            raise LimitExceeded(f"more than {cap} cycles")
                elif w > s and w not in path and len(path) < max_len:
                    stack.append(path + (w,))
    cycles.sort(key=lambda c: (len(c), c))
    return [_classify_cycle(t, c) for c in cycles]


def _cycle_edge_ids(t: Triangulation, verts: Tuple[int, ...]) -> Tuple[int, ...]:
    k = len(verts)
    return tuple(t.edge_id(verts[i], verts[(i + 1) % k]) for i in range(k))


def _classify_cycle(t: Triangulation, verts: Tuple[int, ...]) -> Circuit:
    k = len(verts)
    eids = _cycle_edge_ids(t, verts)
    facial = k == 3 and t.is_face(verts)

    two_tri = False
    essential = False
    if k == 4:
        for (p, q, r, s) in ((0, 1, 2, 3), (1, 2, 3, 0)):
            d0, d2 = verts[p], verts[r]
            if t.has_edge(d0, d2) and t.is_face((verts[p], verts[q], verts[r])) and t.is_face(
                (verts[p], verts[r], verts[s])
            ):
                two_tri = True
        if two_tri:
            # essential iff some splitting into two arcs has non-adjacent
            # endpoints, i.e. some diagonal of the quadrilateral is a non-edge
            essential = not t.has_edge(verts[0], verts[2]) or not t.has_edge(
                verts[1], verts[3]
            )

    if k == 3:
        # a non-facial 3-cycle on a sphere triangulation with |V| > 4
        # always separates (Jordan); with |V| = 4 every 3-cycle is facial
        separates = (not facial) and t.vertex_count > 4
    else:
        separates = _separates_by_flood(t, verts, eids)

    incident = set()
    for e in eids:
        incident.update(t.edge_faces[e])
    prismatic = len(incident) == 2 * k

    return Circuit(
        vertices=verts,
        edges=eids,
        kind="closed",
        is_face_boundary=facial,
        is_two_triangle_boundary=two_tri,
        separates_vertices=separates,
        is_prismatic=prismatic,
        is_whitehead=(k == 4 and two_tri),
        is_essential_whitehead=essential,
    )


def _separates_by_flood(t: Triangulation, verts, eids) -> bool:
    """Two-sided face flood fill across edges not on the cycle."""
    blocked = set(eids)
    comp = [-1] * t.face_count
    sides: List[Set[int]] = []
    for root in range(t.face_count):
        if comp[root] != -1:
            continue
        cid = len(sides)
        members: Set[int] = set()
        comp[root] = cid
        queue = deque([root])
        while queue:
            fid = queue.popleft()
            members.update(t.faces[fid])
            for e in t.face_edge_ids(fid):
                if e in blocked:
                    continue
                for gid in t.edge_faces[e]:
                    if comp[gid] == -1:
                        comp[gid] = cid
                        queue.append(gid)
        sides.append(members)
    on_cycle = set(verts)
    interiors = [len(side - on_cycle) for side in sides]
    return len(sides) == 2 and all(x > 0 for x in interiors)


def enumerate_two_arcs(t: Triangulation) -> List[Circuit]:
    """All two-edge open arcs u-v-w, flagged homologically non-adjacent
    when their endpoints are not joined by an edge."""
    arcs = []
    for v in range(t.vertex_count):
        nbrs = sorted(t.neighbors(v))
        for u, w in itertools.combinations(nbrs, 2):
            arcs.append(
                Circuit(
                    vertices=(u, v, w),
                    edges=(t.edge_id(u, v), t.edge_id(v, w)),
                    kind="arc",
                    is_homologically_non_adjacent=not t.has_edge(u, w),
                )
            )
    arcs.sort(key=lambda c: c.vertices)
    return arcs


# ---------------------------------------------------------------------------
# vertex-subset stars and links
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VertexSubsetGeometry:
    """Open star of a vertex subset: simplex counts, link pairs, and the
    compactly-supported Euler characteristic."""

    subset: FrozenSet[int]
    star_edges: Tuple[int, ...]
    star_faces: Tuple[int, ...]
    link_pairs: Tuple[Tuple[int, int], ...]  # (edge id, vertex in subset)
    euler_char: int
    components: Tuple[FrozenSet[int], ...]


def subset_geometry(t: Triangulation, subset: Iterable[int]) -> VertexSubsetGeometry:
    a = frozenset(int(v) for v in subset)
    if not a:
        raise EmptySubset("subset is empty")
    if len(a) >= t.vertex_count:
        raise FullSubset("subset must be proper")
    if any(v < 0 or v >= t.vertex_count for v in a):
        raise ValueError("vertex id out of range")

    star_edges = tuple(
        eid for eid, (u, v) in enumerate(t.edges) if u in a or v in a
    )
    star_faces = tuple(
        fid for fid, f in enumerate(t.faces) if any(v in a for v in f)
    )
    link_pairs = []
    for fid in star_faces:
        f = t.faces[fid]
        for v in f:
            if v in a:
                u, w = [x for x in f if x != v]
                if u not in a and w not in a:
                    link_pairs.append((t.edge_id(u, w), v))
    link_pairs.sort()
    chi = len(a) - len(star_edges) + len(star_faces)

    components = []
    left = set(a)
    while left:
        root = min(left)
        comp = {root}
        queue = deque([root])
        while queue:
            v = queue.popleft()
            for w in t.neighbors(v):
                if w in left and w not in comp:
                    comp.add(w)
                    queue.append(w)
        components.append(frozenset(comp))
        left -= comp
    components.sort(key=min)

    return VertexSubsetGeometry(
        subset=a,
        star_edges=star_edges,
        star_faces=star_faces,
        link_pairs=tuple(link_pairs),
        euler_char=chi,
        components=tuple(components),
    )


# ---------------------------------------------------------------------------
# trivalent polyhedra and duality
# ---------------------------------------------------------------------------

def _polyhedron_edges(poly_faces: Sequence[Sequence[int]]) -> Dict[Edge, List[int]]:
    edge_to_faces: Dict[Edge, List[int]] = defaultdict(list)
    for fid, cycle in enumerate(poly_faces):
        if len(cycle) < 3:
            raise DegenerateFace(f"face cycle {tuple(cycle)} too short")
        if len(set(cycle)) != len(cycle):
            raise DegenerateFace(f"face cycle {tuple(cycle)} repeats a vertex")
        k = len(cycle)
        for i in range(k):
            e = canonical_edge(int(cycle[i]), int(cycle[(i + 1) % k]))
            edge_to_faces[e].append(fid)
    for e, fs in edge_to_faces.items():
        if len(fs) != 2:
            raise NonManifold(f"polyhedron edge {e} lies in {len(fs)} faces")
    return edge_to_faces


def dual_of_trivalent(poly_faces: Sequence[Sequence[int]]):
    """Dual sphere triangulation of an abstract trivalent polyhedron.

    Faces of the polyhedron become vertices (indexed by face position) and
    trivalent polyhedron vertices become triangles.  Returns the
    triangulation together with the edge bijection in both directions:
    ``(t, poly_edge -> edge id, edge id -> poly_edge)``.
    """
    edge_to_faces = _polyhedron_edges(poly_faces)
    vertex_faces: Dict[int, List[int]] = defaultdict(list)
    for fid, cycle in enumerate(poly_faces):
        for v in cycle:
            vertex_faces[int(v)].append(fid)
    for v, fs in vertex_faces.items():
        if len(fs) != 3:
            raise NotTrivalent(f"polyhedron vertex {v} has degree {len(fs)}")
    n_p = len(vertex_faces)
    chi = n_p - len(edge_to_faces) + len(poly_faces)
    if chi != 2:
        raise NotASphere(f"polyhedron Euler characteristic {chi}")

    dual_faces = [tuple(sorted(vertex_faces[v])) for v in sorted(vertex_faces)]
    t = build_triangulation(dual_faces)

    to_dual: Dict[Edge, int] = {}
    to_primal: Dict[int, Edge] = {}
    for e, (f, g) in edge_to_faces.items():
        eid = t.edge_id(f, g)
        to_dual[e] = eid
        to_primal[eid] = e
    if len(to_primal) != t.edge_count:
        raise NonManifold("edge bijection is not one-to-one")
    return t, to_dual, to_primal


def polyhedron_from_triangulation(t: Triangulation) -> List[Tuple[int, ...]]:
    """Face cycles of the trivalent polyhedron dual to a triangulation.

    Face i of the polyhedron is the (cyclically ordered) list of faces of
    ``t`` around vertex i; the polyhedron's vertices are t's face ids.
    """
    return [tuple(t.vertex_faces[v]) for v in range(t.vertex_count)]
