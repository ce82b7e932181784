"""Combinatorial planar embeddings: rotation systems, face tracing, curvature.

A patch is stored as a rotation system: for every vertex, its neighbors in
counterclockwise order. Truncation of an infinite graph is encoded by the
``boundary`` flags: a flagged vertex has an incomplete rotation whose single
gap (the cut) sits between the *last* and *first* entry of its rotation list.
Face walks that turn through a gap are the truncation faces and are marked
``finite=False``; everything derived from faces (curvature, star adjacency,
angle sums) uses finite faces only.

Angles are purely combinatorial: the internal angle of a face f at any of its
corners is ((|f|-2)/|f|)*pi, kept as an exact Fraction multiple of pi so that
angle-sum identities hold without rounding.
"""

from __future__ import annotations

import json
import math
from collections import Counter, deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .errors import StructuralError

__all__ = [
    "RotationGraph", "FaceRecord", "Faces", "CyclePatch",
    "trace_faces", "curvature", "curvature_coefficient",
    "euler_patch_check", "gauss_bonnet_deficit",
    "boundary_walks", "shortest_path", "save_graph", "load_graph",
    "graph_to_obj", "graph_from_obj",
]


class RotationGraph:
    """Immutable planar patch given by per-vertex counterclockwise rotations.

    boundary[v] marks vertices whose rotation was truncated; their gap lies
    between rotation entries deg-1 and 0.
    """

    def __init__(self, rotations: Sequence[Sequence[int]], boundary, validate=None):
        n = len(rotations)
        indptr = np.zeros(n + 1, dtype=np.int64)
        for v, rot in enumerate(rotations):
            indptr[v + 1] = indptr[v] + len(rot)
        neighbors = np.empty(indptr[-1], dtype=np.int32)
        pos = 0
        for rot in rotations:
            for w in rot:
                neighbors[pos] = w
                pos += 1
        bnd = np.asarray(boundary, dtype=bool)
        if bnd.shape[0] != n:
            raise StructuralError("boundary flag array length mismatch")
        self._init_from(indptr, neighbors, bnd, validate)

    @classmethod
    def from_csr(cls, indptr, neighbors, boundary, validate=False):
        g = cls.__new__(cls)
        g._init_from(np.asarray(indptr, dtype=np.int64),
                     np.asarray(neighbors, dtype=np.int32),
                     np.asarray(boundary, dtype=bool), validate)
        return g

    def _init_from(self, indptr, neighbors, boundary, validate):
        self._indptr = indptr
        self._neighbors = neighbors
        self.boundary = boundary
        self.n = indptr.shape[0] - 1
        self._faces = None
        self._order = None
        if validate is None:
            validate = self.n <= 50_000
        if validate:
            self.validate()

    # -- basic structure ----------------------------------------------------

    @property
    def indptr(self):
        return self._indptr

    @property
    def neighbors(self):
        return self._neighbors

    @property
    def n_edges(self) -> int:
        return self._neighbors.shape[0] // 2

    @property
    def n_darts(self) -> int:
        return self._neighbors.shape[0]

    def degree(self, v: int) -> int:
        return int(self._indptr[v + 1] - self._indptr[v])

    def rotation(self, v: int) -> np.ndarray:
        return self._neighbors[self._indptr[v]:self._indptr[v + 1]]

    def slot_of(self, v: int, w: int) -> int:
        """Position of neighbor w in v's rotation."""
        base = self._indptr[v]
        for k in range(base, self._indptr[v + 1]):
            if self._neighbors[k] == w:
                return int(k - base)
        raise StructuralError(f"{w} is not a neighbor of {v}")

    def has_edge(self, u: int, v: int) -> bool:
        return bool(np.any(self.rotation(u) == v))

    def dart_id(self, u: int, v: int) -> int:
        return int(self._indptr[u]) + self.slot_of(u, v)

    def validate(self):
        seen = set()
        for v in range(self.n):
            rot = self.rotation(v)
            if len(set(rot.tolist())) != len(rot):
                raise StructuralError(f"repeated neighbor in rotation of {v}")
            for w in rot:
                w = int(w)
                if w == v:
                    raise StructuralError(f"self-loop at {v}")
                if w < 0 or w >= self.n:
                    raise StructuralError(f"neighbor {w} of {v} out of range")
                seen.add((v, w))
        for (v, w) in seen:
            if (w, v) not in seen:
                raise StructuralError(f"asymmetric adjacency: {v}->{w}")

    # -- derived data ---------------------------------------------------------

    def faces(self) -> "Faces":
        if self._faces is None:
            self._faces = trace_faces(self)
        return self._faces

    def vertex_order(self) -> np.ndarray:
        """Rank of each vertex in the BFS order from vertex 0 (neighbors
        visited in rotation order). The canonical total order used wherever a
        fixed ordering of vertices is needed."""
        if self._order is None:
            rank = np.full(self.n, -1, dtype=np.int64)
            nxt = 0
            q = deque([0])
            rank[0] = nxt
            nxt += 1
            while q:
                v = q.popleft()
                for w in self.rotation(v):
                    if rank[w] == -1:
                        rank[w] = nxt
                        nxt += 1
                        q.append(int(w))
            for v in range(self.n):  # disconnected leftovers, if any
                if rank[v] == -1:
                    rank[v] = nxt
                    nxt += 1
            self._order = rank
        return self._order

    def distances_from(self, sources: Iterable[int]) -> np.ndarray:
        return _kernels.bfs_distances(self._indptr, self._neighbors,
                                      list(sources))

    def interior_mask(self) -> np.ndarray:
        return ~self.boundary

    def mirrored(self) -> "RotationGraph":
        """Orientation-reversed copy (all rotations reversed)."""
        rots = [self.rotation(v)[::-1].tolist() for v in range(self.n)]
        return RotationGraph(rots, self.boundary.copy(), validate=False)

    def __repr__(self):
        return (f"RotationGraph(n={self.n}, edges={self.n_edges}, "
                f"boundary={int(self.boundary.sum())})")


@dataclass(frozen=True)
class FaceRecord:
    """One traced face: closed boundary walk (first vertex not repeated),
    degree = number of steps of the walk, finite flag."""
    walk: tuple
    degree: int
    finite: bool


class Faces:
    """Face set of a patch with the dart -> face map."""

    def __init__(self, records, dart_face, graph):
        self.records = records
        self.dart_face = dart_face  # int32 per dart position in the CSR
        self._g = graph
        self._finite_ids = None

    def __len__(self):
        return len(self.records)

    def __getitem__(self, i):
        return self.records[i]

    def face_of_dart(self, u: int, v: int) -> int:
        return int(self.dart_face[self._g.dart_id(u, v)])

    def finite_ids(self) -> np.ndarray:
        if self._finite_ids is None:
            self._finite_ids = np.array(
                [i for i, r in enumerate(self.records) if r.finite],
                dtype=np.int64)
        return self._finite_ids

    def corner_faces(self, v: int) -> list:
        """Face ids incident to v with multiplicity, one per corner; entry i
        is the face covering the corner between rotation slots i and i+1."""
        g = self._g
        base = int(g.indptr[v])
        return [int(self.dart_face[j]) for j in range(base, base + g.degree(v))]


def _canonical_rotation(walk):
    """Rotate a closed walk so it starts at its lexicographically least point."""
    n = len(walk)
    best = 0
    for i in range(1, n):
        for k in range(n):
            a = walk[(best + k) % n]
            b = walk[(i + k) % n]
            if b != a:
                if b < a:
                    best = i
                break
    return tuple(walk[best:] + walk[:best])


def trace_faces(g: RotationGraph) -> Faces:
    """Trace all face walks of the rotation system.

    Every dart (directed edge) lies on exactly one face walk; the walk keeps
    its face on the left. Walks that turn through a truncation gap are the
    cut faces and get finite=False.
    """
    indptr, nbrs = g.indptr, g.neighbors
    dart_face = np.full(g.n_darts, -1, dtype=np.int32)
    records = []
    for u0 in range(g.n):
        for j0 in range(int(indptr[u0]), int(indptr[u0 + 1])):
            if dart_face[j0] != -1:
                continue
            fid = len(records)
            walk = []
            infinite = False
            cu, cj = u0, j0
            while dart_face[cj] == -1:
                dart_face[cj] = fid
                v = int(nbrs[cj])
                walk.append(cu)
                s = g.slot_of(v, cu)
                if s == 0 and g.boundary[v]:
                    infinite = True
                deg = g.degree(v)
                w = int(g.rotation(v)[(s - 1) % deg])
                cu, cj = v, g.dart_id(v, w)
            records.append(FaceRecord(_canonical_rotation(walk), len(walk),
                                      not infinite))
    return Faces(records, dart_face, g)


# ---------------------------------------------------------------------------
# curvature
# ---------------------------------------------------------------------------

def curvature_coefficient(g: RotationGraph, v: int, faces: Faces | None = None) -> Fraction:
    """kappa(v) as an exact multiple of pi: 2 - sum over incident faces
    (with multiplicity) of (|f|-2)/|f|."""
    if g.boundary[v]:
        raise ValueError("curvature undefined at truncation boundary")
    faces = faces or g.faces()
    acc = Fraction(2)
    for fid in faces.corner_faces(v):
        rec = faces.records[fid]
        if not rec.finite:
            raise StructuralError(
                f"vertex {v} touches a truncation face; curvature unresolvable")
        acc -= Fraction(rec.degree - 2, rec.degree)
    return acc


def curvature(g: RotationGraph, v: int, faces: Faces | None = None) -> float:
    """kappa(v) in radians."""
    return float(curvature_coefficient(g, v, faces)) * math.pi


# ---------------------------------------------------------------------------
# boundary walks of face unions
# ---------------------------------------------------------------------------

def boundary_walks(g: RotationGraph, faces: Faces, face_set) -> list:
    """Closed walks bounding the union of the given faces, each traversed
    with the union on its left. Returns a list of vertex lists."""
    fset = set(int(f) for f in face_set)
    df = faces.dart_face
    indptr, nbrs = g.indptr, g.neighbors
    candidates = set()
    for fid in fset:
        candidates.update(faces.records[fid].walk)
    start_darts = []
    for u in sorted(candidates):
        for j in range(int(indptr[u]), int(indptr[u + 1])):
            if int(df[j]) in fset:
                v = int(nbrs[j])
                if int(df[g.dart_id(v, u)]) not in fset:
                    start_darts.append((u, j))
    seen = set()
    walks = []
    for u0, j0 in start_darts:
        if j0 in seen:
            continue
        walk = []
        cu, cj = u0, j0
        while cj not in seen:
            seen.add(cj)
            walk.append(cu)
            v = int(nbrs[cj])
            rot = g.rotation(v)
            deg = rot.shape[0]
            k = g.slot_of(v, cu)
            # rotate over corners interior to the union until the next
            # boundary dart out of v
            while True:
                nk = (k - 1) % deg
                if int(df[g.dart_id(v, int(rot[nk]))]) in fset:
                    k = nk
                else:
                    break
            cu = v
            cj = g.dart_id(v, int(rot[k]))
        walks.append(walk)
    return walks


def _region_reaches_infinite(g, faces, fset, seed_face, blocked=None):
    """Flood the complement region containing seed_face; True if it touches
    an infinite face. Returns (reaches, region_set)."""
    df = faces.dart_face
    region = {seed_face}
    q = deque([seed_face])
    reaches = not faces.records[seed_face].finite
    indptr, nbrs = g.indptr, g.neighbors
    # face -> darts scan: walk each face's boundary via records
    while q and not reaches:
        fid = q.popleft()
        rec = faces.records[fid]
        w = rec.walk
        m = len(w)
        for i in range(m):
            a, b = w[i], w[(i + 1) % m]
            other = int(df[g.dart_id(b, a)])
            if other in fset or other in region:
                continue
            region.add(other)
            if not faces.records[other].finite:
                reaches = True
                break
            q.append(other)
    return reaches, region


# ---------------------------------------------------------------------------
# cycle patches: Euler identity and angle-sum deficit
# ---------------------------------------------------------------------------

class CyclePatch:
    """A simple cycle together with everything it encloses."""

    def __init__(self, g: RotationGraph, cycle, enclosed_face_ids, faces=None):
        self.g = g
        self.faces = faces or g.faces()
        self.cycle = [int(v) for v in cycle]
        self.enclosed = sorted(int(f) for f in enclosed_face_ids)
        self._check_cycle()
        cyc_set = set(self.cycle)
        verts = set()
        edges = set()
        for fid in self.enclosed:
            rec = self.faces.records[fid]
            if not rec.finite:
                raise StructuralError("cycle encloses a truncation face")
            w = rec.walk
            m = len(w)
            for i in range(m):
                a, b = w[i], w[(i + 1) % m]
                verts.add(a)
                edges.add((a, b) if a < b else (b, a))
        cyc_edges = set()
        n = len(self.cycle)
        for i in range(n):
            a, b = self.cycle[i], self.cycle[(i + 1) % n]
            cyc_edges.add((a, b) if a < b else (b, a))
        self.interior_vertices = verts - cyc_set
        self.interior_edges = edges - cyc_edges
        self._cycle_edges = cyc_edges

    def _check_cycle(self):
        n = len(self.cycle)
        if n < 3:
            raise StructuralError("cycle needs at least 3 vertices")
        if len(set(self.cycle)) != n:
            raise StructuralError("cycle is not simple")
        for i in range(n):
            if not self.g.has_edge(self.cycle[i], self.cycle[(i + 1) % n]):
                raise StructuralError("consecutive cycle vertices not adjacent")

    @classmethod
    def from_cycle(cls, g: RotationGraph, cycle, faces=None):
        """Build the patch for a simple cycle by flooding the face dual from
        the truncation faces; everything not reached is enclosed."""
        faces = faces or g.faces()
        cycle = [int(v) for v in cycle]
        n = len(cycle)
        cyc_edges = set()
        for i in range(n):
            a, b = cycle[i], cycle[(i + 1) % n]
            cyc_edges.add((a, b) if a < b else (b, a))
        df = faces.dart_face
        outside = set()
        q = deque()
        for fid, rec in enumerate(faces.records):
            if not rec.finite:
                outside.add(fid)
                q.append(fid)
        if not q:
            raise StructuralError("patch has no truncation face to flood from")
        while q:
            fid = q.popleft()
            w = faces.records[fid].walk
            m = len(w)
            for i in range(m):
                a, b = w[i], w[(i + 1) % m]
                key = (a, b) if a < b else (b, a)
                if key in cyc_edges:
                    continue
                other = int(df[g.dart_id(b, a)])
                if other not in outside:
                    outside.add(other)
                    q.append(other)
        enclosed = [fid for fid in range(len(faces.records))
                    if fid not in outside]
        return cls(g, cycle, enclosed, faces)

    @classmethod
    def from_face_union(cls, g: RotationGraph, face_ids, faces=None):
        """Patch bounded by the outer boundary of a connected union of finite
        faces (holes are filled). Returns None if the outer boundary is not a
        simple cycle."""
        faces = faces or g.faces()
        fset = set(int(f) for f in face_ids)
        walks = boundary_walks(g, faces, fset)
        if not walks:
            return None
        enclosed = set(fset)
        if len(walks) == 1:
            outer = walks[0]
        else:
            outer = None
            for w in walks:
                # right face of the walk's first dart seeds its complement region
                a, b = w[0], w[1 % len(w)]
                seed = int(faces.dart_face[g.dart_id(b, a)])
                reaches, region = _region_reaches_infinite(g, faces, fset, seed)
                if reaches:
                    outer = w
                else:
                    enclosed |= region  # a hole: fill it
            if outer is None:
                raise StructuralError("no outer boundary found for face union")
        if len(set(outer)) != len(outer):
            return None
        return cls(g, outer, enclosed, faces)

    def counts(self):
        """(s, m, t): interior vertices, enclosed faces, interior edges."""
        return (len(self.interior_vertices), len(self.enclosed),
                len(self.interior_edges))


def euler_patch_check(patch: CyclePatch):
    """Euler identity for a cycle patch: s + m - t == 1."""
    s, m, t = patch.counts()
    return s, m, t, (s + m - t == 1)


def gauss_bonnet_deficit(patch: CyclePatch) -> Fraction:
    """Boundary angle-sum deficit of the patch, as a multiple of pi:

        sum_{z on C} sum_{enclosed f at z, with multiplicity} (|f|-2)/|f|
        - (n - 2)

    Nonpositive whenever every interior vertex has nonpositive curvature
    (checked; violation reported with the offending vertex).
    """
    g, faces = patch.g, patch.faces
    for z in patch.interior_vertices:
        if g.boundary[z]:
            raise StructuralError(f"interior vertex {z} is boundary-flagged")
        if curvature_coefficient(g, z, faces) > 0:
            raise StructuralError(f"positive curvature at interior vertex {z}")
    enclosed = set(patch.enclosed)
    tally = Counter()
    for z in patch.cycle:
        for fid in faces.corner_faces(z):
            if fid in enclosed:
                tally[faces.records[fid].degree] += 1
    acc = Fraction(0)
    for d, cnt in tally.items():
        acc += cnt * Fraction(d - 2, d)
    return acc - (len(patch.cycle) - 2)


def shortest_path(g: RotationGraph, u: int, w: int) -> list:
    """A deterministic shortest path from u to w: BFS distances from w, then
    walk downhill picking the smallest-id neighbor at each step."""
    dist = g.distances_from([w])
    if dist[u] < 0:
        raise StructuralError(f"{u} and {w} are not connected")
    path = [int(u)]
    cur = int(u)
    while cur != w:
        best = -1
        for nb in sorted(int(x) for x in g.rotation(cur)):
            if dist[nb] == dist[cur] - 1:
                best = nb
                break
        path.append(best)
        cur = best
    return path


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def graph_to_obj(g: RotationGraph) -> dict:
    return {
        "format": "hyperperc-graph",
        "version": 1,
        "vertex_count": g.n,
        "rotations": [g.rotation(v).tolist() for v in range(g.n)],
        "boundary": [int(b) for b in g.boundary],
    }


def graph_from_obj(obj: dict) -> RotationGraph:
    if obj.get("format") != "hyperperc-graph":
        raise StructuralError("not a hyperperc graph document")
    return RotationGraph(obj["rotations"], [bool(b) for b in obj["boundary"]],
                         validate=None)


def save_graph(g: RotationGraph, path):
    with open(path, "w") as fh:
        json.dump(graph_to_obj(g), fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")


def load_graph(path) -> RotationGraph:
    with open(path) as fh:
        return graph_from_obj(json.load(fh))
