"""Matching (star) adjacency: same vertices, adjacency extended by pairs of
vertices that share a finite face without being adjacent.

Faces touching the truncation cut contribute nothing, so star adjacency near
the patch boundary is an under-approximation; `star_complete` flags the
vertices whose star neighborhood is fully known.
"""

from __future__ import annotations

import warnings

import numpy as np

from .errors import StructuralError
from .planar import Faces, RotationGraph

__all__ = ["MatchingGraph", "matching_graph", "star_neighborhood"]


class MatchingGraph:
    """Base rotation graph plus the extra diagonal ("star") edges."""

    def __init__(self, base: RotationGraph, star_edges):
        self.base = base
        self.star_edges = sorted(set(
            (int(u), int(v)) if u < v else (int(v), int(u))
            for u, v in star_edges))
        for u, v in self.star_edges:
            if u == v:
                raise StructuralError("star self-loop")
            if base.has_edge(u, v):
                raise StructuralError(f"star edge {u}-{v} already in the graph")
        n = base.n
        counts = np.zeros(n, dtype=np.int64)
        for v in range(n):
            counts[v] = base.degree(v)
        for u, v in self.star_edges:
            counts[u] += 1
            counts[v] += 1
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])
        indices = np.empty(indptr[-1], dtype=np.int32)
        cursor = indptr[:-1].copy()
        for v in range(n):
            rot = base.rotation(v)
            indices[cursor[v]:cursor[v] + rot.shape[0]] = rot
            cursor[v] += rot.shape[0]
        for u, v in self.star_edges:
            indices[cursor[u]] = v
            cursor[u] += 1
            indices[cursor[v]] = u
            cursor[v] += 1
        self._indptr = indptr
        self._indices = indices
        self._star_complete = None

    @property
    def n(self):
        return self.base.n

    @property
    def indptr(self):
        return self._indptr

    @property
    def neighbors(self):
        return self._indices

    def star_degree(self, v: int) -> int:
        return int(self._indptr[v + 1] - self._indptr[v])

    def neighborhood(self, v: int) -> np.ndarray:
        return self._indices[self._indptr[v]:self._indptr[v + 1]]

    def star_complete(self, v: int) -> bool:
        """True iff all faces at v are known finite, so the star neighborhood
        of v is not truncated."""
        if self._star_complete is None:
            faces = self.base.faces()
            flags = np.zeros(self.n, dtype=bool)
            for v_ in range(self.n):
                if self.base.boundary[v_]:
                    continue
                flags[v_] = all(faces.records[f].finite
                                for f in faces.corner_faces(v_))
            self._star_complete = flags
        return bool(self._star_complete[v])

    def distances_from(self, sources):
        from . import _kernels
        return _kernels.bfs_distances(self._indptr, self._indices, list(sources))

    def to_obj(self) -> dict:
        from .planar import graph_to_obj
        obj = graph_to_obj(self.base)
        obj["star_edges"] = [[u, v] for u, v in self.star_edges]
        return obj

    @classmethod
    def from_obj(cls, obj: dict) -> "MatchingGraph":
        from .planar import graph_from_obj
        base = graph_from_obj(obj)
        return cls(base, [(u, v) for u, v in obj.get("star_edges", [])])

    def __repr__(self):
        return (f"MatchingGraph(n={self.n}, edges={self.base.n_edges}, "
                f"star={len(self.star_edges)})")


def matching_graph(g: RotationGraph, faces: Faces | None = None) -> MatchingGraph:
    """Build the star adjacency from the finite faces: every non-adjacent
    pair on a common finite face boundary becomes one star edge (pairs
    sharing several faces still give a single edge: the graph stays simple)."""
    faces = faces or g.faces()
    star = set()
    for rec in faces.records:
        if not rec.finite:
            continue
        w = rec.walk
        m = len(w)
        if len(set(w)) != m:
            raise StructuralError("finite face boundary is not a cycle")
        for i in range(m):
            for j in range(i + 1, m):
                u, v = w[i], w[j]
                if not g.has_edge(u, v):
                    star.add((u, v) if u < v else (v, u))
    return MatchingGraph(g, star)


def star_neighborhood(mg: MatchingGraph, v: int) -> np.ndarray:
    """All star-adjacent vertices of v. Warns when v's neighborhood may be
    truncated by the patch cut."""
    if not mg.star_complete(v):
        warnings.warn(f"vertex {v} touches the truncation cut; its star "
                      "neighborhood is a partial under-approximation",
                      stacklevel=2)
    return mg.neighborhood(v)
