"""Generators for the graphs the experiments run on.

build_ball produces radius-R balls of the regular {p,q} tiling (faces of
degree p, vertices of degree q) as rotation systems: every vertex at graph
distance < R has its full degree-q rotation and all q incident faces closed
as p-cycles; all other vertices are boundary-flagged truncation stubs.

build_reference_tree produces the rooted tree whose root has degree n and all
other interior vertices degree n+2, truncated at a given depth. A few
hand-made fixtures (paths, stars, a single square) used by tests and the
small exact computations live here too.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import ResourceBudgetError, StructuralError
from .planar import RotationGraph

__all__ = [
    "TilingSpec", "build_ball", "build_reference_tree",
    "build_path", "build_star", "build_square", "DEFAULT_BUDGET",
]

DEFAULT_BUDGET = 2_000_000


@dataclass(frozen=True)
class TilingSpec:
    """Regular tiling patch parameters: face degree p, vertex degree q,
    truncation radius. Regimes with guaranteed nonpositive curvature are
    (q >= 7, p >= 3) and (q >= 5, p >= 4); anything else (flat controls such
    as {4,4}) must be flagged explicitly."""
    face_degree: int
    vertex_degree: int
    radius: int
    non_paper_regime: bool = False

    def __post_init__(self):
        p, q = self.face_degree, self.vertex_degree
        if p < 3 or q < 3 or self.radius < 0:
            raise StructuralError(f"invalid tiling spec {{{p},{q}}} R={self.radius}")
        supported = (q >= 7 and p >= 3) or (q >= 5 and p >= 4)
        if not supported and not self.non_paper_regime:
            raise StructuralError(
                f"{{{p},{q}}} is outside the nonpositive-curvature regimes; "
                "pass non_paper_regime=True for flat controls")


def build_ball(spec: TilingSpec, budget: int = DEFAULT_BUDGET) -> RotationGraph:
    """Radius-R ball of the {p,q} tiling.

    Grows layer by layer, completing each vertex's face fan deterministically
    counterclockwise, so vertex ids are BFS order from the root.
    """
    p, q, radius = spec.face_degree, spec.vertex_degree, spec.radius
    n, rot, deg, complete, dist = _kernels.pq_ball(p, q, radius, budget)
    if n == -1:
        raise ResourceBudgetError(
            f"{{{p},{q}}} ball of radius {radius} exceeds the vertex budget "
            f"({budget}); raise it explicitly if intended")
    if n == -2:
        raise StructuralError("ball generator produced an inconsistent fan")
    rot, deg, complete, dist = rot[:n], deg[:n], complete[:n], dist[:n]
    # relabel so vertex ids run by (distance, creation order): BFS-compatible
    perm = np.lexsort((np.arange(n), dist))
    newid = np.empty(n, dtype=np.int32)
    newid[perm] = np.arange(n, dtype=np.int32)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(deg[perm], out=indptr[1:])
    neighbors = np.empty(indptr[-1], dtype=np.int32)
    for v in range(n):
        ov = perm[v]
        neighbors[indptr[v]:indptr[v + 1]] = newid[rot[ov, :deg[ov]]]
    boundary = complete[perm] == 0
    g = RotationGraph.from_csr(indptr, neighbors, boundary, validate=False)
    bfs = g.distances_from([0])
    if not np.array_equal(bfs, dist[perm].astype(bfs.dtype)):
        raise StructuralError("ball generator distance bookkeeping diverged "
                              "from BFS distances")
    return g


def build_reference_tree(root_degree: int, depth: int,
                         budget: int = DEFAULT_BUDGET) -> RotationGraph:
    """Tree with root degree n and interior degree n+2, truncated at `depth`
    (vertices at distance `depth` are boundary-flagged leaves)."""
    if root_degree < 1 or depth < 0:
        raise StructuralError("root_degree >= 1 and depth >= 0 required")
    rotations = [[]]
    level = [0]
    depth_of = [0]
    for d in range(depth):
        nxt = []
        for v in level:
            n_children = root_degree if v == 0 else root_degree + 1
            if len(rotations) + n_children > budget:
                raise ResourceBudgetError("tree exceeds vertex budget")
            for _ in range(n_children):
                c = len(rotations)
                rotations.append([v])
                rotations[v].append(c)
                depth_of.append(d + 1)
                nxt.append(c)
        level = nxt
    boundary = [depth_of[v] == depth and depth > 0 for v in range(len(rotations))]
    if depth == 0:
        boundary = [True]
    return RotationGraph(rotations, boundary, validate=None)


def build_path(n_vertices: int) -> RotationGraph:
    """Path 0-1-...-(n-1); both endpooints boundary-flagged (stand-in for a
    bi-infinite path)."""
    if n_vertices < 2:
        raise StructuralError("path needs at least 2 vertices")
    rotations = []
    for v in range(n_vertices):
        rot = []
        if v > 0:
            rot.append(v - 1)
        if v < n_vertices - 1:
            rot.append(v + 1)
        rotations.append(rot)
    boundary = [v in (0, n_vertices - 1) for v in range(n_vertices)]
    return RotationGraph(rotations, boundary, validate=None)


def build_star(leaves: int) -> RotationGraph:
    """Star K_{1,m}: center 0, boundary-flagged leaves 1..m."""
    if leaves < 1:
        raise StructuralError("star needs at least one leaf")
    rotations = [list(range(1, leaves + 1))]
    rotations += [[0] for _ in range(leaves)]
    boundary = [False] + [True] * leaves
    return RotationGraph(rotations, boundary, validate=None)


def build_square() -> RotationGraph:
    """A single 4-cycle whose inner face is finite; all four corners are
    truncation stubs (their gaps face outward)."""
    rotations = [[1, 3], [2, 0], [3, 1], [0, 2]]
    return RotationGraph(rotations, [True] * 4, validate=None)
