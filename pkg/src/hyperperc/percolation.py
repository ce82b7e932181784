"""Bernoulli site percolation: sampling, cluster labelling, two-point
estimates, exact small-patch connection polynomials, and outer-boundary
contours of closed star-clusters.

Connection convention used throughout: u <-> v means an open path whose
vertices are *all* open, endpoints included; a single vertex is connected to
itself iff it is open.

Sampling is counter-based: the state of vertex x in sample i of a run seeded
s is a pure function of (s, i, x), so runs are reproducible, monotone in p
under the shared uniforms, and parallelizable over samples.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _kernels
from .errors import InvariantViolation, ResourceBudgetError, StructuralError
from .matching import MatchingGraph
from .planar import RotationGraph, boundary_walks

__all__ = [
    "Configuration", "ClusterLabeling", "sample", "label_clusters",
    "two_point", "TwoPointEstimate", "mc_pair_hits", "connection_polynomial",
    "ConnectionPolynomial", "exact_connection_poly", "boundary_cluster_count",
    "crossing_counts", "outer_boundary", "zero_star_clusters",
    "finite_interior_zero_star_clusters", "verify_enclosure",
    "EXACT_ENUM_CAP",
]

EXACT_ENUM_CAP = 24


def _csr_of(graph):
    if isinstance(graph, MatchingGraph):
        return graph.indptr, graph.neighbors, graph.base
    return graph.indptr, graph.neighbors, graph


@dataclass(frozen=True)
class Configuration:
    """One site-percolation sample restricted to a patch."""
    states: np.ndarray           # uint8 per vertex, 1 = open
    p: float
    seed: int
    sample_index: int

    @property
    def n(self):
        return self.states.shape[0]

    def open_fraction(self) -> float:
        return float(self.states.mean())


def sample(g, p: float, seed: int, index: int) -> Configuration:
    """Draw one reproducible configuration on the patch."""
    if not 0.0 <= p <= 1.0:
        raise StructuralError(f"p={p} out of [0, 1]")
    _, _, base = _csr_of(g)
    states = _kernels.bernoulli(base.n, p, seed, index)
    return Configuration(states=states, p=float(p), seed=int(seed),
                         sample_index=int(index))


class ClusterLabeling:
    """Partition of the same-state vertices into clusters under graph or
    star adjacency."""

    def __init__(self, graph, config: Configuration, state: int, mode: str):
        if mode not in ("graph", "star"):
            raise StructuralError("mode must be 'graph' or 'star'")
        if mode == "star" and not isinstance(graph, MatchingGraph):
            raise StructuralError("star mode needs a MatchingGraph")
        indptr, indices, base = _csr_of(graph)
        if mode == "graph" and isinstance(graph, MatchingGraph):
            indptr, indices = base.indptr, base.neighbors
        active = (config.states == state).astype(np.uint8)
        roots = _kernels.uf_label(indptr, indices, active)
        self.state = state
        self.mode = mode
        self.labels = np.full(base.n, -1, dtype=np.int64)
        act = active.astype(bool)
        if act.any():
            uniq, inv = np.unique(roots[act], return_inverse=True)
            self.labels[act] = inv
            self.n_clusters = uniq.shape[0]
            self.sizes = np.bincount(inv, minlength=self.n_clusters)
            tb = np.zeros(self.n_clusters, dtype=bool)
            on_b = act & base.boundary
            if on_b.any():
                tb[np.unique(self.labels[on_b])] = True
            self.touches_boundary = tb
        else:
            self.n_clusters = 0
            self.sizes = np.zeros(0, dtype=np.int64)
            self.touches_boundary = np.zeros(0, dtype=bool)

    def cluster_of(self, v: int) -> int:
        return int(self.labels[v])

    def members(self, c: int) -> np.ndarray:
        return np.where(self.labels == c)[0]

    def largest_size(self) -> int:
        return int(self.sizes.max()) if self.n_clusters else 0


def label_clusters(graph, config: Configuration, state: int,
                   mode: str = "graph") -> ClusterLabeling:
    return ClusterLabeling(graph, config, state, mode)


# ---------------------------------------------------------------------------
# Monte Carlo two-point estimates
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TwoPointEstimate:
    p_hat: float
    stderr: float
    hits: int
    n_samples: int
    p: float
    mode: str


def _chunk_ranges(n, threads):
    step = (n + threads - 1) // threads
    return [(i, min(i + step, n)) for i in range(0, n, step) if i < n]


def mc_pair_hits(indptr, indices, a_sets, b_sets, p, seed, n_samples, state,
                 threads=1):
    """Hit counts per pair of endpoint sets; one labelling pass per sample
    serves every pair. Deterministic regardless of thread count (the sum over
    sample chunks is order-independent)."""
    if threads <= 1 or _kernels.BACKEND != "numba":
        return _kernels.pairs_connect_mc(indptr, indices, a_sets, b_sets,
                                         p, seed, 0, n_samples, state)
    parts = []
    with ThreadPoolExecutor(max_workers=threads) as ex:
        futs = [
            ex.submit(_kernels.pairs_connect_mc, indptr, indices, a_sets,
                      b_sets, p, seed, lo, hi - lo, state)
            for lo, hi in _chunk_ranges(n_samples, threads)]
        for f in futs:
            parts.append(f.result())
    return np.sum(parts, axis=0)


def two_point(graph, p: float, u, v, n_samples: int, seed: int = 0,
              mode: str = "graph", endpoints: str = "vertex",
              threads: int = 1) -> TwoPointEstimate:
    """Monte Carlo estimate of the probability that u and v lie in one open
    cluster. mode='star' connects through star adjacency; endpoints may be
    'vertex' or 'star_boundary' (the star neighborhoods of u and v stand in
    for the endpoints, as in neighborhood-to-neighborhood connectivity)."""
    if n_samples <= 0:
        raise StructuralError("n_samples must be positive")
    if not 0.0 <= p <= 1.0:
        raise StructuralError(f"p={p} out of [0, 1]")
    indptr, indices, base = _csr_of(graph)
    if mode == "graph" and isinstance(graph, MatchingGraph):
        indptr, indices = base.indptr, base.neighbors
    elif mode == "star" and not isinstance(graph, MatchingGraph):
        raise StructuralError("star mode needs a MatchingGraph")
    if endpoints == "vertex":
        aset, bset = [int(u)], [int(v)]
    elif endpoints == "star_boundary":
        if not isinstance(graph, MatchingGraph):
            raise StructuralError("star_boundary endpoints need a MatchingGraph")
        aset = [int(x) for x in graph.neighborhood(int(u))]
        bset = [int(x) for x in graph.neighborhood(int(v))]
    else:
        raise StructuralError("endpoints must be 'vertex' or 'star_boundary'")
    hits = int(mc_pair_hits(indptr, indices, [aset], [bset], p, seed,
                            n_samples, 1, threads)[0])
    p_hat = hits / n_samples
    stderr = float(np.sqrt(max(p_hat * (1 - p_hat), 1e-300) / n_samples))
    return TwoPointEstimate(p_hat=p_hat, stderr=stderr, hits=hits,
                            n_samples=n_samples, p=float(p), mode=mode)


# ---------------------------------------------------------------------------
# exact connection polynomials (small patches)
# ---------------------------------------------------------------------------

class ConnectionPolynomial:
    """P(source <-> targets) as exact counts: coefficient c_k = number of
    configurations with k open vertices realizing the connection; the value
    at p is sum_k c_k p^k (1-p)^(n-k)."""

    def __init__(self, counts, n):
        self.counts = [int(c) for c in counts]
        self.n = int(n)

    def value(self, p):
        one = Fraction(1) if isinstance(p, Fraction) else 1.0
        q = one - p
        acc = 0 * one
        for k, c in enumerate(self.counts):
            if c:
                acc += c * p ** k * q ** (self.n - k)
        return acc

    def derivative(self, p):
        one = Fraction(1) if isinstance(p, Fraction) else 1.0
        q = one - p
        acc = 0 * one
        for k, c in enumerate(self.counts):
            if not c:
                continue
            if k > 0:
                acc += c * k * p ** (k - 1) * q ** (self.n - k)
            if self.n - k > 0:
                acc -= c * (self.n - k) * p ** k * q ** (self.n - k - 1)
        return acc


def _neighbor_masks(indptr, indices, n):
    masks = np.zeros(n, dtype=np.int64)
    for v in range(n):
        m = 0
        for j in range(int(indptr[v]), int(indptr[v + 1])):
            m |= 1 << int(indices[j])
        masks[v] = m
    return masks


def connection_polynomial(g, source: int, target_set) -> ConnectionPolynomial:
    """Exact connection polynomial by enumerating all 2^n configurations of
    the patch (n <= 24)."""
    indptr, indices, base = _csr_of(g)
    n = base.n
    if n > EXACT_ENUM_CAP:
        raise ResourceBudgetError(
            f"exact enumeration capped at {EXACT_ENUM_CAP} vertices, got {n}")
    targets = 0
    for t in target_set:
        targets |= 1 << int(t)
    if targets == 0:
        return ConnectionPolynomial([0] * (n + 1), n)
    masks = _neighbor_masks(indptr, indices, n)
    counts = _kernels.reach_counts(masks, int(source),
                                   np.array([targets], dtype=np.int64))
    return ConnectionPolynomial(counts[0].tolist(), n)


def exact_connection_poly(g, source: int, target_set, p):
    """Exact P_p(source <-> target_set); Fraction in, Fraction out."""
    return connection_polynomial(g, source, target_set).value(p)


# ---------------------------------------------------------------------------
# crossing counts and cluster multiplicity
# ---------------------------------------------------------------------------

def boundary_cluster_count(g: RotationGraph, config: Configuration,
                           state: int, core_radius: int) -> int:
    """Number of distinct state-clusters meeting both the ball
    B(root, core_radius) and the truncation boundary."""
    dist = g.distances_from([0])
    if core_radius >= int(dist[g.boundary].min(initial=np.iinfo(np.int32).max)):
        raise StructuralError("core_radius must stay inside the patch")
    lab = label_clusters(g, config, state, "graph")
    core = dist <= core_radius
    act = lab.labels >= 0
    core_ids = set(lab.labels[act & core].tolist())
    bnd_ids = set(lab.labels[act & g.boundary].tolist())
    return len(core_ids & bnd_ids)


def crossing_counts(g: RotationGraph, p: float, core_radius: int,
                    n_samples: int, seed: int, state: int,
                    threads: int = 1) -> np.ndarray:
    """Per-sample number of state-clusters crossing from B(root, core_radius)
    to the truncation boundary (Monte Carlo batch of boundary_cluster_count)."""
    dist = g.distances_from([0])
    core = (dist <= core_radius).astype(np.uint8)
    bnd = g.boundary.astype(np.uint8)
    if threads <= 1 or _kernels.BACKEND != "numba":
        return _kernels.crossing_count_mc(g.indptr, g.neighbors, core, bnd,
                                          p, seed, 0, n_samples, state)
    parts = {}
    with ThreadPoolExecutor(max_workers=threads) as ex:
        futs = {
            ex.submit(_kernels.crossing_count_mc, g.indptr, g.neighbors, core,
                      bnd, p, seed, lo, hi - lo, state): lo
            for lo, hi in _chunk_ranges(n_samples, threads)}
        for f, lo in futs.items():
            parts[lo] = f.result()
    return np.concatenate([parts[lo] for lo in sorted(parts)])


# ---------------------------------------------------------------------------
# outer boundary contours
# ---------------------------------------------------------------------------

def zero_star_clusters(mg: MatchingGraph, config: Configuration) -> ClusterLabeling:
    return label_clusters(mg, config, 0, "star")


def finite_interior_zero_star_clusters(mg: MatchingGraph,
                                       config: Configuration) -> list:
    """Vertex arrays of the 0-star-clusters that stay clear of the truncation
    cut (every member interior with fully known faces)."""
    lab = zero_star_clusters(mg, config)
    out = []
    for c in range(lab.n_clusters):
        if lab.touches_boundary[c]:
            continue
        members = lab.members(c)
        if all(mg.star_complete(int(v)) for v in members):
            out.append(members)
    return out


def outer_boundary(mg: MatchingGraph, config: Configuration, cluster) -> list:
    """Outer boundary contour of a finite interior 0-star-cluster xi.

    Returns the closed walk w_0, ..., w_k (= w_0) of open vertices, each
    star-adjacent to xi, consecutive ones adjacent in the base graph,
    enclosing xi, starting at the vertex of minimal BFS order and traversed
    with xi's side on the left.
    """
    g = mg.base
    faces = g.faces()
    xi = sorted(int(v) for v in cluster)
    if not xi:
        raise StructuralError("empty cluster")
    xi_set = set(xi)
    for v in xi:
        if config.states[v] != 0:
            raise StructuralError(f"vertex {v} is open; not a 0-cluster")
        if g.boundary[v] or not mg.star_complete(v):
            raise StructuralError(
                f"vertex {v} touches the truncation cut; contour unsupported")
    # star-maximality
    for v in xi:
        for w in mg.neighborhood(v):
            if config.states[w] == 0 and int(w) not in xi_set:
                raise StructuralError("cluster is not star-maximal")

    fset = set()
    for v in xi:
        fset.update(faces.corner_faces(v))
    for fid in fset:
        if not faces.records[fid].finite:
            raise InvariantViolation("interior cluster touches a cut face")

    walks = boundary_walks(g, faces, fset)
    if not walks:
        raise InvariantViolation("no boundary walk around the cluster")
    if len(walks) == 1:
        outer = walks[0]
    else:
        from .planar import _region_reaches_infinite
        outer = None
        for w in walks:
            a, b = w[0], w[1]
            seed_face = int(faces.dart_face[g.dart_id(b, a)])
            reaches, _region = _region_reaches_infinite(g, faces, fset, seed_face)
            if reaches:
                if outer is not None:
                    raise InvariantViolation("two outer boundary components")
                outer = w
        if outer is None:
            raise InvariantViolation("no outer boundary component found")

    for w in outer:
        if config.states[w] != 1:
            raise InvariantViolation(
                f"contour vertex {w} is closed; matching property failed")
        if not any(int(x) in xi_set for x in mg.neighborhood(w)):
            raise InvariantViolation(
                f"contour vertex {w} is not star-adjacent to the cluster")

    order = g.vertex_order()
    start = min(range(len(outer)), key=lambda i: order[outer[i]])
    walk = outer[start:] + outer[:start]
    walk.append(walk[0])
    return walk


def verify_enclosure(mg: MatchingGraph, contour, cluster) -> bool:
    """Face-winding check that the contour encloses the cluster: flooding
    faces from the cluster without crossing contour edges never reaches a
    truncation face."""
    g = mg.base
    faces = g.faces()
    blocked = set()
    for i in range(len(contour) - 1):
        a, b = int(contour[i]), int(contour[i + 1])
        blocked.add((a, b) if a < b else (b, a))
    seen = set()
    stack = []
    for v in cluster:
        for fid in faces.corner_faces(int(v)):
            if fid not in seen:
                seen.add(fid)
                stack.append(fid)
    while stack:
        fid = stack.pop()
        rec = faces.records[fid]
        if not rec.finite:
            return False
        w = rec.walk
        m = len(w)
        for i in range(m):
            a, b = w[i], w[(i + 1) % m]
            key = (a, b) if a < b else (b, a)
            if key in blocked:
                continue
            other = int(faces.dart_face[g.dart_id(b, a)])
            if other not in seen:
                seen.add(other)
                stack.append(other)
    return True
