"""The sharp-threshold phi functional and its consumers.

phi_p^v(S) is the expected number of frontier vertices y of S whose
neighborhood is reached from v by an open path inside the interior of S
(value 1 by convention when v itself sits on the frontier). A region with
phi <= 1 - eps certifies local subcriticality at p; the same functional
enters the derivative inequality checked by russo_inequality_check, and
decay_fit estimates the exponential-decay rate of two-point connectivity.

Truncation rule: a boundary-flagged vertex in S always counts as frontier
(its missing neighbors are outside S by construction) and never as interior.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import scipy.stats

from . import _kernels
from .errors import ResourceBudgetError, StructuralError
from .matching import MatchingGraph
from .percolation import (ConnectionPolynomial, EXACT_ENUM_CAP,
                          connection_polynomial, mc_pair_hits)
from .planar import RotationGraph

__all__ = [
    "PhiRegion", "PhiEstimate", "phi", "phi_polynomial",
    "SubcriticalCertificate", "subcritical_certificate", "theta_lower_bound",
    "RussoReport", "russo_inequality_check",
    "DecayFit", "decay_fit", "auto_pair_schedule",
]


class PhiRegion:
    """A finite vertex set S around v with its interior and frontier."""

    def __init__(self, g: RotationGraph, v: int, vertices):
        self.g = g
        self.v = int(v)
        self.S = sorted(int(x) for x in set(vertices))
        sset = set(self.S)
        if self.v not in sset:
            raise StructuralError("v must belong to S")
        self.interior = []
        self.frontier = []
        for y in self.S:
            if g.boundary[y] or any(int(w) not in sset for w in g.rotation(y)):
                self.frontier.append(y)
            else:
                self.interior.append(y)
        self._iset = set(self.interior)

    @classmethod
    def ball(cls, g: RotationGraph, v: int, radius: int) -> "PhiRegion":
        dist = g.distances_from([v])
        verts = np.where((dist >= 0) & (dist <= radius))[0]
        return cls(g, v, verts)

    @property
    def v_interior(self) -> bool:
        return self.v in self._iset

    def __repr__(self):
        return (f"PhiRegion(v={self.v}, |S|={len(self.S)}, "
                f"|interior|={len(self.interior)}, "
                f"|frontier|={len(self.frontier)})")


@dataclass(frozen=True)
class PhiEstimate:
    value: float
    stderr: float | None
    method: str


def _interior_subgraph(region: PhiRegion):
    """Local CSR over the interior plus the frontier-adjacency lists."""
    g = region.g
    local = {v: i for i, v in enumerate(region.interior)}
    m = len(local)
    indptr = np.zeros(m + 1, dtype=np.int64)
    rows = []
    for v in region.interior:
        row = [local[int(w)] for w in g.rotation(v) if int(w) in local]
        rows.append(row)
        indptr[local[v] + 1] = len(row)
    np.cumsum(indptr, out=indptr)
    indices = np.array([x for row in rows for x in row] or [0],
                       dtype=np.int32)[:indptr[-1]]
    f_indptr = np.zeros(len(region.frontier) + 1, dtype=np.int64)
    f_rows = []
    for i, y in enumerate(region.frontier):
        row = [local[int(w)] for w in g.rotation(y) if int(w) in local]
        f_rows.append(row)
        f_indptr[i + 1] = len(row)
    np.cumsum(f_indptr, out=f_indptr)
    f_indices = np.array([x for row in f_rows for x in row] or [0],
                         dtype=np.int64)[:f_indptr[-1]]
    return local, m, indptr, indices, f_indptr, f_indices


def phi_polynomial(g: RotationGraph, region: PhiRegion) -> ConnectionPolynomial:
    """Exact phi as a polynomial in p (enumerates the interior states only;
    the counts sum the per-frontier connection events, so values may exceed
    one). Constant 1 when v is itself on the frontier."""
    if not region.v_interior:
        return ConnectionPolynomial([1], 0)   # phi = 1 identically
    local, m, indptr, indices, f_indptr, f_indices = _interior_subgraph(region)
    if m > EXACT_ENUM_CAP:
        raise ResourceBudgetError(
            f"exact phi needs |interior| <= {EXACT_ENUM_CAP}, got {m}")
    masks = np.zeros(m, dtype=np.int64)
    for v in range(m):
        acc = 0
        for j in range(int(indptr[v]), int(indptr[v + 1])):
            acc |= 1 << int(indices[j])
        masks[v] = acc
    targets = []
    for i in range(len(region.frontier)):
        t = 0
        for j in range(int(f_indptr[i]), int(f_indptr[i + 1])):
            t |= 1 << int(f_indices[j])
        targets.append(t)
    targets = np.array(targets or [0], dtype=np.int64)
    counts = _kernels.reach_counts(masks, local[region.v], targets)
    total = counts.sum(axis=0)
    return ConnectionPolynomial(total.tolist(), m)


def phi(g: RotationGraph, p, region: PhiRegion, method: str = "auto",
        n_samples: int = 20000, seed: int = 0) -> PhiEstimate:
    """phi_p^v(S), exactly (interior <= 24 vertices) or by Monte Carlo."""
    if not 0 <= p <= 1:
        raise StructuralError(f"p={p} out of [0, 1]")
    if not region.v_interior:
        return PhiEstimate(value=1.0, stderr=None, method="exact")
    m = len(region.interior)
    if method == "auto":
        method = "exact" if m <= EXACT_ENUM_CAP else "monte_carlo"
    if method == "exact":
        poly = phi_polynomial(g, region)
        val = poly.value(p)
        return PhiEstimate(value=float(val), stderr=None, method="exact")
    if method != "monte_carlo":
        raise StructuralError("method must be exact|monte_carlo|auto")
    local, m, indptr, indices, f_indptr, f_indices = _interior_subgraph(region)
    counts = _kernels.phi_mc_counts(indptr, indices, local[region.v],
                                    f_indptr, f_indices, float(p), seed, 0,
                                    n_samples)
    mean = float(counts.mean())
    stderr = float(counts.std(ddof=1) / math.sqrt(n_samples))
    return PhiEstimate(value=mean, stderr=stderr, method="monte_carlo")


@dataclass(frozen=True)
class SubcriticalCertificate:
    v: int
    radius: int
    phi_value: float
    phi_stderr: float | None
    epsilon: float
    method: str


def subcritical_certificate(g: RotationGraph, p: float, v: int,
                            max_radius: int, epsilon: float = 0.05,
                            n_samples: int = 20000, seed: int = 0):
    """Smallest ball B(v, r), r <= max_radius, with phi_p^v <= 1 - epsilon.
    Monte Carlo regions certify through phi_hat + 3 stderr; returns None when
    no radius certifies."""
    if not 0 < p < 1:
        raise StructuralError("certificates need p in (0, 1)")
    for r in range(1, max_radius + 1):
        region = PhiRegion.ball(g, v, r)
        est = phi(g, p, region, method="auto", n_samples=n_samples, seed=seed)
        bound = est.value if est.stderr is None else est.value + 3 * est.stderr
        if bound <= 1 - epsilon:
            return SubcriticalCertificate(v=int(v), radius=r,
                                          phi_value=est.value,
                                          phi_stderr=est.stderr,
                                          epsilon=epsilon, method=est.method)
    return None


def theta_lower_bound(p: float, p_tilde: float, epsilon: float = 0.0) -> float:
    """Closed-form lower bound 1 - ((1-p)/(1-p_tilde))^(1-epsilon) for the
    percolation probability above a certified threshold p_tilde."""
    if not 0 <= p_tilde < 1:
        raise StructuralError("p_tilde must lie in [0, 1)")
    if p <= p_tilde:
        raise StructuralError("bound defined for p > p_tilde only")
    if not 0 <= epsilon < 1:
        raise StructuralError("epsilon must lie in [0, 1)")
    if p >= 1:
        return 1.0
    return 1.0 - ((1.0 - p) / (1.0 - p_tilde)) ** (1.0 - epsilon)


# ---------------------------------------------------------------------------
# derivative inequality
# ---------------------------------------------------------------------------

@dataclass
class RussoReport:
    v: int
    lam: list
    grid: list
    lhs: list          # exact d/dp P(v <-> complement of lam)
    rhs: list          # (1/(1-p)) * min_r phi_r(p) * (1 - P)
    holds: bool
    worst_margin: Fraction
    worst_p: Fraction


def russo_inequality_check(g: RotationGraph, v: int, lam, p_grid=None,
                           max_ball_radius: int = 3) -> RussoReport:
    """Exact-rational check of the derivative inequality

        d/dp P_p(v <-> lam^c) >= (1/(1-p)) * inf_S phi_p^v(S) * (1 - P_p)

    with the infimum restricted to balls B(v, r), 0 <= r <= max_ball_radius
    (r = 0 contributes the constant 1 via the frontier convention)."""
    n = g.n
    if n > EXACT_ENUM_CAP:
        raise ResourceBudgetError(
            f"exact check capped at {EXACT_ENUM_CAP} vertices")
    lam = sorted(int(x) for x in lam)
    lamc = [x for x in range(n) if x not in set(lam)]
    if not lamc:
        raise StructuralError("lam must be a proper subset of the vertices")
    fpoly = connection_polynomial(g, v, lamc)
    phis = []
    for r in range(0, max_ball_radius + 1):
        region = PhiRegion.ball(g, v, r)
        phis.append(phi_polynomial(g, region))
    if p_grid is None:
        p_grid = [Fraction(i, 100) for i in range(1, 100)]
    lhs_list, rhs_list = [], []
    holds = True
    worst_margin, worst_p = None, None
    for p in p_grid:
        p = Fraction(p)
        lhs = fpoly.derivative(p)
        inf_phi = min(poly.value(p) for poly in phis)
        rhs = Fraction(1, 1) / (1 - p) * inf_phi * (1 - fpoly.value(p))
        lhs_list.append(lhs)
        rhs_list.append(rhs)
        margin = lhs - rhs
        if worst_margin is None or margin < worst_margin:
            worst_margin, worst_p = margin, p
        if margin < 0:
            holds = False
    return RussoReport(v=int(v), lam=lam, grid=list(p_grid), lhs=lhs_list,
                       rhs=rhs_list, holds=holds, worst_margin=worst_margin,
                       worst_p=worst_p)


# ---------------------------------------------------------------------------
# exponential decay fits
# ---------------------------------------------------------------------------

@dataclass
class DecayFit:
    p: float
    mode: str
    endpoints: str
    distances: list
    hits: list
    n_samples: int
    estimates: list      # smoothed probabilities
    slope: float
    intercept: float
    stderr: float
    ci95: tuple
    r2: float

    @property
    def c_p(self) -> float:
        return -self.slope

    def ci_excludes_zero(self) -> bool:
        lo, hi = self.ci95
        return hi < 0 or lo > 0


def auto_pair_schedule(mg: MatchingGraph, d_min: int, d_max: int,
                       base: int = 0) -> list:
    """Pairs (base, v) at star distances d_min..d_max whose endpoints both
    keep a distance to the truncation boundary of at least their mutual
    distance; v is the smallest qualifying vertex id."""
    g = mg.base
    dstar = mg.distances_from([base])
    margin = g.distances_from(np.where(g.boundary)[0])
    pairs = []
    for d in range(d_min, d_max + 1):
        if margin[base] < d:
            break
        cand = np.where((dstar == d) & (margin >= d))[0]
        if cand.shape[0] == 0:
            continue
        pairs.append((int(base), int(cand[0]), d))
    return pairs


def decay_fit(graph, p: float, pairs, n_samples: int, seed: int = 0,
              mode: str = "graph", endpoints: str = "vertex",
              threads: int = 1) -> DecayFit:
    """Least-squares fit of log P_hat(u <-> v) against star distance.

    `pairs` are (u, v, distance) triples at strictly increasing distances.
    Zero-hit cells get the half-count smoothing (hits+0.5)/(n+1), which only
    affects unresolvable tails. The 95% CI uses the t quantile with
    len(pairs)-2 degrees of freedom.
    """
    if len(pairs) < 3:
        raise StructuralError("need at least 3 pairs to fit a slope")
    dists = [d for (_u, _v, d) in pairs]
    if any(b <= a for a, b in zip(dists, dists[1:])):
        raise StructuralError("pair distances must be strictly increasing")
    if isinstance(graph, MatchingGraph):
        indptr, indices = graph.indptr, graph.neighbors
        base = graph.base
        if mode == "graph":
            indptr, indices = base.indptr, base.neighbors
    else:
        if mode == "star" or endpoints == "star_boundary":
            raise StructuralError("star variants need a MatchingGraph")
        indptr, indices = graph.indptr, graph.neighbors
    if endpoints == "vertex":
        a_sets = [[u] for (u, _v, _d) in pairs]
        b_sets = [[v] for (_u, v, _d) in pairs]
    else:
        a_sets = [[int(x) for x in graph.neighborhood(u)] for (u, _v, _d) in pairs]
        b_sets = [[int(x) for x in graph.neighborhood(v)] for (_u, v, _d) in pairs]
    hits = mc_pair_hits(indptr, indices, a_sets, b_sets, p, seed,
                        n_samples, 1, threads)
    if int(hits.max()) == 0:
        raise ValueError("decay too fast to resolve; increase samples")
    est = [(int(h) + 0.5) / (n_samples + 1) for h in hits]
    logs = [math.log(e) for e in est]
    reg = scipy.stats.linregress(dists, logs)
    tq = float(scipy.stats.t.ppf(0.975, len(pairs) - 2))
    ci = (reg.slope - tq * reg.stderr, reg.slope + tq * reg.stderr)
    return DecayFit(p=float(p), mode=mode, endpoints=endpoints,
                    distances=list(dists), hits=[int(h) for h in hits],
                    n_samples=n_samples, estimates=est, slope=float(reg.slope),
                    intercept=float(reg.intercept), stderr=float(reg.stderr),
                    ci95=ci, r2=float(reg.rvalue ** 2))
