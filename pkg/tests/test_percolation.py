import math
from fractions import Fraction

import numpy as np
import pytest

from hyperperc import _kernels
from hyperperc import percolation as perc
from hyperperc.errors import StructuralError
from hyperperc.matching import matching_graph
from hyperperc.planar import RotationGraph
from hyperperc.tiling import TilingSpec, build_ball, build_path, build_square


def test_sample_extremes(ball37_r4):
    g = ball37_r4
    assert perc.sample(g, 0.0, 1, 0).states.sum() == 0
    assert perc.sample(g, 1.0, 1, 0).states.sum() == g.n
    with pytest.raises(StructuralError):
        perc.sample(g, 1.5, 1, 0)


def test_sample_concentration():
    g = build_ball(TilingSpec(3, 7, 9))
    assert g.n >= 1e4
    conf = perc.sample(g, 0.5, 123, 0)
    assert abs(conf.open_fraction() - 0.5) <= 4 * math.sqrt(0.25 / g.n)


def test_sample_deterministic(ball37_r4):
    a = perc.sample(ball37_r4, 0.37, 99, 5)
    b = perc.sample(ball37_r4, 0.37, 99, 5)
    assert np.array_equal(a.states, b.states)
    c = perc.sample(ball37_r4, 0.37, 99, 6)
    assert not np.array_equal(a.states, c.states)


def test_monotone_coupling(ball37_r4):
    u = _kernels.uniforms(ball37_r4.n, 42, 3)
    for p1, p2 in ((0.2, 0.5), (0.5, 0.8), (0.0, 1.0)):
        s1 = perc.sample(ball37_r4, p1, 42, 3).states
        s2 = perc.sample(ball37_r4, p2, 42, 3).states
        assert np.all(s1 <= s2)
        assert np.array_equal(s1, (u < p1).astype(np.uint8))


def test_full_cluster(ball37_r4):
    conf = perc.sample(ball37_r4, 1.0, 0, 0)
    lab = perc.label_clusters(ball37_r4, conf, 1, "graph")
    assert lab.n_clusters == 1
    assert lab.largest_size() == ball37_r4.n
    assert lab.touches_boundary.all()


def test_square_star_vs_graph_labelling():
    sq = build_square()
    mg = matching_graph(sq)
    conf = perc.Configuration(states=np.array([0, 1, 0, 1], dtype=np.uint8),
                              p=0.5, seed=0, sample_index=0)
    star = perc.label_clusters(mg, conf, 0, "star")
    graph = perc.label_clusters(mg, conf, 0, "graph")
    assert star.n_clusters == 1
    assert graph.n_clusters == 2


def _bfs_labels(g, states, state):
    labels = np.full(g.n, -1, dtype=np.int64)
    nxt = 0
    for s in range(g.n):
        if states[s] != state or labels[s] >= 0:
            continue
        stack = [s]
        labels[s] = nxt
        while stack:
            v = stack.pop()
            for w in g.rotation(v):
                w = int(w)
                if states[w] == state and labels[w] < 0:
                    labels[w] = nxt
                    stack.append(w)
        nxt += 1
    return labels, nxt


def test_union_find_matches_bfs_oracle():
    g = build_ball(TilingSpec(3, 7, 6))
    assert g.n > 1000
    rng_seed = 71
    for i in range(60):
        conf = perc.sample(g, 0.5, rng_seed, i)
        lab = perc.label_clusters(g, conf, 1, "graph")
        ref, n_ref = _bfs_labels(g, conf.states, 1)
        assert lab.n_clusters == n_ref
        act = conf.states == 1
        # same partition: the label maps must be related by a bijection
        pairs = set(zip(lab.labels[act].tolist(), ref[act].tolist()))
        assert len(pairs) == n_ref


def test_two_point_trivial(ball37_r4):
    est = perc.two_point(ball37_r4, 1.0, 0, 5, 200, seed=1)
    assert est.p_hat == 1.0
    est = perc.two_point(ball37_r4, 0.0, 0, 5, 200, seed=1)
    assert est.p_hat == 0.0


def test_exact_poly_examples():
    p = Fraction(2, 7)
    edge = build_path(2)
    assert perc.exact_connection_poly(edge, 0, [1], p) == p * p
    path3 = build_path(3)
    assert perc.exact_connection_poly(path3, 0, [2], p) == p ** 3
    tri = RotationGraph([[1, 2], [2, 0], [0, 1]], [True] * 3, validate=None)
    assert perc.exact_connection_poly(tri, 0, [1], p) == p * p
    # self-connection: a vertex reaches itself iff open
    assert perc.exact_connection_poly(edge, 0, [0], p) == p


def test_exact_poly_cap():
    g = build_ball(TilingSpec(3, 7, 2))
    from hyperperc.errors import ResourceBudgetError
    with pytest.raises(ResourceBudgetError):
        perc.connection_polynomial(g, 0, [1])


def test_two_point_matches_exact():
    g = build_ball(TilingSpec(3, 7, 1))
    for p in (0.3, 0.5, 0.7):
        for target in (1, 3, 6):
            seed = int(p * 100) * 31 + target
            est = perc.two_point(g, p, 0, target, 30000, seed=seed)
            exact = float(perc.exact_connection_poly(g, 0, [target], p))
            assert abs(est.p_hat - exact) <= 3 * max(est.stderr, 1e-9)


def test_pair_hits_threads_deterministic(ball37_r4):
    g = ball37_r4
    h1 = perc.mc_pair_hits(g.indptr, g.neighbors, [[0]], [[5]], 0.5, 3, 500, 1)
    h4 = perc.mc_pair_hits(g.indptr, g.neighbors, [[0]], [[5]], 0.5, 3, 500, 1,
                           threads=4)
    assert np.array_equal(h1, h4)


def test_boundary_cluster_count(ball37_r8):
    g = ball37_r8
    assert perc.boundary_cluster_count(g, perc.sample(g, 1.0, 0, 0), 1, 2) == 1
    assert perc.boundary_cluster_count(g, perc.sample(g, 0.0, 0, 0), 1, 2) == 0
    counts = perc.crossing_counts(g, 0.5, 2, 300, 11, 1)
    assert counts.mean() >= 1.5


def test_crossing_matches_per_config(ball37_r4):
    g = ball37_r4
    counts = perc.crossing_counts(g, 0.6, 1, 20, 5, 1)
    for i in range(20):
        conf = perc.sample(g, 0.6, 5, i)
        assert perc.boundary_cluster_count(g, conf, 1, 1) == int(counts[i])


def test_outer_boundary_isolated_vertex(ball37_r8):
    g = ball37_r8
    mg = matching_graph(g)
    states = np.ones(g.n, dtype=np.uint8)
    states[0] = 0
    conf = perc.Configuration(states=states, p=0.9, seed=0, sample_index=0)
    walk = perc.outer_boundary(mg, conf, [0])
    assert walk[0] == walk[-1]
    assert sorted(set(walk)) == sorted(int(x) for x in g.rotation(0))
    assert len(walk) - 1 == 7
    assert perc.verify_enclosure(mg, walk, [0])


def test_outer_boundary_45_diagonal_pair():
    g = build_ball(TilingSpec(4, 5, 3))
    mg = matching_graph(g)
    faces = g.faces()
    # an interior square and one of its diagonals
    sq = faces.records[faces.corner_faces(0)[0]]
    a, b, c, d = sq.walk
    states = np.ones(g.n, dtype=np.uint8)
    states[a] = states[c] = 0
    conf = perc.Configuration(states=states, p=0.9, seed=0, sample_index=0)
    walk = perc.outer_boundary(mg, conf, [a, c])
    assert walk[0] == walk[-1]
    assert states[list(set(walk))].all()
    assert b in walk and d in walk
    for w in set(walk):
        assert any(x in (a, c) for x in mg.neighborhood(w))
    for w1, w2 in zip(walk, walk[1:]):
        assert g.has_edge(w1, w2)
    assert perc.verify_enclosure(mg, walk, [a, c])


def test_outer_boundary_orientation_starts_minimal(ball37_r8):
    g = ball37_r8
    mg = matching_graph(g)
    states = np.ones(g.n, dtype=np.uint8)
    states[3] = 0
    conf = perc.Configuration(states=states, p=0.9, seed=0, sample_index=0)
    walk = perc.outer_boundary(mg, conf, [3])
    order = g.vertex_order()
    assert order[walk[0]] == min(order[w] for w in set(walk))


def test_outer_boundary_sampled_clusters(ball37_r8):
    g = ball37_r8
    mg = matching_graph(g)
    checked = 0
    for i in range(10):
        conf = perc.sample(g, 0.7, 31, i)
        for cl in perc.finite_interior_zero_star_clusters(mg, conf):
            walk = perc.outer_boundary(mg, conf, cl)
            assert conf.states[list(set(walk))].all()
            assert perc.verify_enclosure(mg, walk, cl)
            checked += 1
    assert checked > 50


def test_outer_boundary_rejects_open_cluster(ball37_r8):
    mg = matching_graph(ball37_r8)
    conf = perc.sample(ball37_r8, 1.0, 0, 0)
    with pytest.raises(StructuralError):
        perc.outer_boundary(mg, conf, [0])
