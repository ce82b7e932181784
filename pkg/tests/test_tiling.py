import numpy as np
import pytest

from hyperperc.errors import ResourceBudgetError, StructuralError
from hyperperc.planar import curvature_coefficient
from hyperperc.tiling import (TilingSpec, build_ball, build_path,
                              build_reference_tree, build_square, build_star)


def test_spec_regimes():
    TilingSpec(3, 7, 2)
    TilingSpec(4, 5, 2)
    with pytest.raises(StructuralError):
        TilingSpec(4, 4, 2)
    TilingSpec(4, 4, 2, non_paper_regime=True)
    with pytest.raises(StructuralError):
        TilingSpec(2, 7, 1)


def test_radius_zero():
    g = build_ball(TilingSpec(3, 7, 0))
    assert g.n == 1 and bool(g.boundary[0])
    assert len(g.faces().records) == 0


def test_r1_counts():
    g = build_ball(TilingSpec(3, 7, 1))
    assert g.n == 8
    assert sum(1 for r in g.faces().records if r.finite) == 7
    g44 = build_ball(TilingSpec(4, 4, 1, non_paper_regime=True))
    assert g44.n == 9
    assert curvature_coefficient(g44, 0) == 0


def test_interior_structure(ball37_r4, ball45_r4):
    from fractions import Fraction
    for g, p, q, kappa in ((ball37_r4, 3, 7, Fraction(-1, 3)),
                           (ball45_r4, 4, 5, Fraction(-1, 2))):
        dist = g.distances_from([0])
        interior = ~g.boundary
        assert np.array_equal(interior, dist < dist[g.boundary].min())
        faces = g.faces()
        for v in np.where(interior)[0]:
            v = int(v)
            assert g.degree(v) == q
            assert curvature_coefficient(g, v) == kappa
            for fid in faces.corner_faces(v):
                rec = faces.records[fid]
                assert rec.finite and rec.degree == p


def test_ball_growth_super_linear():
    sizes = [build_ball(TilingSpec(3, 7, r)).n for r in range(2, 10)]
    for a, b in zip(sizes, sizes[1:]):
        assert b / a >= 1.5


def test_budget_error():
    with pytest.raises(ResourceBudgetError):
        build_ball(TilingSpec(3, 7, 10), budget=1000)


def test_reference_tree_counts():
    g = build_reference_tree(2, 1)
    assert g.n == 3
    g = build_reference_tree(2, 2)
    assert g.n == 9  # root + 2 + 6
    degs = sorted(g.degree(v) for v in range(g.n))
    assert degs.count(1) == 6  # leaves
    assert g.degree(0) == 2
    # interior non-root vertices have degree n+2 = 4
    interior = [v for v in range(g.n) if not g.boundary[v] and v != 0]
    assert all(g.degree(v) == 4 for v in interior)
    g1 = build_reference_tree(1, 3)
    assert g1.n == 1 + 1 + 2 + 4


def test_reference_tree_single_infinite_face():
    g = build_reference_tree(2, 3)
    faces = g.faces()
    assert len(faces.records) == 1
    assert not faces.records[0].finite
    assert faces.records[0].degree == 2 * g.n_edges


def test_fixtures():
    pg = build_path(5)
    assert pg.degree(0) == 1 and pg.degree(2) == 2
    assert bool(pg.boundary[0]) and not pg.boundary[2]
    st = build_star(4)
    assert st.degree(0) == 4
    sq = build_square()
    assert [r.finite for r in sq.faces().records].count(True) == 1
