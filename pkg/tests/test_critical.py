import math
from fractions import Fraction

import numpy as np
import pytest

from hyperperc import critical as crit
from hyperperc.errors import StructuralError
from hyperperc.matching import matching_graph
from hyperperc.tiling import TilingSpec, build_ball, build_path, build_star


def test_phi_path_closed_form():
    """On a path, a radius-n region around the center forces n consecutive
    open vertices toward either end: phi = 2 p^n, checked as exact
    polynomials in the power basis."""
    for n in range(1, 11):
        pg = build_path(2 * n + 1)
        reg = crit.PhiRegion(pg, n, range(2 * n + 1))
        poly = crit.phi_polynomial(pg, reg)
        # expand sum_k c_k p^k (1-p)^(m-k) exactly at m+1 rational nodes and
        # compare with 2 p^n there; equal values at > deg points => equal polys
        for i in range(poly.n + 2):
            p = Fraction(i, poly.n + 2)
            assert poly.value(p) == 2 * p ** n


def test_phi_frontier_branch(ball37_r4):
    reg = crit.PhiRegion(ball37_r4, 0, [0, 1])
    assert not reg.v_interior
    assert crit.phi(ball37_r4, 0.5, reg).value == 1.0


def test_phi_monotone_in_p(ball37_r4):
    reg = crit.PhiRegion.ball(ball37_r4, 0, 2)
    vals = [crit.phi(ball37_r4, p, reg, method="exact").value
            for p in np.linspace(0.05, 0.95, 10)]
    assert all(b >= a for a, b in zip(vals, vals[1:]))


def test_phi_mc_matches_exact():
    g = build_ball(TilingSpec(3, 7, 6))
    v = int(np.where(g.distances_from([0]) == 4)[0][0])
    reg = crit.PhiRegion.ball(g, v, 2)
    assert len(reg.interior) <= 24
    for p in (0.1, 0.3, 0.5):
        exact = crit.phi(g, p, reg, method="exact").value
        mc = crit.phi(g, p, reg, method="monte_carlo", n_samples=30000,
                      seed=int(100 * p))
        assert abs(mc.value - exact) <= 3 * max(mc.stderr, 1e-12)


def test_certificate_path_09():
    pg = build_path(31)
    cert = crit.subcritical_certificate(pg, 0.9, 15, 12, epsilon=0.1)
    assert cert is not None
    assert cert.radius == 8  # first radius with 2 * 0.9^r <= 0.9
    assert cert.phi_value == pytest.approx(2 * 0.9 ** 8)


def test_certificate_tiny_p(ball37_r4):
    cert = crit.subcritical_certificate(ball37_r4, 1e-9, 0, 3)
    assert cert is not None and cert.radius == 1
    assert cert.phi_value == pytest.approx(0.0, abs=1e-6)


def test_certificate_absent(ball37_r4):
    # far above the threshold no small ball certifies
    assert crit.subcritical_certificate(ball37_r4, 0.95, 0, 3) is None


def test_certificate_37_low_p():
    g = build_ball(TilingSpec(3, 7, 6))
    cert = crit.subcritical_certificate(g, 0.15, 0, 4, epsilon=0.05,
                                        n_samples=30000, seed=4)
    assert cert is not None


def test_theta_bound_values():
    assert crit.theta_lower_bound(0.7, 0.4, 0.0) == pytest.approx(0.5)
    assert crit.theta_lower_bound(1.0, 0.4, 0.0) == 1.0
    assert crit.theta_lower_bound(0.4 + 1e-12, 0.4) == pytest.approx(0.0, abs=1e-9)
    with pytest.raises(StructuralError):
        crit.theta_lower_bound(0.3, 0.4)


def test_theta_bound_monotonicity():
    ps = np.linspace(0.45, 0.99, 20)
    vals = [crit.theta_lower_bound(p, 0.4, 0.1) for p in ps]
    assert all(b >= a for a, b in zip(vals, vals[1:]))
    eps = np.linspace(0.0, 0.9, 10)
    vals = [crit.theta_lower_bound(0.7, 0.4, e) for e in eps]
    assert all(b <= a for a, b in zip(vals, vals[1:]))


def test_russo_path5():
    pg = build_path(5)
    rep = crit.russo_inequality_check(pg, 2, [1, 2, 3])
    assert rep.holds
    assert rep.worst_margin >= 0


def test_russo_star():
    st = build_star(4)
    rep = crit.russo_inequality_check(st, 0, [0])
    assert rep.holds
    # the K_{1,4} fixture grazes equality exactly at p = 1/4
    assert rep.worst_margin == 0
    assert rep.worst_p == Fraction(1, 4)


def test_russo_small_ball():
    g = build_ball(TilingSpec(3, 7, 1))
    interior = [0]
    rep = crit.russo_inequality_check(g, 0, interior)
    assert rep.holds


def test_decay_p1_flat(ball37_r8):
    mg = matching_graph(ball37_r8)
    pairs = crit.auto_pair_schedule(mg, 1, 4)
    fit = crit.decay_fit(mg, 1.0, pairs, 500, seed=2)
    assert fit.slope == pytest.approx(0.0, abs=1e-12)


def test_decay_fit_requires_increasing():
    g = build_ball(TilingSpec(3, 7, 6))
    mg = matching_graph(g)
    with pytest.raises(StructuralError):
        crit.decay_fit(mg, 0.5, [(0, 1, 1), (0, 2, 1), (0, 3, 2)], 100)


def test_decay_unresolvable(ball37_r8):
    mg = matching_graph(ball37_r8)
    pairs = crit.auto_pair_schedule(mg, 2, 4)
    assert len(pairs) >= 3
    with pytest.raises(ValueError, match="decay too fast"):
        crit.decay_fit(mg, 0.0001, pairs, 50, seed=1)


def test_auto_pairs_margins():
    g = build_ball(TilingSpec(3, 7, 8))
    mg = matching_graph(g)
    pairs = crit.auto_pair_schedule(mg, 1, 4)
    margin = g.distances_from(np.where(g.boundary)[0])
    for (u, v, d) in pairs:
        assert margin[u] >= d and margin[v] >= d
    assert [d for *_xy, d in pairs] == [1, 2, 3, 4]
