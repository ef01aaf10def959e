import numpy as np
import pytest
from scipy.optimize import fsolve
from scipy.spatial import cKDTree

from fqc import gallery
from fqc.diffraction import lattice_control
from fqc.errors import TooFewPoints, WindowEmpty
from fqc.pointset import (almost_period_probe, ball_volume, count_in_ball, delone_stats,
                          enumerate_points, enumerate_points_product, line_probe)


def newton_oracle(equations, box, seeds):
    """Distinct zeros of ``equations`` found by fsolve from a uniform seed grid."""
    f = lambda x: equations(x)[0]  # noqa: E731
    found = []
    grid = np.linspace(box[0] - 0.2, box[1] + 0.2, seeds)
    for a in grid:
        for b in grid:
            x, _, ier, _ = fsolve(f, [a, b], full_output=True, xtol=1e-13)
            if ier == 1 and np.max(np.abs(f(x))) < 1e-10 and np.all((x >= box[0]) & (x <= box[1])):
                found.append(x)
    found = np.array(found)
    return found[np.unique(np.round(found, 7), axis=0, return_index=True)[1]]


def test_running_points_satisfy_equations(running_points):
    qw = running_points
    assert qw.residuals.max() <= 1e-9
    assert np.max(np.abs(gallery.running_equations(qw.points))) < 1e-9
    assert qw.min_gap > 0.2


def test_running_points_match_newton_oracle(running):
    curve, L = running
    qw = enumerate_points(curve, L, [-2, 2, -2, 2])
    ref = newton_oracle(gallery.running_equations, (-2, 2), 81)
    assert len(ref) == len(qw)
    assert cKDTree(qw.points).query(ref)[0].max() < 1e-10


def test_subwindow_consistency(running, running_points):
    curve, L = running
    small = enumerate_points(curve, L, [-4, 3, -2, 5])
    big = running_points.restrict([-4, 3, -2, 5])
    assert len(small) == len(big)
    assert np.allclose(small.points, big.points, atol=1e-10)


def test_lift_labels_reproduce_points(running, running_points):
    curve, L = running
    qw = running_points
    lift = curve.phase_lift()
    th = lift.theta(qw.us).T + qw.ks
    assert np.allclose(qw.points @ L.entries.T, th, atol=1e-9)


def test_delone_and_density(running_points):
    st = delone_stats(running_points, probes=60)
    assert st["min_gap"] > 0.2
    assert st["covering_radius"] < 1.0
    assert st["density"] == pytest.approx(gallery.RUNNING_DENSITY, rel=0.02)


def test_count_in_ball(running_points):
    assert count_in_ball(running_points, (0, 0), 18) == pytest.approx(
        gallery.RUNNING_DENSITY * ball_volume(18, 2), rel=0.02)


def test_empty_and_sparse_windows(running, running_points):
    curve, L = running
    x = running_points.points[0]
    box = [x[0] - 1e-3, x[0] + 1e-3, x[1] - 1e-3, x[1] + 1e-3]
    assert len(enumerate_points(curve, L, box)) == 1
    with pytest.raises(TooFewPoints):
        delone_stats(running_points.restrict(box))
    with pytest.raises(WindowEmpty):
        enumerate_points(curve, L, [x[0] + 0.01, x[0] + 0.02, x[1] + 0.01, x[1] + 0.02])


def test_line_probe_counts_do_not_scale(running_points, rng):
    for _ in range(5):
        idx = rng.choice(len(running_points), 2, replace=False)
        a, b = running_points.points[idx]
        step = (b - a) / 50
        c100 = line_probe(running_points, a, step, 100)["count"]
        c200 = line_probe(running_points, a, step, 200)["count"]
        assert c100 == c200


def test_line_probe_on_lattice_scales():
    lat = lattice_control(1.0, [-300, 300, -300, 300])
    c100 = line_probe(lat, (0, 0), (1, 1), 100)["count"]
    c200 = line_probe(lat, (0, 0), (1, 1), 200)["count"]
    assert (c100, c200) == (201, 401)


def test_line_probe_rejects_zero_step(running_points):
    with pytest.raises(ValueError):
        line_probe(running_points, (0, 0), (0, 0), 10)


def test_almost_periods_shrink_with_eps(running, running_points):
    curve, L = running
    big = almost_period_probe(curve, L, 0.3, [-8, 8, -8, 8], window=[-4, 4, -4, 4], qw=running_points)
    small = almost_period_probe(curve, L, 0.03, [-8, 8, -8, 8], window=[-4, 4, -4, 4], qw=running_points)
    big_t = {tuple(np.round(t["tau"], 9)) for t in big["taus"]}
    small_t = {tuple(np.round(t["tau"], 9)) for t in small["taus"]}
    assert small_t <= big_t
    assert (0.0, 0.0) in small_t
    assert all(t["hausdorff"] <= 0.3 for t in big["taus"])


def test_product_points(product2):
    pcurve, L = product2
    qw = enumerate_points_product(pcurve, L, [-4, 4, -4, 4])
    assert len(qw) > 0
    assert qw.residuals.max() <= 1e-8
    assert np.max(np.abs(gallery.product2_equations(qw.points))) <= 1e-8
    ref = newton_oracle(gallery.product2_equations, (-2, 2), 81)
    inner = qw.restrict([-2, 2, -2, 2])
    assert len(ref) == len(inner)
    assert cKDTree(inner.points).query(ref)[0].max() < 1e-9


def test_shifted_windows_agree_on_overlap(running):
    curve, L = running
    v = np.array([0.37, -1.21])
    a = enumerate_points(curve, L, [-5, 5, -5, 5])
    b = enumerate_points(curve, L, [-5 + v[0], 5 + v[0], -5 + v[1], 5 + v[1]])
    overlap = [-5 + v[0], 5, -5, 5 + v[1]]
    pa, pb = a.restrict(overlap).points, b.restrict(overlap).points
    assert len(pa) == len(pb)
    assert np.allclose(pa, pb, atol=1e-10)


def test_single_block_product_is_plain_enumeration(running):
    from fqc.curve import product_curve
    curve, L = running
    a = enumerate_points_product(product_curve([curve]), L, [-4, 4, -4, 4])
    b = enumerate_points(curve, L, [-4, 4, -4, 4])
    assert np.array_equal(a.points, b.points)
