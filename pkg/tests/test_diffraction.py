import numpy as np
import pytest
from scipy.special import j1

from fqc import gallery
from fqc.diffraction import (autocorrelation_estimate, decay_check, exp_sum, exp_sum_sweep,
                             lattice_control, number_variance, number_variance_sweep,
                             poisson_control, stealth_probe)
from fqc.errors import WindowTooSmall
from fqc.pointset import ball_volume, enumerate_points


def test_exp_sum_at_zero_counts_points(running_points):
    S = exp_sum(running_points, (0.0, 0.0), 10.0)
    count = np.sum(np.linalg.norm(running_points.points, axis=1) <= 10.0)
    assert S == pytest.approx(count)


def test_exp_sum_rejects_oversized_ball(running_points):
    with pytest.raises(WindowTooSmall):
        exp_sum(running_points, (0.0, 0.0), 25.0)


def test_golden_site_mass(running_points):
    rep = exp_sum_sweep(running_points, [gallery.GOLDEN_XI], [5, 10, 19], [gallery.GOLDEN_C])
    ratio = rep.rows[-1]["ratio"]
    assert ratio == pytest.approx(np.conj(gallery.GOLDEN_C), abs=0.05)
    assert max(rep.drift[0]) < 3.0


def test_exp_sum_vanishes_off_spectrum(running_points):
    # xi = (0.5, 0.5 sqrt 5) is not of the form L^t k
    S = exp_sum(running_points, (0.5, 0.5 * np.sqrt(5)), 19.0)
    assert abs(S) / ball_volume(19.0, 2) < 0.02


def test_lattice_control_density():
    lat = lattice_control(4.0, [-10, 10, -10, 10])
    assert len(lat) == 41 * 41
    assert lat.min_gap == pytest.approx(0.5)


def test_poisson_control_is_seeded():
    a = poisson_control(4.0, [-5, 5, -5, 5], seed=1)
    b = poisson_control(4.0, [-5, 5, -5, 5], seed=1)
    assert np.array_equal(a.points, b.points)
    assert len(a) == pytest.approx(400, rel=0.2)


def test_number_variance_shape(running_points):
    nv = number_variance(running_points, 5.0, centers=50, density=gallery.RUNNING_DENSITY)
    assert nv["scaled_variance"] == pytest.approx(nv["variance"] * ball_volume(5.0, 2), rel=1e-12)
    assert nv["sup_dev_over_R_pow"] == pytest.approx(nv["sup_dev"] / 5.0)


def test_decay_check_separates_from_poisson(running_points):
    Rs = [1, 2, 4, 8]
    window = [-20, 20, -20, 20]
    sweep = number_variance_sweep(running_points, Rs, centers=400, density=gallery.RUNNING_DENSITY)
    control = number_variance_sweep(poisson_control(gallery.RUNNING_DENSITY, window), Rs, centers=400)
    assert decay_check(sweep)
    assert not decay_check(control)
    assert not decay_check(sweep, min_octaves=4)


def test_autocorrelation_is_symmetric(running_points):
    ac = autocorrelation_estimate(running_points, bins=40, cutoff=1.5, radius=15)
    h = ac["hist"]
    assert h.shape == (41, 41)
    assert np.allclose(h, h[::-1, ::-1])
    assert h[20, 20] == pytest.approx(gallery.RUNNING_DENSITY, rel=0.05)


def test_stealth_probe_only_sees_origin_leakage(running_points):
    # near 0 the only nearby atom is c0 at the origin; a ball of radius R smears it
    # into c0 * 2 J1(z) / z with z = 2 pi R |xi|
    R = 19.0
    xis = np.array([(0.12, 0.0), (0.0, 0.12), (0.08, 0.08), (0.2, -0.1)])
    z = 2 * np.pi * R * np.linalg.norm(xis, axis=1)
    leak = gallery.RUNNING_DENSITY * np.abs(2 * j1(z) / z)
    vals = stealth_probe(running_points, xis, R)
    assert np.all(np.abs(vals - leak) < 0.03)


@pytest.mark.xfail(strict=True, reason="a sharp ball of radius 20 leaks about c0 * 2 J1(z) / z from the "
                   "origin atom, far above 1e-3; see test_stealth_probe_only_sees_origin_leakage")
def test_stealth_gap_literal_threshold(running):
    curve, L = running
    qw = enumerate_points(curve, L, [-21, 21, -21, 21])
    # 0 < |xi| < smallest nonzero |L^t k| = 1; |S_R(xi)| / Vol(B_R) <= 1e-3 at R = 20 as stated
    rng = np.random.default_rng(0)
    ang = rng.uniform(0, 2 * np.pi, 100)
    rad = np.sqrt(rng.uniform(0.01, 1, 100)) * 0.99
    xis = np.column_stack([rad * np.cos(ang), rad * np.sin(ang)])
    assert np.all(stealth_probe(qw, xis, 20.0) <= 1e-3)
