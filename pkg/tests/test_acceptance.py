"""The twelve acceptance criteria, one test each, at their stated tolerances.

conftest.py prints one PASS/FAIL line per criterion in the terminal summary.
"""
import itertools
import math
import time

import numpy as np
import pytest

from fqc import gallery, fourier, spectrum
from fqc.cli import summation_check
from fqc.curve import phase_lift, u_to_t
from fqc.diffraction import (decay_check, exp_sum_sweep, lattice_control, number_variance,
                             number_variance_sweep, poisson_control)
from fqc.fourier import Gaussian, c_lk_batch, hermitian_defect, mhat_batch, mhat_residue
from fqc.pointset import ball_volume, count_in_ball, enumerate_points, enumerate_points_product, line_probe
from fqc.varcomb import cauchy_binet_check, plucker, random_positive_matrix, var, var_array, varbar

SEED = 0x5EED
# Regression-pinned bound for sup |N_R(x) - c0 Vol(B_R)| / R over 50 centres.
# Measured maxima: 0.93 with seed 0x5EED, 1.07 over seeds 1 to 3.
SUP_DEV_CONSTANT = 1.5
# Regression-pinned bound for |S_R(xi) - conj(c_xi) Vol(B_R)| / R; measured maximum 1.13.
DRIFT_CONSTANT = 2.0


@pytest.fixture(scope="module")
def running40(running):
    curve, L = running
    return enumerate_points(curve, L, [-20, 20, -20, 20])


def test_criterion_01_density(running):
    curve, L = running
    t0 = time.perf_counter()
    qw = enumerate_points(curve, L, [-20, 20, -20, 20])
    assert qw.residuals.max() <= 1e-9
    est = count_in_ball(qw, (0, 0), 18) / ball_volume(18, 2)
    print(f"density at R=18: {est:.5f}")
    assert abs(est - 4.14626) <= 0.02 * 4.14626
    for R in (5, 10, 15):
        nv = number_variance(qw, R, centers=50, seed=SEED, density=gallery.RUNNING_DENSITY)
        print(f"R={R}: sup deviation / R = {nv['sup_dev_over_R_pow']:.3f}")
        assert nv["sup_dev_over_R_pow"] <= SUP_DEV_CONSTANT
    assert time.perf_counter() - t0 < 30


def test_criterion_02_polytope_volume():
    L = gallery.running_matrix()
    t0 = time.perf_counter()
    total = spectrum.var_polytope_volume(L).total
    expected = (10 * math.sqrt(2) + 3 * math.sqrt(3)) / 9
    assert abs(total - expected) <= 1e-8
    rep = spectrum.growth_check(L, [40])
    ratio = rep["rows"][0]["ratio"]
    print(f"volume {total:.12f}, count/R^3 at R=40: {ratio:.5f}")
    assert abs(ratio - expected) <= 0.05 * expected
    assert time.perf_counter() - t0 < 10


def test_criterion_03_zero_coefficient(running):
    curve, L = running
    c0 = fourier.c_lk(curve, L, (0, 0, 0))
    assert abs(c0 - (1 + math.sqrt(2) + math.sqrt(3))) <= 1e-10
    # every d_I is 1 for three degree-one factors
    assert curve.multidegree == {I: 1 for I in L.plucker}
    assert fourier.density_from_multidegree(curve, L) == math.fsum(L.plucker.values())
    assert fourier.density_from_multidegree(curve, L) == gallery.RUNNING_DENSITY


def test_criterion_04_golden_coefficient(running):
    curve, L = running
    xi = np.array([math.sqrt(2) - 1, -math.sqrt(3) - 1])
    # Derived step: the preimage is not assumed. Enumerate every site in a
    # window around xi and keep the k with L^t k = xi.
    sup = spectrum.enumerate_spectrum(L, [-1, 1, -3, -2])
    pre = sup.preimages(xi)
    print(f"preimages of xi: {pre}")
    assert pre == [(-1, -1, -1)]
    k = np.array(pre[0])
    assert np.allclose(k @ L.entries, xi, atol=1e-14) and var(k) < L.d
    c = fourier.c_lk(curve, L, pre[0])
    print(f"c_xi = {c:.12f}")
    assert abs(c - (-0.94053 + 0.132548j)) <= 1e-5


def test_criterion_05_vanishing(running, rng):
    curve, _ = running
    ks = []
    while len(ks) < 200:
        k = rng.integers(-8, 9, size=3)
        if var(k) >= 2:
            ks.append(k)
    vals, _ = mhat_batch(curve, np.array(ks))
    print(f"max |mhat| over var(k) >= 2: {np.max(np.abs(vals)):.2e}")
    assert np.max(np.abs(vals)) <= 1e-9


def test_criterion_06_residue_oracle(running):
    curve, _ = running
    t0 = time.perf_counter()
    ks = list(itertools.product(range(-5, 6), repeat=3))
    quad, _ = mhat_batch(curve, ks)
    res = np.array([[mhat_residue(curve, i, k) for i in range(3)] for k in ks])
    diff = np.abs(quad - res)
    print(f"{diff.size} comparisons, max difference {diff.max():.2e}")
    assert diff.size == 3993
    assert diff.max() <= 1e-10
    assert time.perf_counter() - t0 < 60


def test_criterion_07_summation(running):
    curve, L = running
    t0 = time.perf_counter()
    for sigma, mu in [(0.5, (0.1, -0.2)), (0.7, (0.3, 0.4)), (1.0, (-0.5, 0.25))]:
        rep = summation_check(curve, L, Gaussian(mu, sigma), limit=1e-8)
        print(f"sigma={sigma} mu={mu}: |lhs-rhs|={rep['abs_diff']:.2e} tail={rep['tail_bound']:.2e}")
        assert rep["abs_diff"] <= 1e-6
        assert rep["tail_bound"] <= 1e-8
    assert time.perf_counter() - t0 < 120


def test_criterion_08_diffraction(running):
    curve, L = running
    qw = enumerate_points(curve, L, [-21, 21, -21, 21])
    sup = spectrum.enumerate_spectrum(L, [-3, 3, -3, 3])
    atoms = [a for a in fourier.coefficients_on_window(curve, L, sup)
             if not a.numerically_zero and np.linalg.norm(a.xi) > 0]
    atoms = sorted(atoms, key=lambda a: -abs(a.value))[:5]
    rep = exp_sum_sweep(qw, [a.xi for a in atoms], [5, 10, 20], [a.value for a in atoms])
    for i, a in enumerate(atoms):
        mass = abs(rep.rows[3 * i + 2]["ratio"]) ** 2
        print(f"k={a.k}: |c|^2={abs(a.value) ** 2:.4f} fitted={mass:.4f} drift={np.round(rep.drift[i], 3)}")
        assert max(rep.drift[i]) <= DRIFT_CONSTANT
        assert abs(mass - abs(a.value) ** 2) <= 0.05 * abs(a.value) ** 2
    # number variance: the quasicrystal decays, a Poisson set of equal density does not
    window = [-30, 30, -30, 30]
    big = enumerate_points(curve, L, window)
    Rs = [1, 2, 4, 8]
    sweep = number_variance_sweep(big, Rs, centers=400, seed=SEED, density=gallery.RUNNING_DENSITY)
    control = number_variance_sweep(poisson_control(gallery.RUNNING_DENSITY, window, SEED), Rs,
                                    centers=400, seed=SEED)
    print(f"variance slopes: set {sweep['slope']:.3f}, Poisson {control['slope']:.3f}")
    assert decay_check(sweep)
    assert not decay_check(control)


def test_criterion_09_non_periodicity(running40, rng):
    qw = running40
    near = qw.points[np.linalg.norm(qw.points, axis=1) <= 5]
    for _ in range(20):
        a, p = near[rng.choice(len(near), 2, replace=False)]
        m = max(1, math.ceil(np.linalg.norm(p - a) / 0.07))
        b = (p - a) / m
        c200 = line_probe(qw, a, b, 200)
        c100 = line_probe(qw, a, b, 100)
        assert c200["count"] >= 2
        assert c200["count"] == c100["count"]
    lat = lattice_control(1.0, [-250, 250, -250, 250])
    for b in [(1, 0), (0, 1), (1, 1), (1, -1)]:
        c200 = line_probe(lat, (0, 0), b, 200)["count"]
        c100 = line_probe(lat, (0, 0), b, 100)["count"]
        assert c200 > c100 and c200 == 401


def test_criterion_10_brute_force_spectrum():
    L = gallery.running_matrix()
    for R in (1, 2, 3, 4, 5):
        window = [-R, R, -R, R]
        fast = {k for _, k in spectrum.enumerate_spectrum(L, window).atoms}
        assert fast == spectrum.brute_force_spectrum(L, window, kmax=20)


def test_criterion_11_structural_suite(running, rng):
    curve, L = running
    # var / varbar laws on 1e5 random vectors
    V = rng.integers(-2, 3, size=(100_000, 5))
    vs = var_array(V)
    vb = np.array([varbar(v) for v in V])
    assert np.all(vs <= vb) and np.all(vb <= 4)
    assert np.array_equal(vs, var_array(-V)) and np.array_equal(vs, var_array(V[:, ::-1]))
    nz = np.all(V != 0, axis=1)
    assert np.array_equal(vs[nz], vb[nz])
    # Cauchy-Binet on 1e3 pairs
    for _ in range(1000):
        n = int(rng.integers(2, 6))
        d = int(rng.integers(1, n + 1))
        P = plucker(random_positive_matrix(n, d, rng))
        lhs, rhs = cauchy_binet_check(P, rng.integers(-3, 4, size=(d, n)))
        assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(lhs))
    # involution z -> 1 / conj(z), torus image of the real line, windings
    t = rng.normal(size=50) + 1j * rng.normal(size=50)
    assert np.allclose(curve.psi(np.conj(t)), 1 / np.conj(curve.psi(t)), atol=1e-12)
    u = rng.random(200)
    assert np.allclose(np.abs(curve.psi(u_to_t(u))), 1, atol=1e-13)
    lift = phase_lift(curve)
    assert lift.winding.tolist() == [-1, 1, -1] and lift.check_monotone() > 0
    # Hermitian symmetry and |c_{L,k}| <= c0
    ks = rng.integers(-6, 7, size=(300, 3))
    assert hermitian_defect(curve, L, ks) <= 1e-12
    vals, _ = c_lk_batch(curve, L, ks)
    assert np.max(np.abs(vals)) <= gallery.RUNNING_DENSITY + 1e-12


def test_criterion_12_product(product2):
    pcurve, L = product2
    qw = enumerate_points_product(pcurve, L, [-5, 5, -5, 5])
    eq = np.max(np.abs(gallery.product2_equations(qw.points)))
    print(f"{len(qw)} points, max residual {qw.residuals.max():.2e}, max equation value {eq:.2e}")
    assert qw.residuals.max() <= 1e-8
    assert eq <= 1e-8
    md = fourier.product_multidegree_from_mhat(pcurve)
    order = sorted(md)
    assert [round(md[I], 9) for I in order] == [0, 1, 1, 1, 1, 0]
    assert {I: round(v) for I, v in md.items()} == pcurve.multidegree
