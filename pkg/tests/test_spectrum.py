import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fqc import gallery
from fqc.spectrum import (as_box, brute_force_spectrum, enumerate_spectrum, growth_check,
                          valid_orthants, var_polytope_volume)
from fqc.varcomb import plucker, random_positive_matrix, var


def test_as_box():
    assert as_box([-1, 1, -2, 2]).tolist() == [[-1, 1], [-2, 2]]
    with pytest.raises(ValueError):
        as_box([1, -1])
    with pytest.raises(ValueError):
        as_box([-1, 1], d=2)


def test_valid_orthants_count():
    assert len(valid_orthants(3, 2)) == 6
    assert all(var(s) < 2 for s in valid_orthants(3, 2))


def test_running_polytope_volume():
    P = var_polytope_volume(gallery.running_matrix())
    assert P.total == pytest.approx(gallery.RUNNING_VOLUME, abs=1e-10)
    vols = sorted(p.volume for p in P.pieces)
    assert np.allclose(vols[0::2], vols[1::2], atol=1e-12)


def test_square_case_volume():
    # n = d: P = {y : |L^t y|_inf <= 1}, volume 2^d / det L
    L = plucker([[2.0, 1.0], [1.0, 3.0]])
    assert var_polytope_volume(L).total == pytest.approx(4 / 5, abs=1e-12)
    assert var_polytope_volume(plucker(np.eye(2))).total == pytest.approx(4.0, abs=1e-12)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6))
def test_volume_invariant_under_positive_row_scaling(seed):
    rng = np.random.default_rng(seed)
    M = random_positive_matrix(3, 2, rng)
    # (D L)^t y = L^t (D y): positive row scaling maps P to D^-1 P and keeps every orthant
    s = rng.uniform(0.5, 2.0, 3)
    v0 = var_polytope_volume(plucker(M)).total
    v1 = var_polytope_volume(plucker(M * s[:, None])).total
    assert v1 == pytest.approx(v0 / np.prod(s), rel=1e-9)


def test_growth_towards_volume():
    rep = growth_check(gallery.running_matrix(), [10, 20, 40])
    assert rep["rows"][-1]["ratio"] == pytest.approx(gallery.RUNNING_VOLUME, rel=0.05)
    assert rep["fit"]["limit"] == pytest.approx(gallery.RUNNING_VOLUME, rel=0.02)


@pytest.mark.parametrize("R", [1, 2, 3.5])
def test_spectrum_equals_brute_force(R):
    L = gallery.running_matrix()
    sup = enumerate_spectrum(L, [-R, R, -R, R])
    assert {k for _, k in sup.atoms} == brute_force_spectrum(L, [-R, R, -R, R])


def test_spectrum_sites_and_preimages():
    L = gallery.running_matrix()
    sup = enumerate_spectrum(L, [-3, 3, -3, 3])
    assert sup.preimages(gallery.GOLDEN_XI) == [(-1, -1, -1)]
    assert sup.preimages((0.0, 0.0)) == [(0, 0, 0)]
    assert len(list(sup.sites())) == len(sup)  # irrational L: no collisions
    assert np.allclose(sup.ks @ L.entries, sup.xis)


def test_collisions_are_grouped():
    # rational L: L^t (1, 0, 1) = L^t (0, 1, 0) so sites coincide
    L = plucker([[1.0, 0.0], [0.0, 1.0], [-1.0, 1.0]])
    sup = enumerate_spectrum(L, [-1, 1, -1, 1])
    groups = [g for _, g in sup.sites() if len(g) > 1]
    assert groups
    for g in groups:
        xs = np.array(g) @ L.entries
        assert np.allclose(xs, xs[0])


def test_window_outside_radius_rejected():
    with pytest.raises(ValueError):
        enumerate_spectrum(gallery.running_matrix(), [-3, 3, -3, 3], R=2)
