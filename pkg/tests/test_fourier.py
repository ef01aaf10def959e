import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fqc import gallery
from fqc.errors import TruncationInsufficient, UnsupportedDegree
from fqc.fourier import (Gaussian, GaussianRational, c_lk, c_lk_batch, density_from_multidegree,
                         hermitian_defect, mhat, mhat_batch, mhat_residue, mhat_product,
                         point_side_tail, product_multidegree_from_mhat, verify_summation)
from fqc.varcomb import var

# Exact Gaussian-rational residue values on the running example, frozen.
RESIDUE_FROZEN = {
    (1, 0, 0): (0, 0.2 + 0.4j, 0.5 + 0.5j),
    (0, 1, 1): (0.7 + 0.5j, 0.48 + 0.64j, 0.48 + 0.64j),
    (-1, -1, -1): (-0.16 + 0.32j, -0.32, -0.16 - 0.32j),
    (0, 0, 2): (-0.5j, -0.12 - 0.16j, 0),
}

small_k = st.tuples(*[st.integers(-6, 6)] * 3)


def test_gaussian_rational_arithmetic():
    a = GaussianRational(1, 2)
    b = GaussianRational(3, -1)
    assert complex(a * b) == (1 + 2j) * (3 - 1j)
    assert complex(a / b) == pytest.approx((1 + 2j) / (3 - 1j), abs=1e-15)
    assert complex(a ** -2) == pytest.approx((1 + 2j) ** -2, abs=1e-15)
    assert a - a == GaussianRational(0)


@pytest.mark.parametrize("k", list(RESIDUE_FROZEN))
def test_residue_matches_frozen_values(running, k):
    curve, _ = running
    for i, expected in enumerate(RESIDUE_FROZEN[k]):
        assert mhat_residue(curve, i, k) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("k", list(RESIDUE_FROZEN))
def test_quadrature_matches_frozen_values(running, k):
    curve, _ = running
    vals, errs = mhat_batch(curve, [k])
    assert np.allclose(vals[0], RESIDUE_FROZEN[k], atol=1e-12)
    assert np.all(errs < 1e-12)


def test_quadrature_equals_residue_on_small_box(running):
    curve, _ = running
    ks = list(itertools.product(range(-2, 3), repeat=3))
    vals, _ = mhat_batch(curve, ks)
    ref = np.array([[mhat_residue(curve, i, k) for i in range(3)] for k in ks])
    assert np.max(np.abs(vals - ref)) < 1e-10


def test_residue_needs_degree_one():
    with pytest.raises(UnsupportedDegree):
        mhat_residue(gallery.degree_four_curve(check_injective=False), 0, (0, 0, 0))


def test_mhat_at_zero_is_degree(running):
    curve, _ = running
    assert [mhat(curve, i, (0, 0, 0)).value for i in range(3)] == pytest.approx([1, 1, 1], abs=1e-13)
    deg4 = gallery.degree_four_curve(check_injective=False)
    vals, _ = mhat_batch(deg4, [(0, 0, 0)])
    assert np.allclose(vals[0], [4, 4, 4], atol=1e-11)


def test_density_and_golden_coefficient(running):
    curve, L = running
    assert density_from_multidegree(curve, L) == pytest.approx(gallery.RUNNING_DENSITY, abs=1e-15)
    assert c_lk(curve, L, (0, 0, 0)) == pytest.approx(gallery.RUNNING_DENSITY, abs=1e-12)
    assert c_lk(curve, L, (-1, -1, -1)) == pytest.approx(gallery.GOLDEN_C, abs=1e-12)
    assert gallery.GOLDEN_C == pytest.approx(-0.9405304284017374 + 0.1325483399593904j, abs=1e-14)


@settings(max_examples=200, deadline=None)
@given(small_k)
def test_vanishing_when_var_reaches_d(k):
    curve, _ = gallery.running_example()
    vals, _ = mhat_batch(curve, [k])
    if var(k) >= 2:
        assert np.max(np.abs(vals)) < 1e-9


@settings(max_examples=100, deadline=None)
@given(small_k)
def test_hermitian_and_bounded(k):
    curve, L = gallery.running_example()
    assert hermitian_defect(curve, L, [k]) < 1e-12
    assert abs(c_lk(curve, L, k)) <= gallery.RUNNING_DENSITY + 1e-12


def test_c_lk_batch_skips_vanishing_rows(running):
    curve, L = running
    vals, errs = c_lk_batch(curve, L, [(1, -1, 1), (2, -3, 4)])
    assert np.all(vals == 0) and np.all(errs == 0)


def test_product_mhat_factorizes(product2):
    pcurve, L = product2
    md = product_multidegree_from_mhat(pcurve)
    assert [round(md[I], 12) for I in sorted(md)] == [0, 1, 1, 1, 1, 0]
    block = pcurve.blocks[0]
    a = mhat_batch(block, [(1, 2)])[0][0, 0]
    b = mhat_batch(block, [(0, -1)])[0][0, 1]
    assert mhat_product(pcurve, (0, 3), (1, 2, 0, -1)) == pytest.approx(a * b, abs=1e-14)
    assert c_lk(pcurve, L, (0, 0, 0, 0)) == pytest.approx(density_from_multidegree(pcurve, L), abs=1e-12)


def test_gaussian_transform_pair():
    g = Gaussian((0.3, -0.2), 0.7)
    # oracle: direct 2-D quadrature of f(xi) exp(-2 pi i <x, xi>)
    h = 0.02
    grid = np.arange(-6, 6, h) + h / 2
    X, Y = np.meshgrid(grid, grid, indexing="ij")
    xi = np.column_stack([X.ravel(), Y.ravel()])
    x = np.array([0.4, 0.1])
    direct = np.sum(g.f(xi) * np.exp(-2j * np.pi * xi @ x)) * h * h
    assert g.fhat(x)[0] == pytest.approx(direct, abs=1e-9)


def test_tail_bound_shrinks_with_radius():
    g = Gaussian((0.0, 0.0), 0.7)
    t = [point_side_tail(g, 4.0, r, 2) for r in (1, 2, 3)]
    assert t[0] > t[1] > t[2] > 0


def test_verify_summation_refuses_small_windows(running):
    curve, L = running
    with pytest.raises(TruncationInsufficient):
        verify_summation(np.zeros((1, 2)), 0.5, [], Gaussian((0.0, 0.0), 0.7),
                         c0=4.1, vol=2.15, n=3, atom_radius=0.5)
