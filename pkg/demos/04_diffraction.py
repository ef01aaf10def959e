"""
Bragg peaks and number variance
===============================

Exponential sums over balls pick out the coefficients c_xi, and the number
of points in a ball fluctuates far less than for a Poisson set of the same
density.
"""
import numpy as np

from fqc import gallery
from fqc.diffraction import (decay_check, exp_sum_sweep, number_variance_sweep,
                             poisson_control)
from fqc.pointset import enumerate_points

curve, L = gallery.running_example()
qw = enumerate_points(curve, L, [-30, 30, -30, 30])

# S_R(xi) / Vol(B_R) converges to conj(c_xi) at the golden site.
rep = exp_sum_sweep(qw, [gallery.GOLDEN_XI], [5, 10, 20, 28], [gallery.GOLDEN_C])
for row in rep.rows:
    print(f"R={row['R']:>4}: S/Vol = {row['ratio']:.5f}")
print(f"conj(c_xi)     = {np.conj(gallery.GOLDEN_C):.5f}")

# Var(N_R) / Vol(B_R): decays for the quasicrystal, flat for Poisson points.
Rs = [1, 2, 4, 8]
ours = number_variance_sweep(qw, Rs, centers=400, density=gallery.RUNNING_DENSITY)
poisson = number_variance_sweep(poisson_control(gallery.RUNNING_DENSITY, [-30, 30, -30, 30]),
                                Rs, centers=400)
for a, b in zip(ours["rows"], poisson["rows"]):
    print(f"R={a['R']}: quasicrystal {a['scaled_variance']:.4f}  Poisson {b['scaled_variance']:.4f}")
print(f"slopes: quasicrystal {ours['slope']:.2f} (decays: {decay_check(ours)}), "
      f"Poisson {poisson['slope']:.2f} (decays: {decay_check(poisson)})")
