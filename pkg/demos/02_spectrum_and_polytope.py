"""
Spectrum sites and the polytope that counts them
================================================

The Fourier transform of the point set lives on sites L^t k with var(k) < d.
Their number in [-R, R]^d grows like vol(P) R^n for an explicit polytope P.
"""
import numpy as np

from fqc import gallery
from fqc.fourier import coefficients_on_window
from fqc.spectrum import enumerate_spectrum, growth_check, var_polytope_volume

curve, L = gallery.running_example()

# The polytope splits into one piece per admissible sign orthant.
P = var_polytope_volume(L)
for piece in P.pieces:
    print(f"orthant {piece.sigma}: volume {piece.volume:.6f}")
print(f"total {P.total:.12f} vs closed form {gallery.RUNNING_VOLUME:.12f}")

# Lattice point counts approach the volume as R grows.
for row in growth_check(L, [10, 20, 40])["rows"]:
    print(f"R={row['R']:>4}: count {row['count']:>7}  count/R^3 {row['ratio']:.4f}")

# The largest coefficients near the origin, each with its integer preimage.
sup = enumerate_spectrum(L, [-3, 3, -3, 3])
atoms = [a for a in coefficients_on_window(curve, L, sup) if not a.numerically_zero]
print(f"{len(sup)} sites in [-3, 3]^2, {len(atoms)} with nonzero coefficient")
for a in sorted(atoms, key=lambda a: -abs(a.value))[:8]:
    print(f"xi={np.round(a.xi, 4)} k={a.k} c={a.value:.6f}")

# The site (sqrt2 - 1, -sqrt3 - 1) has a closed-form coefficient.
print("preimage of the golden site:", sup.preimages(gallery.GOLDEN_XI))
