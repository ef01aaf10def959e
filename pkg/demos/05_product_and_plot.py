"""
A product of two planar curves, and pictures
============================================

Two copies of the curve z2 = (3 + z1) / (1 + 3 z1) give a surface in the
four-torus. Paired with a 4 x 2 matrix it produces a planar set cut out by
two sine equations. The running example is drawn as SVG next to it.
"""
from pathlib import Path

import numpy as np

from fqc import gallery
from fqc.fourier import product_multidegree_from_mhat
from fqc.output import SvgCanvas, zero_curve_segments
from fqc.pointset import enumerate_points, enumerate_points_product

pcurve, M = gallery.product2_example()
qw = enumerate_points_product(pcurve, M, [-6, 6, -6, 6])
print(f"{len(qw)} points, max residual {qw.residuals.max():.1e}")
print("max sine-equation value:", np.abs(gallery.product2_equations(qw.points)).max())
print("multidegree from blockwise coefficients:",
      {I: round(v, 9) for I, v in product_multidegree_from_mhat(pcurve).items()})

# Pictures: the running example with the zero curves of its first equations.
out = Path("demo_out")
curve, L = gallery.running_example()
box = [-6, 6, -6, 6]
pts = enumerate_points(curve, L, box)
canvas = SvgCanvas(box)
for j in (1, 2):
    for seg in zero_curve_segments(curve.phase_lift(), L.entries, (0, j), box):
        canvas.polyline(seg)
canvas.dots(pts.points)
print("wrote", canvas.save(out / "running.svg"))
prod = SvgCanvas([-6, 6, -6, 6])
prod.dots(qw.points, color="#2e7d32")
print("wrote", prod.save(out / "product.svg"))
