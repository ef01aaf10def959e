"""Ready-made curves and matrices used throughout the tests and demos."""
from __future__ import annotations

import math

import numpy as np
from numpy.polynomial import polynomial as P

from .curve import ProductCurve, RealRationalFunction, build_curve, mobius_deg1, product_curve
from .varcomb import PositiveMatrix, plucker

SQ2, SQ3 = math.sqrt(2.0), math.sqrt(3.0)
RUNNING_DENSITY = 1 + SQ2 + SQ3
RUNNING_VOLUME = (10 * SQ2 + 3 * SQ3) / 9
# site (sqrt2 - 1, -sqrt3 - 1) and its coefficient, in closed form
GOLDEN_XI = (SQ2 - 1, -SQ3 - 1)
GOLDEN_C = (4 / 25) * 1j * ((-2 + 1j) + (2 + 1j) * SQ2 + 2j * SQ3)


def running_matrix() -> PositiveMatrix:
    return plucker([[1.0, 0.0], [0.0, 1.0], [-SQ2, SQ3]])


def running_curve():
    """f = (t - 1, t, t + 1): three degree-one factors."""
    return mobius_deg1([1.0, 0.0, -1.0])


def running_example():
    return running_curve(), running_matrix()


def product2_blocks():
    """Each block is the planar curve z2 = (3 + z1) / (1 + 3 z1), i.e. f = (t, 2t)."""
    block = build_curve([RealRationalFunction([0.0, 1.0]), RealRationalFunction([0.0, 2.0])])
    return block, block


def product2_matrix() -> PositiveMatrix:
    a, b, c, d = SQ2 / 2, SQ3 / 3, math.sqrt(5) / 5, math.sqrt(7) / 7
    return plucker([[1.0, 0.0], [0.0, 1.0], [-a * c, a * b * c + d], [-a, a * b]])


def product2_example() -> tuple[ProductCurve, PositiveMatrix]:
    return product_curve(product2_blocks()), product2_matrix()


def product2_equations(x: np.ndarray) -> np.ndarray:
    """The two sine equations whose common zeros form the product2 set."""
    a, b, c, d = SQ2 / 2, SQ3 / 3, math.sqrt(5) / 5, math.sqrt(7) / 7
    x = np.atleast_2d(x)
    l1 = -a * c * x[:, 0] + (a * b * c + d) * x[:, 1]
    l2 = -a * x[:, 0] + a * b * x[:, 1]
    e1 = np.sin(np.pi * (x[:, 0] - x[:, 1])) - 3 * np.sin(np.pi * (x[:, 0] + x[:, 1]))
    e2 = np.sin(np.pi * (l1 - l2)) - 3 * np.sin(np.pi * (l1 + l2))
    return np.column_stack([e1, e2])


def running_equations(x: np.ndarray) -> np.ndarray:
    """The two trigonometric equations cutting out the running example's set."""
    x = np.atleast_2d(x)
    t1, t2 = np.pi * x[:, 0], np.pi * x[:, 1]
    t3 = np.pi * (-SQ2 * x[:, 0] + SQ3 * x[:, 1])
    e1 = -4 * np.sin(t1) * np.cos(t2) - 4 * np.sin(t2) * (np.sin(t1) + np.cos(t1))
    e2 = 2 * np.sin(t1) * np.cos(t3) - 2 * np.sin(t3) * (2 * np.sin(t1) + np.cos(t1))
    return np.column_stack([e1, e2])


def degree_four_factors() -> list[RealRationalFunction]:
    """Three degree-four separating functions whose curve is not a complete intersection."""
    pm = P.polymul
    f1 = RealRationalFunction(pm([-1, -1, 1], [-1, 1, 1]), pm([0, 2], [-3, 0, 2]))
    f2 = RealRationalFunction([-1, 5, 3, -3, -1], 2 * pm([-1, 1], [-2, -5, -1, 1]))
    f3 = RealRationalFunction([1, 0, -5, 0, 2], pm([0, 2], [-4, 0, 3]))
    return [f1, f2, f3]


def degree_four_curve(**kwargs):
    return build_curve(degree_four_factors(), **kwargs)


RUNNING_CONFIG = {
    "curve": {"type": "mobius_deg1", "shifts": [1, 0, -1]},
    "L": [[1, 0], [0, 1], ["-sqrt(2)", "sqrt(3)"]],
    "window": [-10, 10, -10, 10],
}

PRODUCT2_CONFIG = {
    "curve": {"type": "product", "blocks": [
        {"type": "rational", "factors": [{"num": [0, 1], "den": [1]}, {"num": [0, 2], "den": [1]}]},
        {"type": "rational", "factors": [{"num": [0, 1], "den": [1]}, {"num": [0, 2], "den": [1]}]},
    ]},
    "L": [[1, 0], [0, 1],
          ["-sqrt(2)/2*sqrt(5)/5", "sqrt(2)/2*sqrt(3)/3*sqrt(5)/5 + sqrt(7)/7"],
          ["-sqrt(2)/2", "sqrt(2)/2*sqrt(3)/3"]],
    "window": [-5, 5, -5, 5],
}
