"""Fourier transforms of the coordinate measures on the torus part of a curve.

For a curve of codimension one in (P^1)^n the measure attached to coordinate
i is pulled back along the phase lift:

    mhat_i(k) = integral_0^1 exp(-2 pi i <theta(u), k>) |theta_i'(u)| du.

The absolute value fixes the orientation so that mhat_i(0) = deg f_i > 0.
The integrand is smooth and 1-periodic, so the trapezoidal rule converges
geometrically. For products of curves the measures factor block by block.
"""
from __future__ import annotations

import functools
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import scipy.integrate

from .curve import LeeYangCurve, ProductCurve, phase_lift
from .errors import QuadratureStall, TruncationInsufficient, UnsupportedDegree
from .varcomb import PositiveMatrix, var, var_array

QUAD_TOL = 1e-12
QUAD_STALL = 1e-9
QUAD_MAX_NODES = 2**22
ZERO_COEFF = 1e-10


@dataclass(frozen=True)
class TorusCoefficient:
    index: tuple
    k: tuple
    value: complex
    method: str
    error: float


@dataclass(frozen=True)
class SpectrumAtomWithCoefficient:
    xi: np.ndarray
    ks: tuple
    value: complex
    error: float
    numerically_zero: bool

    @property
    def k(self):
        return self.ks[0]


@functools.lru_cache(maxsize=32)
def _lift(curve: LeeYangCurve):
    return phase_lift(curve)


def _start_nodes(curve: LeeYangCurve, kmax: int) -> int:
    n0 = 256.0 * math.sqrt(1.0 + sum(curve.degrees) * kmax)
    return 1 << max(8, math.ceil(math.log2(n0)))


def _trapezoid(lift, ks: np.ndarray, N: int) -> np.ndarray:
    u = np.arange(N) / N
    th = lift.theta(u)
    w = np.abs(lift.dtheta(u))
    phase = np.exp(-2j * np.pi * (ks @ th))
    return phase @ w.T / N


def mhat_batch(curve: LeeYangCurve, ks, *, tol: float = QUAD_TOL, chunk: int = 512):
    """mhat_i(k) for every row k of ``ks`` and every coordinate i.

    Returns ``(values, errors)``, both of shape (len(ks), n). Node counts
    double from 256 sqrt(1 + sum(m) max|k|) until two successive estimates
    agree to ``tol``.
    """
    ks = np.atleast_2d(np.asarray(ks, dtype=np.int64))
    if ks.shape[1] != curve.n:
        raise ValueError(f"k must have {curve.n} entries")
    lift = _lift(curve)
    vals = np.zeros((len(ks), curve.n), dtype=complex)
    errs = np.zeros((len(ks), curve.n))
    for start in range(0, len(ks), chunk):
        block = ks[start:start + chunk]
        kmax = int(np.max(np.abs(block))) if block.size else 0
        N = _start_nodes(curve, kmax)
        prev = _trapezoid(lift, block, N)
        while True:
            N *= 2
            cur = _trapezoid(lift, block, N)
            diff = np.abs(cur - prev)
            if np.max(diff) < tol or N >= QUAD_MAX_NODES:
                break
            prev = cur
        if np.max(diff) > QUAD_STALL:
            raise QuadratureStall(f"trapezoid error plateau {np.max(diff):.3g} at {N} nodes")
        vals[start:start + chunk] = cur
        errs[start:start + chunk] = diff
    return vals, errs


def mhat(curve: LeeYangCurve, i: int, k) -> TorusCoefficient:
    """Single coefficient mhat_i(k) by periodic trapezoidal quadrature."""
    k = tuple(int(x) for x in k)
    vals, errs = mhat_batch(curve, [k])
    return TorusCoefficient((i,), k, complex(vals[0, i]), "quadrature", float(errs[0, i]))


# --- residue oracle for degree-one factors ------------------------------------

class GaussianRational:
    """Exact complex rational p + q i."""

    __slots__ = ("re", "im")

    def __init__(self, re, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    def __add__(self, o):
        o = _gq(o)
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, o):
        o = _gq(o)
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, o):
        return _gq(o) - self

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __mul__(self, o):
        o = _gq(o)
        return GaussianRational(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = _gq(o)
        den = o.re * o.re + o.im * o.im
        return GaussianRational((self.re * o.re + self.im * o.im) / den,
                                (self.im * o.re - self.re * o.im) / den)

    def __pow__(self, e: int):
        if e < 0:
            return GaussianRational(1) / self ** (-e)
        out, base = GaussianRational(1), self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __eq__(self, o):
        o = _gq(o)
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))


def _gq(x):
    if isinstance(x, GaussianRational):
        return x
    if isinstance(x, complex):
        return GaussianRational(x.real, x.imag)
    return GaussianRational(x)


def _binom(e: int, m: int):
    out = Fraction(1)
    for j in range(m):
        out = out * (e - j) / (j + 1)
    return out


def _residue(factors: dict, q0, one):
    """Residue at q0 of prod (t - q)^e, given as {q: e}."""
    r = -factors[q0]
    series = [one] + [one * 0] * (r - 1)
    for q, e in factors.items():
        if q == q0 or e == 0:
            continue
        delta = q0 - q
        term = [delta ** e * (_binom(e, m) * (one / delta ** m)) for m in range(r)]
        series = [sum((series[a] * term[b - a] for a in range(b + 1)), one * 0) for b in range(r)]
    return series[r - 1]


def _degree_one_data(curve: LeeYangCurve):
    """Zero/pole locations (a - i eps/alpha, a + i eps/alpha) of each g_j."""
    out = []
    exact = True
    for sign, f in zip(curve.signs, curve.factors):
        if f.num_degree != 1 or f.den_degree != 0:
            raise UnsupportedDegree("residue oracle needs factors alpha t + beta")
        beta, alpha = f.num[0] / f.den[0], f.num[1] / f.den[0]
        a = -beta / alpha
        out.append((a, sign / alpha))
        exact &= float(a).is_integer() and float(sign / alpha).is_integer()
    return out, exact


def mhat_residue(curve: LeeYangCurve, i: int, k) -> complex:
    """mhat_i(k) by summing residues of the rational integrand on the real line.

    With g_j = (t - z_j)/(t - p_j) the integrand is
    prod g_j^(-k_j) (1/(t - z_i) - 1/(t - p_i)); residues are taken in the
    half-plane holding fewer poles (lower on ties). Exact Gaussian-rational
    arithmetic is used when all zeros and poles have integer coordinates.
    """
    data, exact = _degree_one_data(curve)
    k = [int(x) for x in k]
    if exact:
        mk = lambda re, im: GaussianRational(int(re), int(im))  # noqa: E731
        one = GaussianRational(1)
    else:
        mk = lambda re, im: complex(re, im)  # noqa: E731
        one = 1.0 + 0j
    zeros = [mk(a, -h) for a, h in data]
    poles = [mk(a, h) for a, h in data]
    base: dict = {}
    for z, p, kj in zip(zeros, poles, k):
        base[z] = base.get(z, 0) - kj
        base[p] = base.get(p, 0) + kj
    terms = []
    for loc, coeff in ((zeros[i], 1), (poles[i], -1)):
        fac = dict(base)
        fac[loc] = fac.get(loc, 0) - 1
        terms.append((coeff, fac))
    upper = {q for _, fac in terms for q, e in fac.items() if e < 0 and complex(q).imag > 0}
    lower = {q for _, fac in terms for q, e in fac.items() if e < 0 and complex(q).imag < 0}
    use_upper = len(upper) < len(lower)
    total = one * 0
    for coeff, fac in terms:
        for q, e in fac.items():
            if e < 0 and (complex(q).imag > 0) == use_upper:
                total = total + _residue(fac, q, one) * coeff
    # integral over R = 2 pi i (sum upper) = -2 pi i (sum lower); |theta_i'| = -eps_i theta_i'
    eps = curve.signs[i]
    value = complex(total) * (-eps if use_upper else eps)
    return value


# --- coefficients c_{L,k} -------------------------------------------------------

def _complement_pairs(L: PositiveMatrix):
    n = L.n
    full = range(n)
    return [(I, tuple(j for j in full if j not in I)) for I in L.plucker]


def c_lk_batch(curve, L: PositiveMatrix, ks):
    """c_{L,k} = sum_I L_I mhat_{[n] minus I}(k) for each row of ``ks``.

    Rows with var(k) >= d are returned as exact zeros without quadrature.
    Returns ``(values, errors)``.
    """
    ks = np.atleast_2d(np.asarray(ks, dtype=np.int64))
    out = np.zeros(len(ks), dtype=complex)
    err = np.zeros(len(ks))
    live = var_array(ks) < L.d if len(ks) else np.zeros(0, bool)
    if not np.any(live):
        return out, err
    comp = _complement_pairs(L)
    weights = np.array([L.plucker[I] for I, _ in comp])
    if isinstance(curve, ProductCurve):
        vals, errs = _product_mhat_sets(curve, ks[live], [J for _, J in comp])
    else:
        if L.n - L.d != 1:
            raise ValueError("a single curve needs L with n - 1 columns")
        mv, me = mhat_batch(curve, ks[live])
        idx = [J[0] for _, J in comp]
        vals, errs = mv[:, idx], me[:, idx]
    out[live] = vals @ weights
    err[live] = errs @ weights
    return out, err


def c_lk(curve, L: PositiveMatrix, k) -> complex:
    return complex(c_lk_batch(curve, L, [k])[0][0])


def density_from_multidegree(curve, L: PositiveMatrix) -> float:
    """c_0 = sum_I L_I d_I, with d_I the multidegree."""
    md = curve.multidegree
    return math.fsum(v * md[I] for I, v in L.plucker.items())


def _product_mhat_sets(pcurve: ProductCurve, ks: np.ndarray, sets):
    """mhat_J(k) for the product measure; J picks one coordinate per block."""
    per_block = []
    for blk, sl in zip(pcurve.blocks, pcurve.block_slices()):
        per_block.append(mhat_batch(blk, ks[:, sl]))
    vals = np.zeros((len(ks), len(sets)), dtype=complex)
    errs = np.zeros((len(ks), len(sets)))
    offsets = pcurve.offsets
    sizes = pcurve.sizes
    for c, J in enumerate(sets):
        v = np.ones(len(ks), dtype=complex)
        e = np.zeros(len(ks))
        ok = True
        for b, (o, s) in enumerate(zip(offsets, sizes)):
            inside = [j - o for j in J if o <= j < o + s]
            if len(inside) != 1:
                ok = False
                break
            bv, be = per_block[b][0][:, inside[0]], per_block[b][1][:, inside[0]]
            e = e * np.abs(bv) + np.abs(v) * be
            v = v * bv
        if ok:
            vals[:, c], errs[:, c] = v, e
    return vals, errs


def mhat_product(pcurve: ProductCurve, J, k) -> complex:
    vals, _ = _product_mhat_sets(pcurve, np.atleast_2d(np.asarray(k, dtype=np.int64)), [tuple(J)])
    return complex(vals[0, 0])


def product_multidegree_from_mhat(pcurve: ProductCurve) -> dict:
    """d_I recovered as mhat_{[n] minus I}(0) through the blockwise factorization."""
    import itertools

    n, d = pcurve.n, pcurve.d
    Is = list(itertools.combinations(range(n), d))
    comps = [tuple(j for j in range(n) if j not in I) for I in Is]
    vals, _ = _product_mhat_sets(pcurve, np.zeros((1, n), dtype=np.int64), comps)
    return {I: float(vals[0, c].real) for c, I in enumerate(Is)}


def coefficients_on_window(curve, L: PositiveMatrix, support) -> list:
    """c_xi for every site of ``support``, sorted by |xi| then lexicographically."""
    ks = np.array([k for _, k in support.atoms], dtype=np.int64).reshape(-1, L.n)
    vals, errs = c_lk_batch(curve, L, ks)
    lookup = {tuple(k): (v, e) for k, v, e in zip(ks.tolist(), vals, errs)}
    out = []
    for xi, group in support.sites():
        v = sum(lookup[tuple(k)][0] for k in group)
        e = sum(lookup[tuple(k)][1] for k in group)
        out.append(SpectrumAtomWithCoefficient(np.asarray(xi), tuple(tuple(k) for k in group),
                                               complex(v), float(e), abs(v) < ZERO_COEFF))
    out.sort(key=lambda a: (round(float(np.linalg.norm(a.xi)), 12), tuple(np.round(a.xi, 12))))
    return out


# --- summation formula --------------------------------------------------------

@dataclass(frozen=True)
class Gaussian:
    """f(x) = exp(-|x - mu|^2 / (2 sigma^2)) and its transform."""

    mu: tuple
    sigma: float

    def f(self, xi) -> np.ndarray:
        xi = np.atleast_2d(xi)
        return np.exp(-np.sum((xi - np.asarray(self.mu)) ** 2, axis=1) / (2 * self.sigma**2))

    def fhat(self, x) -> np.ndarray:
        x = np.atleast_2d(x)
        d = x.shape[1]
        s2 = self.sigma**2
        return ((2 * np.pi * s2) ** (d / 2) * np.exp(-2 * np.pi**2 * s2 * np.sum(x**2, axis=1))
                * np.exp(-2j * np.pi * (x @ np.asarray(self.mu))))


def point_side_tail(g: Gaussian, c0: float, radius: float, d: int) -> float:
    """Bound for sum |fhat(x)| over points of density c0 outside the ball of ``radius``.

    Uses twice the density times the integral of |fhat| outside the ball.
    """
    s2 = g.sigma**2
    A = (2 * np.pi * s2) ** (d / 2)
    beta = 2 * np.pi**2 * s2
    surface = 2 * np.pi ** (d / 2) / math.gamma(d / 2)
    integrand = lambda r: A * np.exp(-beta * r * r) * surface * r ** (d - 1)  # noqa: E731
    val, _ = scipy.integrate.quad(integrand, radius, np.inf)
    return 2.0 * c0 * val


def spectrum_side_tail(g: Gaussian, c0: float, vol: float, n: int, radius: float) -> float:
    """Bound for sum |c_k f(L^t k)| over sites farther than ``radius`` from mu.

    Counting function N(r) <= 2 vol (r + |mu|)^n and |c_k| <= c0, summed by parts.
    """
    m = float(np.linalg.norm(g.mu))
    s2 = g.sigma**2
    integrand = lambda s: 2 * vol * (s + m) ** n * (s / s2) * np.exp(-s * s / (2 * s2))  # noqa: E731
    val, _ = scipy.integrate.quad(integrand, radius, np.inf)
    return c0 * val


def verify_summation(points: np.ndarray, point_radius: float, atoms, g: Gaussian, *,
                     c0: float, vol: float, n: int, atom_radius: float, limit: float = 1e-8) -> dict:
    """Compare sum_Lambda fhat(x) with sum_xi c_xi f(xi).

    ``points`` must contain every point of the set within ``point_radius`` of
    the origin and ``atoms`` every site within ``atom_radius`` of mu.
    """
    points = np.atleast_2d(points)
    d = points.shape[1]
    inside = np.linalg.norm(points, axis=1) <= point_radius
    lhs = complex(np.sum(g.fhat(points[inside])))
    xis = np.array([a.xi for a in atoms]).reshape(-1, d)
    cs = np.array([a.value for a in atoms])
    near = np.linalg.norm(xis - np.asarray(g.mu), axis=1) <= atom_radius
    rhs = complex(np.sum(cs[near] * g.f(xis[near])))
    tail = point_side_tail(g, c0, point_radius, d) + spectrum_side_tail(g, c0, vol, n, atom_radius)
    report = {"lhs": [lhs.real, lhs.imag], "rhs": [rhs.real, rhs.imag],
              "abs_diff": abs(lhs - rhs), "tail_bound": tail,
              "points_used": int(inside.sum()), "atoms_used": int(near.sum())}
    if tail > limit:
        raise TruncationInsufficient(f"tail bound {tail:.3g} exceeds {limit:.1g}; enlarge the window")
    return report


def hermitian_defect(curve, L: PositiveMatrix, ks) -> float:
    """max |c_{L,-k} - conj(c_{L,k})| over rows of ``ks``."""
    ks = np.atleast_2d(np.asarray(ks, dtype=np.int64))
    a, _ = c_lk_batch(curve, L, ks)
    b, _ = c_lk_batch(curve, L, -ks)
    return float(np.max(np.abs(b - np.conj(a))))


__all__ = [
    "TorusCoefficient", "SpectrumAtomWithCoefficient", "mhat", "mhat_batch", "mhat_residue",
    "c_lk", "c_lk_batch", "density_from_multidegree", "mhat_product", "product_multidegree_from_mhat",
    "coefficients_on_window", "Gaussian", "verify_summation", "point_side_tail", "spectrum_side_tail",
    "hermitian_defect", "var",
]
