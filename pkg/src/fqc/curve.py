"""Genus-zero strict Lee-Yang curves built from separating rational functions.

A curve is given by real rational functions f_1, ..., f_n on the projective
line. Coordinate j carries h_j = (-1)^j f_j (0-based j) composed with the
Möbius map z -> (z + i)/(z - i), so real t lands on the torus.

The real projective line is handled through the circle coordinate
u in [0, 1) with t = tan(pi (u - 1/2)); u = 0 is t = infinity. In homogeneous
form t = s / c with s = -cos(pi u), c = sin(pi u), so every factor is a pair
of trigonometric polynomials and nothing blows up at the poles.
"""
from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as P

from . import sturm
from .errors import (InjectivityFailure, InterlacingViolation, LiftDiscontinuity,
                     MultipleRoot, NonRealRoots, OffTorusVariationFailure, ValidationError)
from .varcomb import var


@dataclass(frozen=True)
class RealRationalFunction:
    """num / den with real ascending coefficient lists."""

    num: tuple
    den: tuple

    def __init__(self, num, den=(1.0,)):
        num = sturm.trim(num)
        den = sturm.trim(den)
        if sturm.degree(den) < 0:
            raise ValueError("denominator is identically zero")
        object.__setattr__(self, "num", tuple(float(x) for x in num))
        object.__setattr__(self, "den", tuple(float(x) for x in den))

    @classmethod
    def linear(cls, shift: float, slope: float = 1.0) -> "RealRationalFunction":
        return cls([-slope * shift, slope])

    @property
    def num_degree(self) -> int:
        return sturm.degree(self.num)

    @property
    def den_degree(self) -> int:
        return sturm.degree(self.den)

    @property
    def degree(self) -> int:
        return max(self.num_degree, self.den_degree)

    def __call__(self, t):
        t = np.asarray(t)
        return P.polyval(t, np.array(self.num)) / P.polyval(t, np.array(self.den))

    def __neg__(self):
        return RealRationalFunction([-x for x in self.num], self.den)

    def homogeneous(self, s, c, sign: float = 1.0):
        """(N, D, dN/ds, dN/dc, dD/ds, dD/dc) of the degree-m homogenization."""
        m = self.degree
        out = []
        for coeffs, sg in ((self.num, sign), (self.den, 1.0)):
            a = np.zeros(m + 1)
            a[: len(coeffs)] = coeffs
            a *= sg
            val = np.zeros(np.shape(s), dtype=np.result_type(s, c, float))
            ds = np.zeros_like(val)
            dc = np.zeros_like(val)
            for k in range(m + 1):
                if a[k] == 0.0:
                    continue
                val = val + a[k] * s**k * c ** (m - k)
                if k:
                    ds = ds + a[k] * k * s ** (k - 1) * c ** (m - k)
                if m - k:
                    dc = dc + a[k] * (m - k) * s**k * c ** (m - k - 1)
            out.append((val, ds, dc))
        (N, Ns, Nc), (D, Ds, Dc) = out
        return N, D, Ns, Nc, Ds, Dc


@dataclass(frozen=True)
class SeparatingCertificate:
    zeros: tuple
    poles: tuple
    orientation: int  # +1 if f is separating, -1 if -f is
    im_at_i: float

    @property
    def degree(self) -> int:
        return len(self.zeros)


def _u_of_t(t: float) -> float:
    return 0.0 if np.isinf(t) else 0.5 + np.arctan(t) / np.pi


def _simple_real_roots(coeffs, what: str):
    deg = sturm.degree(coeffs)
    if deg <= 0:
        return np.zeros(0)
    roots = sturm.real_roots(coeffs)
    if len(roots) == deg:
        return roots
    allr = np.roots(np.array(sturm.trim(coeffs))[::-1])
    scale = max(1.0, float(np.max(np.abs(allr))))
    if np.all(np.abs(allr.imag) < 1e-6 * scale):
        raise MultipleRoot(f"{what} has a repeated real root near {allr.real.tolist()}")
    raise NonRealRoots(f"{what} has non-real roots {allr[np.abs(allr.imag) >= 1e-6 * scale].tolist()}")


def validate_separating(f: RealRationalFunction) -> SeparatingCertificate:
    """Certify that zeros and poles of ``f`` are real, simple and interlace on R ∪ {∞}."""
    m = f.degree
    if m < 1:
        raise ValidationError("f must be nonconstant")
    zeros = list(_simple_real_roots(f.num, "numerator"))
    poles = list(_simple_real_roots(f.den, "denominator"))
    gap = f.num_degree - f.den_degree
    if abs(gap) > 1:
        raise MultipleRoot(f"{'pole' if gap > 0 else 'zero'} of order {abs(gap)} at infinity")
    if gap == 1:
        poles.append(np.inf)
    elif gap == -1:
        zeros.append(np.inf)
    if len(zeros) != m or len(poles) != m:
        raise NonRealRoots(f"expected {m} real zeros and poles, found {len(zeros)} and {len(poles)}")
    for z in zeros:
        for p in poles:
            if np.isfinite(z) and np.isfinite(p) and abs(z - p) <= 1e-9 * max(1.0, abs(z)):
                raise InterlacingViolation(z, f"numerator and denominator share the root {z}")
    marks = sorted([(_u_of_t(z), 0, z) for z in zeros] + [(_u_of_t(p), 1, p) for p in poles])
    for (_, k1, x1), (_, k2, _) in zip(marks, marks[1:] + marks[:1]):
        if k1 == k2:
            raise InterlacingViolation(x1)
    im = complex(f(1j)).imag
    if im == 0.0:
        raise InterlacingViolation(1j, "Im f(i) = 0")
    return SeparatingCertificate(tuple(sorted(zeros)), tuple(sorted(poles)), 1 if im > 0 else -1, im)


def u_to_t(u):
    return np.tan(np.pi * (np.asarray(u) - 0.5))


def t_to_u(t):
    return np.mod(0.5 + np.arctan(np.asarray(t)) / np.pi, 1.0)


@dataclass(frozen=True)
class PhaseLift:
    """Continuous lift theta: R -> R^n of the torus parametrization.

    exp(2 pi i theta(u)) = psi(t(u)) and theta(u + 1) = theta(u) + winding.
    Component j is strictly monotone with direction (-1)^(j+1), so
    |winding_j| = deg f_j and theta' alternates in sign.
    """

    curve: "LeeYangCurve" = field(repr=False)
    winding: np.ndarray
    grid: np.ndarray = field(repr=False)
    reference: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return len(self.winding)

    @property
    def directions(self) -> np.ndarray:
        return np.sign(self.winding)

    def theta(self, u) -> np.ndarray:
        """theta(u), shape (n,) + shape(u)."""
        u = np.asarray(u, dtype=float)
        q = np.floor(u)
        r = u - q
        base = np.angle(self.curve._phase_poly(r)) / np.pi
        out = np.empty_like(base)
        for j in range(self.n):
            ref = np.interp(r, self.grid, self.reference[j])
            out[j] = base[j] + np.round(ref - base[j]) + q * self.winding[j]
        return out

    def dtheta(self, u) -> np.ndarray:
        """d theta / du in closed form."""
        u = np.asarray(u, dtype=float)
        Pv, dP = self.curve._phase_poly(u, derivative=True)
        return (dP / Pv).imag / np.pi

    def bounds(self) -> np.ndarray:
        """Componentwise [min, max] of theta over one period, shape (n, 2)."""
        return np.column_stack([self.reference.min(axis=1), self.reference.max(axis=1)])

    def inverse(self, j: int, y, newton_steps: int = 4) -> np.ndarray:
        """u with theta_j(u) = y, using the periodic extension of the lift."""
        y = np.asarray(y, dtype=float)
        m = self.winding[j]
        ref = self.reference[j]
        q = np.floor((y - ref[0]) / m)
        target = y - q * m
        if m > 0:
            r = np.interp(target, ref, self.grid)
        else:
            r = np.interp(-target, -ref, self.grid)
        u = q + r
        for _ in range(newton_steps):
            u = u - (self.theta_component(j, u) - y) / self.dtheta(u)[j]
        return u

    def theta_component(self, j: int, u) -> np.ndarray:
        return self.theta(u)[j]

    def check_monotone(self, points: int = 10_000) -> float:
        u = (np.arange(points) + 0.5) / points
        dt = self.dtheta(u) * self.directions[:, None]
        return float(dt.min())


@dataclass(frozen=True)
class LeeYangCurve:
    """Image of t -> ((h_j(t) + i)/(h_j(t) - i))_j with h_j = (-1)^j f_j."""

    factors: tuple
    certificates: tuple = field(repr=False)
    injectivity: str = field(default="not checked", compare=False)
    offtorus: dict = field(default=None, repr=False, compare=False)

    @property
    def n(self) -> int:
        return len(self.factors)

    @property
    def d(self) -> int:
        return self.n - 1

    @property
    def degrees(self) -> tuple:
        return tuple(f.degree for f in self.factors)

    @property
    def signs(self) -> tuple:
        return tuple(1 if j % 2 == 0 else -1 for j in range(self.n))

    @property
    def multidegree(self) -> dict:
        """d_J for J a d-subset; d_{[n] minus {i}} = deg f_i."""
        full = range(self.n)
        return {tuple(x for x in full if x != i): self.factors[i].degree for i in full}

    def h(self, t):
        return np.array([s * f(t) for s, f in zip(self.signs, self.factors)])

    def _hom(self, t):
        t = np.asarray(t, dtype=complex)
        out = []
        for s, f in zip(self.signs, self.factors):
            N, D, *_ = f.homogeneous(t, np.ones_like(t), s)
            out.append((N, D))
        return out

    def psi(self, t) -> np.ndarray:
        """Torus parametrization at complex t, shape (n,) + shape(t)."""
        return np.array([(N + 1j * D) / (N - 1j * D) for N, D in self._hom(t)])

    def log_abs_psi(self, t) -> np.ndarray:
        """log|psi_j(t)| = 1/2 log1p(4 Im(N conj D) / |N - iD|^2), sign-exact."""
        with np.errstate(divide="ignore"):
            return np.array([0.5 * np.log1p(4 * (N * np.conj(D)).imag / np.abs(N - 1j * D) ** 2)
                             for N, D in self._hom(t)])

    def _phase_poly(self, u, derivative: bool = False):
        u = np.asarray(u, dtype=float)
        s = -np.cos(np.pi * u)
        c = np.sin(np.pi * u)
        vals, ders = [], []
        for sg, f in zip(self.signs, self.factors):
            N, D, Ns, Nc, Ds, Dc = f.homogeneous(s, c, sg)
            vals.append(N + 1j * D)
            if derivative:
                ders.append(np.pi * ((Ns + 1j * Ds) * c - (Nc + 1j * Dc) * s))
        if derivative:
            return np.array(vals), np.array(ders)
        return np.array(vals)

    def psi_u(self, u) -> np.ndarray:
        Pv = self._phase_poly(u)
        return Pv / np.conj(Pv)

    def phase_lift(self) -> PhaseLift:
        return phase_lift(self)


def phase_lift(curve: LeeYangCurve) -> PhaseLift:
    """Continuous, anchored lift of the arguments of psi along the circle."""
    M = 1024 * max(curve.degrees)
    while True:
        grid = np.linspace(0.0, 1.0, M + 1)
        raw = np.angle(curve._phase_poly(grid)) / np.pi
        steps = np.diff(raw, axis=1)
        steps -= np.round(steps)
        if np.max(np.abs(steps)) < 0.05:
            break
        M *= 4
        if M > 2**22:
            raise LiftDiscontinuity("phase varies too fast to lift on a 2^22 grid")
    ref = np.concatenate([raw[:, :1], raw[:, :1] + np.cumsum(steps, axis=1)], axis=1)
    ref -= np.floor(ref[:, :1])
    span = ref[:, -1] - ref[:, 0]
    winding = np.round(span).astype(int)
    expected = -np.array(curve.signs) * np.array(curve.degrees)
    if np.max(np.abs(span - winding)) > 1e-9 or not np.array_equal(winding, expected):
        raise LiftDiscontinuity(f"winding {span} does not match {expected}")
    return PhaseLift(curve, winding, grid, ref)


def _check_injective(curve: LeeYangCurve, seeds: int = 200, iters: int = 40) -> str:
    if min(curve.degrees) == 1:
        return "exact: a degree-one factor is injective on the real line"
    g = (np.arange(seeds) + 0.5) / seeds
    u1, u2 = (x.ravel() for x in np.meshgrid(g, g, indexing="ij"))
    keep = np.abs(u1 - u2) > 0.5 / seeds
    u1, u2 = u1[keep], u2[keep]

    def alpha(u):
        Pv, dP = curve._phase_poly(u, derivative=True)
        return np.angle(Pv), (dP / Pv).imag

    for _ in range(iters):
        a1, da1 = alpha(u1)
        a2, da2 = alpha(u2)
        F = np.sin(a1[:2] - a2[:2])
        C = np.cos(a1[:2] - a2[:2])
        J11, J12 = C[0] * da1[0], -C[0] * da2[0]
        J21, J22 = C[1] * da1[1], -C[1] * da2[1]
        det = J11 * J22 - J12 * J21
        ok = np.abs(det) > 1e-14
        det = np.where(ok, det, 1.0)
        du1 = np.where(ok, (J22 * F[0] - J12 * F[1]) / det, 0.0)
        du2 = np.where(ok, (-J21 * F[0] + J11 * F[1]) / det, 0.0)
        step = np.maximum(1.0, np.maximum(np.abs(du1), np.abs(du2)) / 0.05)
        u1 = np.mod(u1 - du1 / step, 1.0)
        u2 = np.mod(u2 - du2 / step, 1.0)
    a1, _ = alpha(u1)
    a2, _ = alpha(u2)
    resid = np.max(np.abs(np.sin(a1 - a2)), axis=0)
    sep = np.abs(u1 - u2)
    sep = np.minimum(sep, 1.0 - sep)
    bad = (resid < 1e-9) & (sep > 1e-6)
    if np.any(bad):
        i = int(np.flatnonzero(bad)[0])
        raise InjectivityFailure(float(u_to_t(u1[i])), float(u_to_t(u2[i])))
    return f"sampled: no collision from a {seeds}x{seeds} Newton seed grid"


def off_torus_var_check(curve: LeeYangCurve, samples: int = 200, seed=0) -> dict:
    """Check var(log|psi(t)|) = n - 1 at random non-real t.

    |t| is drawn log-uniformly in [1e-3, 1e3]; points with |Im t| < 1e-3 are
    redrawn. Raises on the first failure.
    """
    rng = np.random.default_rng(seed)
    ts = []
    while len(ts) < samples:
        r = 10 ** rng.uniform(-3, 3)
        a = rng.uniform(0, 2 * np.pi)
        t = r * np.exp(1j * a)
        if abs(t.imag) >= 1e-3:
            ts.append(t)
    ts = np.array(ts)
    logs = curve.log_abs_psi(ts)
    for i, t in enumerate(ts):
        v = var(logs[:, i])
        if v != curve.n - 1:
            raise OffTorusVariationFailure(complex(t), v)
    return {"samples": samples, "failures": 0, "seed": seed}


def build_curve(fs, *, check_injective: bool = True, offtorus_samples: int = 200, seed=0) -> LeeYangCurve:
    """Validate each factor and assemble the strict Lee-Yang curve.

    A factor whose negative is the separating one is flipped with a warning.
    """
    fs = [f if isinstance(f, RealRationalFunction) else RealRationalFunction(*f) for f in fs]
    if len(fs) < 2:
        raise ValidationError("need at least two factors")
    certs, oriented = [], []
    for j, f in enumerate(fs):
        cert = validate_separating(f)
        if cert.orientation < 0:
            warnings.warn(f"factor {j}: -f is separating, using -f", stacklevel=2)
            f = -f
            cert = validate_separating(f)
        certs.append(cert)
        oriented.append(f)
    curve = LeeYangCurve(tuple(oriented), tuple(certs))
    inj = _check_injective(curve) if check_injective else "not checked"
    report = off_torus_var_check(curve, offtorus_samples, seed) if offtorus_samples else None
    return LeeYangCurve(tuple(oriented), tuple(certs), inj, report)


def mobius_deg1(shifts) -> LeeYangCurve:
    """Curve with f_j = t - a_j."""
    shifts = list(shifts)
    if len(set(shifts)) < len(shifts):
        warnings.warn("repeated shifts give a degenerate (though valid) curve", stacklevel=2)
    return build_curve([RealRationalFunction.linear(a) for a in shifts])


@dataclass(frozen=True)
class ProductCurve:
    """Product X_1 x ... x X_r of curves, coordinates concatenated block by block."""

    blocks: tuple

    def __init__(self, blocks):
        object.__setattr__(self, "blocks", tuple(blocks))

    @property
    def sizes(self) -> tuple:
        return tuple(b.n for b in self.blocks)

    @property
    def n(self) -> int:
        return sum(self.sizes)

    @property
    def d(self) -> int:
        return sum(s - 1 for s in self.sizes)

    @property
    def offsets(self) -> tuple:
        return tuple(int(x) for x in np.cumsum((0,) + self.sizes[:-1]))

    def block_slices(self):
        return [slice(o, o + s) for o, s in zip(self.offsets, self.sizes)]

    @property
    def multidegree(self) -> dict:
        """d_J = prod_i d^(i)_{J ∩ block i}, zero unless J misses one index per block."""
        out = {}
        for J in itertools.combinations(range(self.n), self.d):
            val = 1
            for blk, o, s in zip(self.blocks, self.offsets, self.sizes):
                part = tuple(j - o for j in J if o <= j < o + s)
                if len(part) != s - 1:
                    val = 0
                    break
                val *= blk.multidegree[part]
            out[J] = val
        return out


def product_curve(blocks) -> ProductCurve:
    return ProductCurve(blocks)
