"""Enumeration of Lambda(X, L) = {x : exp(2 pi i L x) in X} inside a box.

For a curve of codimension one the condition reads L x = theta(u) + k for
some u in [0, 1) and k in Z^n. Pairing with the left-kernel generator w of L
removes x and leaves the scalar equation <w, theta(u) + k> = 0. Because w
alternates in sign exactly like the derivatives of the lift, G(u) = <w, theta(u)>
is strictly decreasing, so each k contributes at most one point.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .curve import LeeYangCurve, ProductCurve
from .errors import ResidualFailure, TooFewPoints, WindowEmpty
from .fourier import _lift
from .spectrum import as_box
from .varcomb import PositiveMatrix

RESIDUAL_TOL = 1e-9
ROOT_TOL = 1e-13


@dataclass(frozen=True)
class QuasicrystalWindow:
    points: np.ndarray
    residuals: np.ndarray = field(repr=False)
    ks: np.ndarray = field(repr=False)
    us: np.ndarray = field(repr=False)
    window: np.ndarray
    min_gap: float

    def __len__(self):
        return len(self.points)

    @property
    def d(self) -> int:
        return self.window.shape[0]

    def restrict(self, box) -> "QuasicrystalWindow":
        box = as_box(box, self.d)
        keep = _inside(self.points, box)
        return QuasicrystalWindow(self.points[keep], self.residuals[keep], self.ks[keep],
                                  self.us[keep], box, _min_gap(self.points[keep]))


def _inside(x, box, pad: float = 0.0):
    return np.all((x >= box[:, 0] - pad) & (x <= box[:, 1] + pad), axis=1)


def _min_gap(x) -> float:
    if len(x) < 2:
        return math.inf
    dist, _ = cKDTree(x).query(x, k=2)
    return float(dist[:, 1].min())


def _image_box(M: np.ndarray, box: np.ndarray) -> np.ndarray:
    """Interval hull of {M x : x in box}."""
    c = box.mean(axis=1)
    r = (box[:, 1] - box[:, 0]) / 2
    mid = M @ c
    rad = np.abs(M) @ r
    return np.column_stack([mid - rad, mid + rad])


def _dedupe(x: np.ndarray, tol: float):
    """Indices of representatives after merging points closer than ``tol``."""
    if len(x) < 2:
        return np.arange(len(x))
    parent = np.arange(len(x))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    pairs = cKDTree(x).query_pairs(tol, output_type="ndarray")
    for i, j in pairs:
        a, b = find(i), find(j)
        if a != b:
            parent[max(a, b)] = min(a, b)
    roots = np.array([find(i) for i in range(len(x))])
    if len(pairs):
        warnings.warn(f"{len(pairs)} duplicate solutions merged", stacklevel=3)
    return np.unique(roots)


def _sort_lex(x):
    return np.lexsort(tuple(x.T[::-1]))


def _finish(points, residuals, ks, us, box) -> QuasicrystalWindow:
    if len(points) == 0:
        raise WindowEmpty("no point of the set lies in the window")
    order = _sort_lex(points)
    points, residuals, ks, us = points[order], residuals[order], ks[order], us[order]
    diam = float(np.linalg.norm(box[:, 1] - box[:, 0]))
    keep = _dedupe(points, 1e-8 * diam)
    points, residuals, ks, us = points[keep], residuals[keep], ks[keep], us[keep]
    return QuasicrystalWindow(points, residuals, ks, us, box, _min_gap(points))


def _bisect_newton(g, dg, a, b, ga, tol=ROOT_TOL, iters=200):
    """Vectorized safeguarded Newton on brackets [a, b] with g(a) >= 0 > g(b)."""
    a, b = a.copy(), b.copy()
    x = 0.5 * (a + b)
    for _ in range(iters):
        gx = g(x)
        pos = (gx >= 0) == (ga >= 0)
        a = np.where(pos, x, a)
        b = np.where(pos, b, x)
        d = dg(x)
        with np.errstate(divide="ignore", invalid="ignore"):
            xn = x - gx / d
        ok = np.isfinite(xn) & (xn > a) & (xn < b)
        x_new = np.where(ok, xn, 0.5 * (a + b))
        done = np.abs(x_new - x) <= tol
        x = x_new
        if np.all(done | (b - a <= tol)):
            break
    return x


def residual(curve: LeeYangCurve, L: np.ndarray, x: np.ndarray, u: np.ndarray) -> np.ndarray:
    """max_j |exp(2 pi i (L x)_j) - psi_j(u)| per point."""
    lhs = np.exp(2j * np.pi * (x @ L.T))
    rhs = curve.psi_u(u).T
    return np.max(np.abs(lhs - rhs), axis=1)


def enumerate_points(curve: LeeYangCurve, L: PositiveMatrix, window) -> QuasicrystalWindow:
    """All x in ``window`` with exp(2 pi i L x) on the torus part of ``curve``."""
    n, d = L.n, L.d
    if curve.n != n or d != n - 1:
        raise ValueError("enumerate_points needs d = n - 1 and matching curve size")
    box = as_box(window, d)
    lift = _lift(curve)
    w = L.kernel_vector()
    M = L.entries
    Ld = M[:d]

    # k' = (L x - theta(u))_{:d} ranges over the image box minus the lift's range
    th_box = lift.bounds()
    img = _image_box(Ld, box)
    lo = np.floor(img[:, 0] - th_box[:d, 1]).astype(int) - 1
    hi = np.ceil(img[:, 1] - th_box[:d, 0]).astype(int) + 1
    kp = np.stack(np.meshgrid(*[np.arange(a, b + 1) for a, b in zip(lo, hi)], indexing="ij"),
                  axis=-1).reshape(-1, d)

    # G(u) = <w, theta(u)>, strictly decreasing; sample once and share across k
    N = max(256, 64 * int(np.sum(np.abs(lift.winding))))
    grid = np.linspace(0.0, 1.0, N + 1)
    th = lift.theta(grid)
    G = w @ th
    if np.any(np.diff(G) >= 0):
        raise ResidualFailure("<w, theta> is not monotone; the kernel vector does not alternate")

    # k_n from <w, theta + k> = 0:  k_n = F0(u) - <w', k'> / w_n
    F0 = -(w[:d] @ th[:d]) / w[d] - th[d]
    shift = -(kp @ w[:d]) / w[d]
    kn_lo = np.floor(F0.min() + shift).astype(int) - 1
    kn_hi = np.ceil(F0.max() + shift).astype(int) + 1
    counts = kn_hi - kn_lo + 1
    rep = np.repeat(np.arange(len(kp)), counts)
    offs = np.arange(counts.sum()) - np.repeat(np.cumsum(counts) - counts, counts)
    ks = np.column_stack([kp[rep], kn_lo[rep] + offs])

    # bracket: the root of G(u) + <w, k> lies where -G crosses <w, k>
    c = ks @ w
    g0 = G[0] + c
    g1 = G[-1] + c
    has = (g0 >= 0) & (g1 < 0)
    ks, c = ks[has], c[has]
    idx = np.searchsorted(-G, c, side="right") - 1
    idx = np.clip(idx, 0, N - 1)
    a, b = grid[idx], grid[idx + 1]

    def g(u):
        return w @ lift.theta(u) + c

    def dg(u):
        return w @ lift.dtheta(u)

    u = _bisect_newton(g, dg, a, b, G[idx] + c)
    # a root at u = 1 is the root at u = 0 with k shifted by the winding
    wrapped = u >= 1.0
    u = np.where(wrapped, u - 1.0, u)
    ks = ks + np.outer(wrapped, lift.winding)
    thu = lift.theta(u) + ks.T
    x = np.linalg.solve(Ld, thu[:d]).T
    keep = _inside(x, box)
    x, ks, u, thu = x[keep], ks[keep], u[keep], thu[:, keep]
    res = residual(curve, M, x, u)
    bad = res > RESIDUAL_TOL
    if np.any(bad):
        raise ResidualFailure(f"{bad.sum()} refined roots have residual up to {res.max():.3g}")
    return _finish(x, res, ks, u, box)


def enumerate_points_product(pcurve: ProductCurve, L: PositiveMatrix, window,
                             grid_points: int = 4096) -> QuasicrystalWindow:
    """Lambda for a product of two curves, one of which lives in (P^1)^2.

    The other block (the driver, with as many coordinates as x) fixes
    x = L_1^{-1}(theta1(u1) + k1). The planar block is then one scalar
    condition: with Gamma = theta4 o theta3^{-1}, the value
    (L_2 x)_2 - Gamma((L_2 x)_1 - j3) must be an integer for some
    j3 in [0, |m3|). Sign changes of that shifted function on a grid
    bracket every solution.
    """
    box = as_box(window, L.d)
    if len(pcurve.blocks) == 1:
        return enumerate_points(pcurve.blocks[0], L, box)
    if len(pcurve.blocks) != 2:
        raise ValueError("products are supported for two blocks")
    if pcurve.n != L.n or pcurve.d != L.d:
        raise ValueError("matrix shape does not match the product")
    sizes = pcurve.sizes
    if sizes[1] == 2 and sizes[0] == L.d:
        drv, pln = 0, 1
    elif sizes[0] == 2 and sizes[1] == L.d:
        drv, pln = 1, 0
    else:
        raise ValueError("need one planar block and a driver block of size d")
    slices = pcurve.block_slices()
    M = L.entries
    L1, L2 = M[slices[drv]], M[slices[pln]]
    lift1, lift2 = _lift(pcurve.blocks[drv]), _lift(pcurve.blocks[pln])
    m3, m4 = lift2.winding

    th_box = lift1.bounds()
    img = _image_box(L1, box)
    lo = np.floor(img[:, 0] - th_box[:, 1]).astype(int) - 1
    hi = np.ceil(img[:, 1] - th_box[:, 0]).astype(int) + 1
    k1s = np.stack(np.meshgrid(*[np.arange(a, b + 1) for a, b in zip(lo, hi)], indexing="ij"),
                   axis=-1).reshape(-1, L.d)
    L1inv = np.linalg.inv(L1)
    P = L2 @ L1inv  # maps theta1 + k1 to L_2 x

    grid = np.arange(grid_points + 1) / grid_points
    th1 = lift1.theta(grid)  # (d, G)
    y0 = P @ th1  # (2, G) before adding k1
    shift = k1s @ P.T  # (K, 2)
    x0 = (L1inv @ th1).T  # (G, d)
    xs1 = k1s @ L1inv.T  # (K, d)

    def phi(u1, k1, j3):
        y = P @ lift1.theta(u1) + (k1 @ P.T).T
        u2 = lift2.inverse(0, y[0] - j3)
        return y[1] - lift2.theta(u2)[1], u2

    brackets = []
    for j3 in range(abs(int(m3))):
        for ki, k1 in enumerate(k1s):
            xg = x0 + xs1[ki]
            near = _inside(xg, box, pad=1.0)
            if not np.any(near):
                continue
            yk = y0 + shift[ki][:, None]
            vals = yk[1] - lift2.theta(lift2.inverse(0, yk[0] - j3))[1]
            fl = np.floor(vals)
            for i in np.flatnonzero((fl[:-1] != fl[1:]) & (near[:-1] | near[1:])):
                lo_v, hi_v = sorted((vals[i], vals[i + 1]))
                for j4 in range(int(math.floor(lo_v)) + 1, int(math.floor(hi_v)) + 1):
                    brackets.append((i, ki, j3, j4))
    if not brackets:
        raise WindowEmpty("no point of the set lies in the window")
    br = np.array(brackets)
    a, b = grid[br[:, 0]], grid[br[:, 0] + 1]
    K1 = k1s[br[:, 1]]
    j3s, j4s = br[:, 2], br[:, 3]
    fa = phi(a, K1, j3s)[0] - j4s
    for _ in range(80):
        mid = 0.5 * (a + b)
        fm = phi(mid, K1, j3s)[0] - j4s
        same = (fm >= 0) == (fa >= 0)
        a = np.where(same, mid, a)
        fa = np.where(same, fm, fa)
        b = np.where(same, b, mid)
        if np.all(b - a < ROOT_TOL):
            break
    u1 = 0.5 * (a + b)
    _, u2 = phi(u1, K1, j3s)
    x = (L1inv @ (lift1.theta(u1) + K1.T)).T
    k2 = np.round(x @ L2.T - lift2.theta(u2).T).astype(np.int64)
    ks = np.zeros((len(x), pcurve.n), dtype=np.int64)
    ks[:, slices[drv]] = K1
    ks[:, slices[pln]] = k2
    # report u in [0, 1) and move the integer parts of u into k
    ks[:, slices[drv]] += np.outer(np.floor(u1).astype(np.int64), lift1.winding)
    ks[:, slices[pln]] += np.outer(np.floor(u2).astype(np.int64), lift2.winding)
    u1 = np.mod(u1, 1.0)
    u2 = np.mod(u2, 1.0)
    keep = _inside(x, box)
    x, u1, u2, ks = x[keep], u1[keep], u2[keep], ks[keep]
    res = product_residual(pcurve, M, x, u1, u2, drv)
    bad = res > RESIDUAL_TOL
    if np.any(bad):
        raise ResidualFailure(f"{bad.sum()} refined roots have residual up to {res.max():.3g}")
    us = np.column_stack([u1, u2]) if drv == 0 else np.column_stack([u2, u1])
    return _finish(x, res, ks, us, box)


def product_residual(pcurve: ProductCurve, M, x, u_drv, u_pln, drv: int) -> np.ndarray:
    lhs = np.exp(2j * np.pi * (x @ M.T))
    parts = [None, None]
    parts[drv] = pcurve.blocks[drv].psi_u(u_drv).T
    parts[1 - drv] = pcurve.blocks[1 - drv].psi_u(u_pln).T
    rhs = np.hstack(parts)
    return np.max(np.abs(lhs - rhs), axis=1)


# --- statistics ---------------------------------------------------------------

def ball_volume(R: float, d: int) -> float:
    return math.pi ** (d / 2) / math.gamma(d / 2 + 1) * R**d


def delone_stats(qw: QuasicrystalWindow, probes: int = 100) -> dict:
    """Minimum gap, covering radius estimate and density on the largest inscribed ball."""
    if len(qw) < 2:
        raise TooFewPoints("need at least two points")
    box = qw.window
    d = qw.d
    tree = cKDTree(qw.points)
    spacing = (np.prod(box[:, 1] - box[:, 0]) / len(qw)) ** (1 / d)
    erode = min(2.0 * spacing, 0.25 * float(np.min(box[:, 1] - box[:, 0])))
    axes = [np.linspace(lo + erode, hi - erode, probes) for lo, hi in box]
    probe = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d)
    cover, _ = tree.query(probe)
    center = box.mean(axis=1)
    R = float(np.min(box[:, 1] - box[:, 0]) / 2)
    count = len(tree.query_ball_point(center, R))
    return {"min_gap": qw.min_gap, "covering_radius": float(cover.max()),
            "density": count / ball_volume(R, d), "radius": R, "count": count}


def count_in_ball(qw: QuasicrystalWindow, center, R: float) -> int:
    return len(cKDTree(qw.points).query_ball_point(np.asarray(center, float), R))


def line_probe(qw: QuasicrystalWindow, a, b, j_range: int, tol: float = 1e-8) -> dict:
    """Number of j in [-j_range, j_range] with a + j b within ``tol`` of a point."""
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    if not np.any(b):
        raise ValueError("b must be nonzero")
    js = np.arange(-j_range, j_range + 1)
    probe = a + js[:, None] * b
    inside = _inside(probe, qw.window)
    dist, _ = cKDTree(qw.points).query(probe)
    hits = (dist <= tol) & inside
    return {"count": int(hits.sum()), "hits": js[hits].tolist(), "probed": int(inside.sum()),
            "j_range": int(j_range)}


def hausdorff_on_window(A: np.ndarray, B: np.ndarray, fullA: np.ndarray, fullB: np.ndarray) -> float:
    """Symmetric distance of the restricted sets A, B to the unrestricted sets fullB, fullA."""
    if len(A) == 0 and len(B) == 0:
        return 0.0
    dA = cKDTree(fullB).query(A)[0].max() if len(A) else 0.0
    dB = cKDTree(fullA).query(B)[0].max() if len(B) else 0.0
    return float(max(dA, dB))


def almost_period_probe(curve: LeeYangCurve, L: PositiveMatrix, eps: float, search_box,
                        window=(-5, 5, -5, 5), qw: QuasicrystalWindow | None = None) -> dict:
    """Translations tau in ``search_box`` moving Lambda by at most ``eps`` on ``window``.

    Candidates make L tau nearly integral: the first d coordinates are
    integers exactly (tau = L_d^{-1} k'), then tau is moved by least squares
    to the nearest integer vector of L tau. Each candidate is verified by the
    Hausdorff distance on the window eroded by the covering radius.
    """
    d = L.d
    W = as_box(window, d)
    S = as_box(search_box, d)
    Ld = L.entries[:d]
    img = _image_box(Ld, S)
    axes = [np.arange(math.floor(lo), math.ceil(hi) + 1) for lo, hi in img]
    kp = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d)
    taus = np.linalg.solve(Ld, kp.T).T
    taus = taus[_inside(taus, S)]
    Ltau = taus @ L.entries.T
    kk = np.round(Ltau)
    taus = np.array([np.linalg.lstsq(L.entries, k, rcond=None)[0] for k in kk]).reshape(-1, d)
    dist = np.max(np.abs(taus @ L.entries.T - kk), axis=1) if len(taus) else np.zeros(0)
    cand = taus[dist < eps]
    cdist = dist[dist < eps]
    if not np.any(np.all(np.abs(cand) < 1e-12, axis=1)):
        cand = np.vstack([np.zeros((1, d)), cand])
        cdist = np.concatenate([[0.0], cdist])
    reach = float(np.max(np.abs(cand))) if len(cand) else 0.0
    big = np.column_stack([W[:, 0] - reach - 2, W[:, 1] + reach + 2])
    full = qw if qw is not None and np.all(qw.window[:, 0] <= big[:, 0]) and \
        np.all(qw.window[:, 1] >= big[:, 1]) else enumerate_points(curve, L, big)
    stats = delone_stats(full.restrict(W))
    inner = np.column_stack([W[:, 0] + stats["covering_radius"], W[:, 1] - stats["covering_radius"]])
    out = []
    for tau, dd in zip(cand, cdist):
        A = full.points[_inside(full.points, inner)]
        shifted = full.points + tau
        B = shifted[_inside(shifted, inner)]
        h = hausdorff_on_window(A, B, full.points, shifted)
        if h <= eps:
            out.append({"tau": tau.tolist(), "lattice_distance": float(dd), "hausdorff": h})
    ratios = [o["hausdorff"] / o["lattice_distance"] for o in out if o["lattice_distance"] > 0]
    return {"eps": eps, "taus": out, "fitted_C": float(max(ratios)) if ratios else None,
            "candidates": int(len(cand))}
