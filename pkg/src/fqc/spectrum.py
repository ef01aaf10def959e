"""Spectrum sites L^t k with var(k) < d, and the polytope controlling their growth.

P = {y : L^t y in [-1, 1]^d} restricted to the orthants sigma with
var(sigma) < d. Integer points of R P are exactly the k with var(k) < d
and L^t k in [-R, R]^d, so their number grows like vol(P) R^n.
"""
from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import ConvexHull, QhullError, cKDTree

from .varcomb import PositiveMatrix, var, var_array

COLLISION_TOL = 1e-10
NEAR_COLLISION_TOL = 1e-6


def as_box(window, d: int | None = None) -> np.ndarray:
    """Normalize a window to an array of shape (d, 2) of [lo, hi] rows.

    Accepts a flat list (x1min, x1max, x2min, ...) or pairs.
    """
    w = np.asarray(window, dtype=float)
    if w.ndim == 1:
        w = w.reshape(-1, 2)
    if d is not None and w.shape[0] != d:
        raise ValueError(f"window has dimension {w.shape[0]}, expected {d}")
    if np.any(w[:, 1] <= w[:, 0]):
        raise ValueError("window is empty")
    return w


def valid_orthants(n: int, d: int) -> list[tuple]:
    return [s for s in itertools.product((1, -1), repeat=n) if var(s) < d]


@dataclass(frozen=True)
class OrthantPiece:
    sigma: tuple
    vertices: np.ndarray = field(repr=False)
    volume: float


@dataclass(frozen=True)
class VarPolytope:
    pieces: tuple

    @property
    def total(self) -> float:
        return float(sum(p.volume for p in self.pieces))

    def report(self) -> dict:
        return {"total": self.total,
                "pieces": [{"sigma": list(p.sigma), "volume": p.volume} for p in self.pieces]}


def _halfspaces(L: PositiveMatrix, sigma):
    """Rows (a, b) of a y <= b describing P_sigma."""
    n, d = L.n, L.d
    Lt = L.entries.T
    A = np.vstack([-np.diag(np.asarray(sigma, float)), Lt, -Lt])
    b = np.concatenate([np.zeros(n), np.ones(d), np.ones(d)])
    # identical hyperplanes would make vertex solves ambiguous
    keyed = {}
    for a, bb in zip(A, b):
        key = tuple(np.round(np.append(a, bb), 12))
        keyed.setdefault(key, (a, bb))
    A = np.array([a for a, _ in keyed.values()])
    b = np.array([bb for _, bb in keyed.values()])
    return A, b


def piece_vertices(L: PositiveMatrix, sigma, tol: float = 1e-10) -> np.ndarray:
    """Vertices of P_sigma by solving every n-subset of bounding hyperplanes."""
    A, b = _halfspaces(L, sigma)
    n = L.n
    verts = []
    for rows in itertools.combinations(range(len(A)), n):
        M = A[list(rows)]
        if abs(np.linalg.det(M)) < 1e-12:
            continue
        y = np.linalg.solve(M, b[list(rows)])
        if np.all(A @ y <= b + tol):
            verts.append(y)
    if not verts:
        return np.zeros((0, n))
    verts = np.array(verts)
    tree = cKDTree(verts)
    keep = np.ones(len(verts), bool)
    for i, j in sorted(tree.query_pairs(1e-9)):
        if keep[i]:
            keep[j] = False
    return verts[keep]


def simplex_volume_from_center(vertices: np.ndarray) -> float:
    """Volume of the hull of ``vertices`` as a sum of cones over triangulated facets.

    Facets come from the hull triangulation; each simplex (centroid, facet)
    contributes |det| / n!.
    """
    n = vertices.shape[1]
    if len(vertices) <= n:
        return 0.0
    try:
        hull = ConvexHull(vertices)
    except QhullError:
        return 0.0
    center = vertices[hull.vertices].mean(axis=0)
    fact = float(np.prod(np.arange(1, n + 1)))
    vol = 0.0
    for simplex in hull.simplices:
        M = vertices[simplex] - center
        vol += abs(np.linalg.det(M)) / fact
    return float(vol)


def var_polytope_volume(L: PositiveMatrix) -> VarPolytope:
    """Per-orthant pieces of P with their vertices and volumes."""
    if L.n > 6:
        raise ValueError("vertex enumeration is limited to n <= 6")
    pieces = []
    for sigma in valid_orthants(L.n, L.d):
        V = piece_vertices(L, sigma)
        pieces.append(OrthantPiece(sigma, V, simplex_volume_from_center(V)))
    return VarPolytope(tuple(pieces))


@dataclass(frozen=True)
class SpectrumSupport:
    atoms: list = field(repr=False)  # (xi, k) pairs sorted by xi
    window: np.ndarray
    radius: float
    collisions: dict = field(default_factory=dict, repr=False)
    near_collisions: list = field(default_factory=list, repr=False)

    @property
    def xis(self) -> np.ndarray:
        d = self.window.shape[0]
        return np.array([xi for xi, _ in self.atoms]).reshape(-1, d)

    @property
    def ks(self) -> np.ndarray:
        return np.array([k for _, k in self.atoms], dtype=np.int64)

    def __len__(self):
        return len(self.atoms)

    def sites(self):
        """(xi, [k, ...]) grouping preimages that collide within the tolerance."""
        done = set()
        for idx, (xi, k) in enumerate(self.atoms):
            if idx in done:
                continue
            group = self.collisions.get(idx, [idx])
            done.update(group)
            yield xi, [self.atoms[g][1] for g in group]

    def preimages(self, xi, tol: float = 1e-9) -> list:
        xi = np.asarray(xi, dtype=float)
        return [k for x, k in self.atoms if np.max(np.abs(x - xi)) <= tol]


def integer_points_in_scaled_polytope(L: PositiveMatrix, R: float, pieces=None) -> np.ndarray:
    """All k in Z^n with var(k) < d and L^t k in [-R, R]^d (orthant by orthant)."""
    if pieces is None:
        pieces = var_polytope_volume(L).pieces
    Lt = L.entries.T
    found = []
    for p in pieces:
        if len(p.vertices) == 0:
            continue
        hi = np.floor(R * p.vertices.max(axis=0) + 1e-9).astype(int)
        lo = np.ceil(R * p.vertices.min(axis=0) - 1e-9).astype(int)
        sig = np.asarray(p.sigma)
        lo = np.where(sig > 0, np.maximum(lo, 0), lo)
        hi = np.where(sig < 0, np.minimum(hi, 0), hi)
        if np.any(hi < lo):
            continue
        found.append(_scan_box(Lt, lo, hi, R, L.d))
    if not found:
        return np.zeros((0, L.n), dtype=np.int64)
    ks = np.unique(np.vstack(found), axis=0)
    return ks


def _scan_box(Lt, lo, hi, R, d, chunk: int = 2_000_000) -> np.ndarray:
    """Integer points of the box [lo, hi] passing the var and cube filters."""
    n = len(lo)
    axes = [np.arange(a, b + 1) for a, b in zip(lo, hi)]
    # iterate over the first axis to bound memory
    rest = np.stack(np.meshgrid(*axes[1:], indexing="ij"), axis=-1).reshape(-1, n - 1) if n > 1 else \
        np.zeros((1, 0), dtype=np.int64)
    out = []
    for k0 in axes[0]:
        for s in range(0, len(rest), chunk):
            block = np.hstack([np.full((len(rest[s:s + chunk]), 1), k0), rest[s:s + chunk]])
            xi = block @ Lt.T
            ok = np.all(np.abs(xi) <= R + 1e-12, axis=1)
            block = block[ok]
            block = block[var_array(block) < d] if len(block) else block
            out.append(block)
    return np.vstack(out).astype(np.int64) if out else np.zeros((0, n), dtype=np.int64)


def enumerate_spectrum(L: PositiveMatrix, window, R: float | None = None) -> SpectrumSupport:
    """Sites xi = L^t k in ``window`` with var(k) < d, grouped by coincidence."""
    box = as_box(window, L.d)
    Rmin = float(np.max(np.abs(box)))
    if R is None:
        R = Rmin
    elif R < Rmin - 1e-12:
        raise ValueError(f"window is not contained in [-{R}, {R}]^d")
    ks = integer_points_in_scaled_polytope(L, R)
    xis = ks @ L.entries if len(ks) else np.zeros((0, L.d))
    inside = np.all((xis >= box[:, 0] - 1e-12) & (xis <= box[:, 1] + 1e-12), axis=1)
    ks, xis = ks[inside], xis[inside]
    order = np.lexsort(tuple(np.round(xis, 12).T[::-1])) if len(xis) else np.zeros(0, int)
    ks, xis = ks[order], xis[order]
    atoms = [(xis[i], tuple(int(v) for v in ks[i])) for i in range(len(ks))]
    collisions: dict = {}
    near = []
    if len(xis) > 1:
        tree = cKDTree(xis)
        for i, j in sorted(tree.query_pairs(NEAR_COLLISION_TOL)):
            dist = float(np.linalg.norm(xis[i] - xis[j]))
            if dist <= COLLISION_TOL:
                group = sorted(set(collisions.get(i, [i])) | set(collisions.get(j, [j])))
                for g in group:
                    collisions[g] = group
            else:
                near.append((atoms[i][1], atoms[j][1], dist))
        if near:
            warnings.warn(f"{len(near)} near-collisions of spectrum sites in (1e-10, 1e-6)", stacklevel=2)
    return SpectrumSupport(atoms, box, float(R), collisions, near)


def growth_check(L: PositiveMatrix, Rs) -> dict:
    """Counts of k with var(k) < d and L^t k in [-R, R]^d, with a 1/R fit of count / R^n."""
    Rs = [float(r) for r in Rs]
    if any(b <= a for a, b in zip(Rs, Rs[1:])):
        raise ValueError("radii must increase")
    pieces = var_polytope_volume(L).pieces
    rows = []
    for R in Rs:
        ks = integer_points_in_scaled_polytope(L, R, pieces)
        xis = ks @ L.entries
        distinct = len(np.unique(np.round(xis, 9), axis=0)) if len(xis) else 0
        rows.append({"R": R, "count": int(len(ks)), "distinct": int(distinct),
                     "ratio": len(ks) / R**L.n})
    fit = None
    if len(rows) >= 2:
        A = np.column_stack([np.ones(len(rows)), 1.0 / np.array(Rs)])
        coef, *_ = np.linalg.lstsq(A, np.array([r["ratio"] for r in rows]), rcond=None)
        fit = {"limit": float(coef[0]), "correction": float(coef[1])}
    return {"rows": rows, "fit": fit, "volume": float(sum(p.volume for p in pieces))}


def brute_force_spectrum(L: PositiveMatrix, window, kmax: int = 20) -> set:
    """Reference set of k with |k|_inf <= kmax, var(k) < d and L^t k in ``window``."""
    box = as_box(window, L.d)
    grid = np.array(list(itertools.product(range(-kmax, kmax + 1), repeat=L.n)), dtype=np.int64)
    grid = grid[var_array(grid) < L.d]
    xi = grid @ L.entries
    ok = np.all((xi >= box[:, 0] - 1e-12) & (xi <= box[:, 1] + 1e-12), axis=1)
    return {tuple(int(v) for v in k) for k in grid[ok]}
