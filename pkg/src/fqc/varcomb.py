"""Sign variation counts and positive-Grassmannian linear algebra.

Index sets are 0-based sorted tuples throughout the Python API.
"""
from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg

from .errors import NonPositiveMinor, PrecisionTooLow, RankDeficient


def _signs(b):
    out = []
    for v in b:
        v = float(v)
        if v > 0:
            out.append(1)
        elif v < 0:
            out.append(-1)
        else:
            out.append(0)
    return out


def var(b: Sequence[float]) -> int:
    """Number of sign changes of ``b`` after discarding zeros (±inf allowed)."""
    nz = [s for s in _signs(b) if s != 0]
    return sum(1 for p, q in zip(nz, nz[1:]) if p != q)


def varbar(b: Sequence[float]) -> int:
    """Number of sign changes when zeros take the signs that maximize it."""
    signs = _signs(b)
    if not signs:
        return 0
    # best[s]: max changes so far with the current entry carrying sign s
    neg_inf = -(10**9)
    best = {1: neg_inf, -1: neg_inf}
    for s in (1, -1):
        if signs[0] in (0, s):
            best[s] = 0
    for sg in signs[1:]:
        new = {1: neg_inf, -1: neg_inf}
        for s in (1, -1):
            if sg in (0, s):
                new[s] = max(best[s], best[-s] + 1)
        best = new
    return max(best.values())


def var_array(k: np.ndarray) -> np.ndarray:
    """Row-wise ``var`` for an integer array of shape (m, n)."""
    k = np.atleast_2d(np.asarray(k))
    s = np.sign(k).astype(np.int8)
    counts = np.zeros(len(k), dtype=np.int64)
    last = np.zeros(len(k), dtype=np.int8)
    for j in range(k.shape[1]):
        col = s[:, j]
        nz = col != 0
        counts += (nz & (last != 0) & (col != last)).astype(np.int64)
        last = np.where(nz, col, last)
    return counts


def sign_of_subset(subset: Sequence[int], n: int) -> int:
    """Sign s(I) with e_I ^ e_{[n] minus I} = s(I) e_{[n]}."""
    idx = list(subset)
    if len(set(idx)) != len(idx) or any(i < 0 or i >= n for i in idx) or idx != sorted(idx):
        raise ValueError(f"malformed subset {subset!r} of range({n})")
    rest = [i for i in range(n) if i not in idx]
    perm = idx + rest
    inversions = sum(1 for a, b in itertools.combinations(range(n), 2) if perm[a] > perm[b])
    return -1 if inversions % 2 else 1


def _det_laplace(m: np.ndarray) -> float:
    d = m.shape[0]
    terms = []
    for perm in itertools.permutations(range(d)):
        inv = sum(1 for a, b in itertools.combinations(range(d), 2) if perm[a] > perm[b])
        prod = 1.0
        for r, c in enumerate(perm):
            prod *= m[r, c]
        terms.append(-prod if inv % 2 else prod)
    return math.fsum(terms)


def _det_bareiss(m: np.ndarray) -> float:
    a = np.array(m, dtype=float)
    d = a.shape[0]
    sign = 1.0
    prev = 1.0
    for k in range(d - 1):
        p = k + int(np.argmax(np.abs(a[k:, k])))
        if a[p, k] == 0.0:
            return 0.0
        if p != k:
            a[[k, p]] = a[[p, k]]
            sign = -sign
        for i in range(k + 1, d):
            for j in range(k + 1, d):
                a[i, j] = (a[i, j] * a[k, k] - a[i, k] * a[k, j]) / prev
        prev = a[k, k]
    return sign * a[d - 1, d - 1]


def det(m) -> float:
    """Determinant; Laplace expansion with compensated summation for d <= 4."""
    m = np.asarray(m, dtype=float)
    if m.shape[0] == 0:
        return 1.0
    if m.shape[0] <= 4:
        return _det_laplace(m)
    return _det_bareiss(m)


def minors(M: np.ndarray, axis: int = 0) -> dict[tuple[int, ...], float]:
    """All maximal minors of ``M``; rows subsets if axis=0, column subsets if axis=1."""
    M = np.asarray(M, dtype=float)
    if axis == 1:
        M = M.T
    n, d = M.shape
    return {I: det(M[list(I), :]) for I in itertools.combinations(range(n), d)}


@dataclass(frozen=True)
class PositiveMatrix:
    """An n x d real matrix all of whose d x d minors are positive."""

    entries: np.ndarray
    plucker: dict = field(repr=False)
    left_kernel: np.ndarray = field(repr=False)

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    n = rows
    d = cols

    def minor(self, subset) -> float:
        return self.plucker[tuple(subset)]

    def kernel_vector(self) -> np.ndarray:
        if self.left_kernel.shape[0] != 1:
            raise ValueError("left kernel is not one-dimensional")
        return self.left_kernel[0]


def plucker(L, *, tol: float = 1e-12) -> PositiveMatrix:
    """Validate ``L`` and return it with its Plücker data and left kernel.

    Raises ``NonPositiveMinor`` when a minor falls below
    ``tol * max|L_ij| ** d`` and warns when a minor is within 10x of it.
    """
    L = np.array(L, dtype=float)
    if L.ndim != 2:
        raise ValueError("L must be a matrix")
    n, d = L.shape
    if not 1 <= d <= n:
        raise ValueError(f"need n >= d >= 1, got shape {L.shape}")
    if np.linalg.matrix_rank(L) < d:
        raise RankDeficient(f"rank of L is below {d}")
    pl = minors(L)
    threshold = tol * float(np.max(np.abs(L))) ** d
    for I, v in pl.items():
        if not v > threshold:
            raise NonPositiveMinor(I, v)
    marginal = [I for I, v in pl.items() if v < 10 * threshold]
    if marginal:
        warnings.warn(f"minors {marginal} are within 10x of the positivity threshold", stacklevel=2)
    if d == n:
        kernel = np.zeros((0, n))
    elif d == n - 1:
        full = tuple(range(n))
        w = np.array([(-1) ** j * pl[tuple(i for i in full if i != j)] for j in range(n)])
        kernel = w[None, :]
    else:
        kernel = scipy.linalg.null_space(L.T).T
    kernel = np.array([_orient(row) for row in kernel]).reshape(-1, n)
    L.setflags(write=False)
    kernel.setflags(write=False)
    return PositiveMatrix(L, pl, kernel)


def _orient(row):
    nz = np.flatnonzero(np.abs(row) > 1e-14 * np.max(np.abs(row)))
    return -row if row[nz[0]] < 0 else row


def cauchy_binet_check(L: PositiveMatrix, A) -> tuple[float, float]:
    """Both sides of det(A L) = sum_I A_I L_I for an integer d x n matrix A."""
    A = np.asarray(A, dtype=float)
    lhs = det(A @ L.entries)
    terms = [det(A[:, list(I)]) * v for I, v in L.plucker.items()]
    return lhs, math.fsum(terms)


def random_positive_matrix(n: int, d: int, rng: np.random.Generator) -> np.ndarray:
    """Random n x d matrix with positive maximal minors.

    A Vandermonde block x_i^j with increasing positive nodes has positive
    maximal minors. Right multiplication by a rotation (det +1) and left
    multiplication by a positive diagonal keep every maximal minor positive
    while mixing the columns.
    """
    if not 1 <= d <= n:
        raise ValueError("need 1 <= d <= n")
    while True:
        nodes = 0.3 + np.cumsum(rng.uniform(0.15, 0.5, n))
        V = nodes[:, None] ** np.arange(d)[None, :]
        Q, R = np.linalg.qr(rng.normal(size=(d, d)))
        Q = Q * np.sign(np.diag(R))
        if np.linalg.det(Q) < 0:
            Q[:, 0] *= -1
        M = rng.uniform(0.5, 2.0, n)[:, None] * (V @ Q)
        M /= np.max(np.abs(M))
        if min(minors(M).values()) > 1e-9:
            return M


@dataclass(frozen=True)
class RelationVerdict:
    relation: tuple[int, ...] | None
    max_coeff: int
    precision: int

    @property
    def found(self) -> bool:
        return self.relation is not None

    def describe(self) -> str:
        if self.relation is None:
            return (f"no integer relation with coefficients up to {self.max_coeff} at "
                    f"{self.precision} digits (heuristic evidence only, not a proof)")
        return f"integer relation found: {list(self.relation)}"


def q_independence_heuristic(values, precision: int = 30, max_coeff: int = 10**6,
                             working_dps: int = 50) -> RelationVerdict:
    """Search for an integer relation among ``values`` with PSLQ.

    Floats are taken to carry 15 significant digits; strings and mpmath
    numbers are evaluated at ``working_dps``.
    """
    import mpmath

    from .tokens import parse_mp

    with mpmath.workdps(working_dps):
        available = working_dps
        xs = []
        for v in values:
            if isinstance(v, float):
                available = min(available, 15)
                xs.append(mpmath.mpf(v))
            elif isinstance(v, str):
                xs.append(parse_mp(v))
            else:
                xs.append(mpmath.mpf(v))
        if precision > available - 10:
            raise PrecisionTooLow(f"precision {precision} exceeds {available} - 10 working digits")
        if any(not mpmath.isfinite(x) for x in xs):
            raise ValueError("values must be finite")
        rel = mpmath.pslq(xs, tol=mpmath.mpf(10) ** (-precision), maxcoeff=max_coeff, maxsteps=10**5)
    return RelationVerdict(None if rel is None else tuple(int(r) for r in rel), max_coeff, precision)
