"""Real root isolation for real polynomials via Sturm sequences.

Coefficients are ascending (``c[0] + c[1] t + ...``) and used exactly as
given in double precision.
"""
from __future__ import annotations

import numpy as np
from numpy.polynomial import polynomial as P


def trim(c, rtol: float = 1e-14) -> np.ndarray:
    c = np.atleast_1d(np.asarray(c, dtype=float))
    scale = np.max(np.abs(c)) if c.size else 0.0
    if scale == 0.0:
        return np.zeros(1)
    keep = np.flatnonzero(np.abs(c) > rtol * scale)
    return c[: keep[-1] + 1]


def degree(c) -> int:
    c = trim(c)
    return -1 if (len(c) == 1 and c[0] == 0.0) else len(c) - 1


def sturm_chain(c) -> list[np.ndarray]:
    p0 = trim(c)
    chain = [p0, trim(P.polyder(p0))]
    scale = np.max(np.abs(p0))
    while len(chain[-1]) > 1:
        _, r = P.polydiv(chain[-2], chain[-1])
        r = -np.asarray(r, dtype=float)
        if np.max(np.abs(r)) <= 1e-13 * scale:
            break
        r = trim(r, 1e-12)
        chain.append(r / np.max(np.abs(r)))
    return chain


def sign_changes_at(chain, x: float) -> int:
    vals = [P.polyval(x, p) for p in chain]
    signs = [np.sign(v) for v in vals if v != 0.0]
    return int(sum(1 for a, b in zip(signs, signs[1:]) if a != b))


def root_bound(c) -> float:
    c = trim(c)
    return 1.0 + float(np.max(np.abs(c[:-1] / c[-1]))) if len(c) > 1 else 1.0


def count_real_roots(c, a: float | None = None, b: float | None = None) -> int:
    """Number of distinct real roots in (a, b] (whole line by default)."""
    chain = sturm_chain(c)
    B = root_bound(c)
    a = -B - 1.0 if a is None else a
    b = B + 1.0 if b is None else b
    return sign_changes_at(chain, a) - sign_changes_at(chain, b)


def _refine(c, a, b, tol):
    dc = P.polyder(c)
    fa = P.polyval(a, c)
    fb = P.polyval(b, c)
    if fb == 0.0:
        return b
    x = 0.5 * (a + b)
    for _ in range(200):
        fx = P.polyval(x, c)
        if fx == 0.0:
            return x
        if np.sign(fx) == np.sign(fa):
            a, fa = x, fx
        else:
            b = x
        if b - a <= tol * max(1.0, abs(x)):
            break
        d = P.polyval(x, dc)
        xn = x - fx / d if d != 0.0 else None
        x = xn if xn is not None and a < xn < b else 0.5 * (a + b)
    return x


def real_roots(c, tol: float = 1e-13) -> np.ndarray:
    """Distinct real roots, sorted, isolated by Sturm counts and refined to ``tol``."""
    c = trim(c)
    if len(c) <= 1:
        return np.zeros(0)
    chain = sturm_chain(c)
    B = root_bound(c) + 1.0
    out = []
    stack = [(-B, B, sign_changes_at(chain, -B) - sign_changes_at(chain, B))]
    while stack:
        a, b, cnt = stack.pop()
        if cnt <= 0:
            continue
        if cnt == 1:
            fa, fb = P.polyval(a, c), P.polyval(b, c)
            if fb == 0.0:
                out.append(b)
                continue
            if fa != 0.0 and np.sign(fa) != np.sign(fb):
                out.append(_refine(c, a, b, tol))
                continue
        if b - a < 1e-14 * B:
            out.append(0.5 * (a + b))
            continue
        # off-centre split so that roots at simple rationals never land on a cut
        m = a + 0.4990234375 * (b - a)
        vm = sign_changes_at(chain, m)
        stack.append((a, m, sign_changes_at(chain, a) - vm))
        stack.append((m, b, vm - sign_changes_at(chain, b)))
    return np.sort(np.array(out))
