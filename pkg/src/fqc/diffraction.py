"""Exponential sums, number variance and autocorrelation of enumerated point sets.

Everything here is a finite-R measurement. Limits are reported through
explicit R sweeps and least-squares fits in 1/R, never extrapolated silently.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .errors import WindowTooSmall
from .pointset import QuasicrystalWindow, ball_volume

DEFAULT_SEED = 0x5EED


def _check_fits(qw: QuasicrystalWindow, center, R: float):
    box = qw.window
    c = np.asarray(center, dtype=float)
    if np.any(c - R < box[:, 0] - 1e-12) or np.any(c + R > box[:, 1] + 1e-12):
        raise WindowTooSmall(f"ball of radius {R} around {c.tolist()} leaves the window")


def exp_sum(qw: QuasicrystalWindow, xi, R: float, center=None) -> complex:
    """S_R(xi) = sum over points within R of the centre of exp(2 pi i <xi, x>)."""
    center = qw.window.mean(axis=1) if center is None else np.asarray(center, float)
    _check_fits(qw, center, R)
    pts = qw.points[np.linalg.norm(qw.points - center, axis=1) <= R]
    return complex(np.sum(np.exp(2j * np.pi * (pts @ np.asarray(xi, float)))))


@dataclass(frozen=True)
class DiffractionReport:
    rows: list = field(repr=False)
    drift: dict = field(default_factory=dict)
    fits: dict = field(default_factory=dict)


def exp_sum_sweep(qw: QuasicrystalWindow, xis, Rs, coefficients=None) -> DiffractionReport:
    """S_R(xi) for every (xi, R) with optional comparison against known c_xi.

    With ``coefficients`` (one complex c_xi per xi) each row also carries the
    drift |S_R - conj(c_xi) Vol(B_R)| / R^(d-1). Per xi, the ratio S_R / Vol
    is fitted as a + b / R.
    """
    d = qw.d
    xis = np.atleast_2d(np.asarray(xis, dtype=float))
    Rs = [float(r) for r in Rs]
    center = qw.window.mean(axis=1)
    for R in Rs:
        _check_fits(qw, center, R)
    dist = np.linalg.norm(qw.points - center, axis=1)
    rows = []
    drift: dict = {}
    fits: dict = {}
    for a, xi in enumerate(xis):
        phases = np.exp(2j * np.pi * (qw.points @ xi))
        ratios = []
        for R in Rs:
            S = complex(np.sum(phases[dist <= R]))
            vol = ball_volume(R, d)
            row = {"xi": xi.tolist(), "R": R, "S": S, "vol": vol, "ratio": S / vol}
            if coefficients is not None:
                c = complex(coefficients[a])
                row["drift"] = abs(S - np.conj(c) * vol) / R ** (d - 1)
                drift.setdefault(a, []).append(row["drift"])
            rows.append(row)
            ratios.append(S / vol)
        if len(Rs) >= 2:
            A = np.column_stack([np.ones(len(Rs)), 1.0 / np.array(Rs)])
            coef, *_ = np.linalg.lstsq(A, np.array(ratios), rcond=None)
            fits[a] = {"limit": complex(coef[0]), "slope": complex(coef[1])}
    return DiffractionReport(rows, drift, fits)


def _centers(qw: QuasicrystalWindow, R: float, count: int, rng) -> np.ndarray:
    box = qw.window
    lo, hi = box[:, 0] + R, box[:, 1] - R
    if np.any(hi <= lo):
        raise WindowTooSmall(f"no ball of radius {R} fits inside the window")
    return lo + (hi - lo) * rng.random((count, qw.d))


def number_variance(qw: QuasicrystalWindow, R: float, centers: int = 200, seed=DEFAULT_SEED,
                    density: float | None = None) -> dict:
    """Variance of N_R(x) / Vol(B_R) over random centres x, and related statistics.

    ``scaled_variance`` is Var(N_R) / Vol(B_R): constant for a Poisson set and
    decaying for a hyperuniform one. ``sup_dev`` is max |N_R(x) - c0 Vol(B_R)|
    with c0 = ``density`` (defaults to the empirical mean).
    """
    rng = np.random.default_rng(seed)
    xs = _centers(qw, R, centers, rng)
    tree = cKDTree(qw.points)
    counts = np.array([len(c) for c in tree.query_ball_point(xs, R)], dtype=float)
    vol = ball_volume(R, qw.d)
    c0 = counts.mean() / vol if density is None else density
    dev = np.abs(counts - c0 * vol)
    return {"R": R, "variance": float(np.var(counts / vol)),
            "scaled_variance": float(np.var(counts) / vol),
            "sup_dev": float(dev.max()), "sup_dev_over_R_pow": float(dev.max() / R ** (qw.d - 1)),
            "mean_density": float(counts.mean() / vol)}


def number_variance_sweep(qw: QuasicrystalWindow, Rs, centers: int = 200, seed=DEFAULT_SEED,
                          density: float | None = None) -> dict:
    """Number variance over a sweep of radii with a log-log slope of the scaled variance."""
    rows = [number_variance(qw, R, centers, seed, density) for R in Rs]
    x = np.log([r["R"] for r in rows])
    y = np.log([max(r["scaled_variance"], 1e-300) for r in rows])
    slope = float(np.polyfit(x, y, 1)[0]) if len(rows) >= 2 else float("nan")
    return {"rows": rows, "slope": slope}


def decay_check(sweep: dict, max_slope: float = -0.5, min_octaves: float = 3.0) -> bool:
    """True when the scaled variance decays over at least ``min_octaves`` doublings of R."""
    Rs = [r["R"] for r in sweep["rows"]]
    octaves = math.log2(max(Rs) / min(Rs))
    return octaves >= min_octaves - 1e-9 and sweep["slope"] <= max_slope


def poisson_control(density: float, window, seed=DEFAULT_SEED) -> QuasicrystalWindow:
    """Uniform random points with the given intensity, packaged like an enumeration."""
    box = np.asarray(window, dtype=float).reshape(-1, 2)
    rng = np.random.default_rng(seed)
    vol = float(np.prod(box[:, 1] - box[:, 0]))
    m = rng.poisson(density * vol)
    pts = box[:, 0] + (box[:, 1] - box[:, 0]) * rng.random((m, box.shape[0]))
    return _package(pts, box)


def lattice_control(density: float, window) -> QuasicrystalWindow:
    """Square lattice scaled to the given density."""
    box = np.asarray(window, dtype=float).reshape(-1, 2)
    d = box.shape[0]
    h = density ** (-1.0 / d)
    axes = [np.arange(math.ceil(lo / h), math.floor(hi / h) + 1) * h for lo, hi in box]
    pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d)
    return _package(pts, box)


def _package(pts: np.ndarray, box: np.ndarray) -> QuasicrystalWindow:
    m, d = pts.shape
    gap = float(cKDTree(pts).query(pts, k=2)[0][:, 1].min()) if m > 1 else math.inf
    return QuasicrystalWindow(pts, np.zeros(m), np.zeros((m, 0), dtype=np.int64), np.zeros(m), box, gap)


def autocorrelation_estimate(qw: QuasicrystalWindow, bins: int = 41, cutoff: float = 2.0,
                             radius: float | None = None) -> dict:
    """Histogram of differences x - y, |x - y| <= cutoff, for x, y in a central ball.

    Masses are divided by the ball volume, so the central bin holds the
    density estimate plus any differences shorter than half a bin.
    ``bins`` is forced odd so that the grid is symmetric about 0.
    """
    d = qw.d
    if bins % 2 == 0:
        bins += 1
    center = qw.window.mean(axis=1)
    if radius is None:
        radius = float(np.min(qw.window[:, 1] - qw.window[:, 0]) / 2)
    if cutoff >= radius:
        raise ValueError("cutoff must be below the ball radius")
    pts = qw.points[np.linalg.norm(qw.points - center, axis=1) <= radius]
    tree = cKDTree(pts)
    pairs = tree.query_pairs(cutoff, output_type="ndarray")
    diffs = pts[pairs[:, 0]] - pts[pairs[:, 1]]
    diffs = np.vstack([diffs, -diffs, np.zeros((len(pts), d))])
    h = 2 * cutoff / bins
    edges = (np.arange(bins + 1) - bins / 2) * h
    hist, _ = np.histogramdd(diffs, bins=[edges] * d)
    vol = ball_volume(radius, d)
    return {"hist": hist / vol, "edges": edges, "points": int(len(pts)), "volume": vol}


def stealth_probe(qw: QuasicrystalWindow, xis, R: float) -> np.ndarray:
    """|S_R(xi)| / Vol(B_R) at the given sites."""
    vol = ball_volume(R, qw.d)
    return np.array([abs(exp_sum(qw, xi, R)) / vol for xi in np.atleast_2d(xis)])
