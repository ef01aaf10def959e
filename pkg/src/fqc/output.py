"""CSV, JSON and SVG emission with fixed formatting for byte-stable output."""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np


def fmt(v) -> str:
    """17 significant digits for floats, plain text for integers and strings."""
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if v == 0.0:
            return "0"
        return format(v, ".17g")
    return str(v)


def write_csv(path: Path, header: list[str], rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])
    return path


def read_csv(path: Path) -> tuple[list[str], list[list[str]]]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def dumps(obj) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True)


def write_json(path: Path, obj) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(obj) + "\n")
    return path


def points_header(d: int, n: int) -> list[str]:
    return [f"x{i + 1}" for i in range(d)] + ["residual"] + [f"k{j + 1}" for j in range(n)] + ["u"]


def spectrum_header(d: int, n: int) -> list[str]:
    return [f"xi{i + 1}" for i in range(d)] + [f"k{j + 1}" for j in range(n)]


def coeffs_header(d: int, n: int) -> list[str]:
    return spectrum_header(d, n) + ["re_c", "im_c", "abs_c", "method", "err"]


def diffraction_header(d: int) -> list[str]:
    return [f"xi{i + 1}" for i in range(d)] + ["R", "re_S", "im_S", "abs_S", "vol_ball", "ratio"]


VARIANCE_HEADER = ["R", "variance", "sup_dev", "sup_dev_over_R_pow"]


# --- SVG ----------------------------------------------------------------------

class SvgCanvas:
    """Minimal SVG writer mapping a data box onto a square canvas."""

    def __init__(self, box, size: int = 600, margin: int = 20):
        self.box = np.asarray(box, dtype=float).reshape(2, 2)
        self.size = size
        self.margin = margin
        self.items: list[str] = []

    def _map(self, x, y):
        (x0, x1), (y0, y1) = self.box
        s = self.size - 2 * self.margin
        px = self.margin + (np.asarray(x) - x0) / (x1 - x0) * s
        py = self.size - self.margin - (np.asarray(y) - y0) / (y1 - y0) * s
        return px, py

    def dots(self, pts, radius=1.5, color="#1f4e9c", radii=None):
        pts = np.atleast_2d(pts)
        px, py = self._map(pts[:, 0], pts[:, 1])
        rs = np.full(len(pts), radius) if radii is None else np.asarray(radii)
        for a, b, r in zip(px, py, rs):
            self.items.append(f'<circle cx="{a:.2f}" cy="{b:.2f}" r="{r:.2f}" fill="{color}"/>')

    def polyline(self, pts, color="#999999", width=0.6):
        pts = np.atleast_2d(pts)
        if len(pts) < 2:
            return
        px, py = self._map(pts[:, 0], pts[:, 1])
        coords = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(px, py))
        self.items.append(f'<polyline points="{coords}" fill="none" stroke="{color}" '
                          f'stroke-width="{width}"/>')

    def render(self) -> str:
        s = self.size
        head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{s}" height="{s}" '
                f'viewBox="0 0 {s} {s}">')
        frame = (f'<rect x="{self.margin}" y="{self.margin}" width="{s - 2 * self.margin}" '
                 f'height="{s - 2 * self.margin}" fill="white" stroke="black" stroke-width="0.5"/>')
        return "\n".join([head, frame, *self.items, "</svg>"]) + "\n"

    def save(self, path: Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.render())
        return path


def zero_curve_segments(lift, L: np.ndarray, pair: tuple[int, int], box, samples: int = 400):
    """Pieces of {x : ((Lx)_a, (Lx)_b) = (theta_a(u), theta_b(u)) mod Z^2} inside a planar box.

    Each integer shift (p, q) gives one parametric arc x(u) obtained by
    solving the 2x2 system rows a, b of L.
    """
    a, b = pair
    M = L[[a, b]]
    Minv = np.linalg.inv(M)
    box = np.asarray(box, dtype=float).reshape(2, 2)
    corners = np.array([[x, y] for x in box[0] for y in box[1]])
    img = corners @ M.T
    u = np.linspace(0.0, 1.0, samples)
    th = lift.theta(u)[[a, b]]
    lo = np.floor(img.min(axis=0) - th.max(axis=1)) - 1
    hi = np.ceil(img.max(axis=0) - th.min(axis=1)) + 1
    segments = []
    for p in range(int(lo[0]), int(hi[0]) + 1):
        for q in range(int(lo[1]), int(hi[1]) + 1):
            x = (Minv @ (th + np.array([[p], [q]]))).T
            inside = np.all((x >= box[:, 0]) & (x <= box[:, 1]), axis=1)
            if not inside.any():
                continue
            # split into runs that stay inside the box
            idx = np.flatnonzero(inside)
            breaks = np.flatnonzero(np.diff(idx) > 1)
            for run in np.split(idx, breaks + 1):
                segments.append(x[run])
    return segments
