"""Command line entry point: ``fqc <subcommand> --config job.json``.

Every subcommand prints exactly one JSON object on stdout. Files go to the
output directory (``--out``, else $FQC_OUT, else the config's ``out``, else
``fqc_out``). Exit codes: 0 success, 1 configuration error, 2 validation
failure, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import itertools
import json
import math
import os
import sys
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import mpmath
import numpy as np

from . import diffraction, fourier, output, pointset, spectrum
from .curve import (LeeYangCurve, ProductCurve, RealRationalFunction, build_curve, mobius_deg1,
                    product_curve)
from .errors import ConfigError, FQCError
from .tokens import WORKING_DPS, parse_mp, parse_vector
from .varcomb import PositiveMatrix, plucker, q_independence_heuristic

DEFAULT_SEED = 0x5EED


@dataclass
class JobConfig:
    curve: object
    L: PositiveMatrix
    L_mp: list = field(repr=False)
    window: np.ndarray | None
    seed: int
    out: Path
    tolerances: dict
    raw: dict = field(repr=False)

    @property
    def is_product(self) -> bool:
        return isinstance(self.curve, ProductCurve)


def _curve_from_spec(spec):
    if not isinstance(spec, dict) or "type" not in spec:
        raise ConfigError("curve must be an object with a 'type'")
    kind = spec["type"]
    if kind == "mobius_deg1":
        return mobius_deg1(parse_vector(spec.get("shifts")))
    if kind == "rational":
        factors = spec.get("factors")
        if not isinstance(factors, list) or not factors:
            raise ConfigError("rational curve needs a non-empty 'factors' list")
        fs = []
        for f in factors:
            if not isinstance(f, dict) or "num" not in f:
                raise ConfigError("each factor needs 'num' (and optionally 'den')")
            fs.append(RealRationalFunction(parse_vector(f["num"]), parse_vector(f.get("den", [1]))))
        return build_curve(fs)
    if kind == "product":
        blocks = spec.get("blocks")
        if not isinstance(blocks, list) or not blocks:
            raise ConfigError("product curve needs a non-empty 'blocks' list")
        return product_curve([_curve_from_spec(b) for b in blocks])
    raise ConfigError(f"unknown curve type {kind!r}")


def load_config(path, out_override=None, seed_override=None) -> JobConfig:
    try:
        raw = json.loads(Path(path).read_text())
    except FileNotFoundError as exc:
        raise ConfigError(f"config file {path} not found") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    return config_from_dict(raw, out_override, seed_override)


def config_from_dict(raw: dict, out_override=None, seed_override=None) -> JobConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    for key in ("curve", "L"):
        if key not in raw:
            raise ConfigError(f"config is missing '{key}'")
    rows = raw["L"]
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise ConfigError("L must be a list of rows")
    if len({len(r) for r in rows}) != 1:
        raise ConfigError("rows of L have different lengths")
    L_mp = [[parse_mp(t) for t in r] for r in rows]
    L = plucker([[float(v) for v in r] for r in L_mp])
    curve = _curve_from_spec(raw["curve"])
    if curve.n != L.n:
        raise ConfigError(f"curve lives in {curve.n} coordinates but L has {L.n} rows")
    if curve.n - curve.d != L.n - L.d:
        raise ConfigError(f"curve has codimension {curve.d} but L has {L.d} columns")
    window = None
    if "window" in raw:
        try:
            window = spectrum.as_box(parse_vector(raw["window"]), L.d)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    seed = seed_override if seed_override is not None else int(raw.get("seed", DEFAULT_SEED))
    out = out_override or os.environ.get("FQC_OUT") or raw.get("out") or "fqc_out"
    return JobConfig(curve, L, L_mp, window, seed, Path(out), dict(raw.get("tolerances", {})), raw)


# --- subcommands ----------------------------------------------------------------

def _window(cfg: JobConfig, args, default=None) -> np.ndarray:
    if args.window is not None:
        try:
            return spectrum.as_box(args.window, cfg.L.d)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    if cfg.window is not None:
        return cfg.window
    if default is not None:
        return spectrum.as_box(default, cfg.L.d)
    raise ConfigError("no window given (use --window or the config's 'window')")


def _enumerate(cfg: JobConfig, box):
    if cfg.is_product:
        return pointset.enumerate_points_product(cfg.curve, cfg.L, box)
    return pointset.enumerate_points(cfg.curve, cfg.L, box)


def _mp_minors(cfg: JobConfig) -> list:
    with mpmath.workdps(WORKING_DPS):
        n, d = len(cfg.L_mp), len(cfg.L_mp[0])
        return [mpmath.det(mpmath.matrix([cfg.L_mp[i] for i in I]))
                for I in itertools.combinations(range(n), d)]


def _curve_report(curve) -> dict:
    if isinstance(curve, ProductCurve):
        return {"blocks": [_curve_report(b) for b in curve.blocks],
                "multidegree": {",".join(map(str, I)): v for I, v in curve.multidegree.items()}}
    return {"degrees": list(curve.degrees), "injectivity": curve.injectivity,
            "off_torus": curve.offtorus,
            "certificates": [{"zeros": list(c.zeros), "poles": list(c.poles),
                              "orientation": c.orientation} for c in curve.certificates],
            "multidegree": {",".join(map(str, I)): v for I, v in curve.multidegree.items()}}


def run_validate(cfg: JobConfig, args) -> dict:
    minors_mp = _mp_minors(cfg)
    verdict = q_independence_heuristic([mpmath.nstr(m, WORKING_DPS) for m in minors_mp],
                                       precision=WORKING_DPS - 10)
    if verdict.found:
        warnings.warn(f"minors satisfy an integer relation {verdict.relation}; "
                      "non-periodicity is not expected", stacklevel=2)
    return {"status": "ok", "curve": _curve_report(cfg.curve),
            "minors": {",".join(map(str, I)): v for I, v in cfg.L.plucker.items()},
            "min_minor": min(cfg.L.plucker.values()),
            "q_independence": {"relation": list(verdict.relation) if verdict.found else None,
                               "verdict": verdict.describe(), "kind": "heuristic"}}


def _table(cfg, args, name, header, rows) -> str:
    if args.format == "json":
        path = output.write_json(cfg.out / f"{name}.json",
                                 {"header": header, "rows": [list(r) for r in rows]})
    else:
        path = output.write_csv(cfg.out / f"{name}.csv", header, rows)
    return str(path)


def _points_rows(qw):
    for x, r, k, u in zip(qw.points, qw.residuals, qw.ks, qw.us):
        uu = [u] if np.ndim(u) == 0 else list(u)
        yield [*x, r, *k, *uu]


def run_points(cfg: JobConfig, args) -> dict:
    if cfg.is_product and args.command == "points":
        raise ConfigError("the config describes a product curve; use points-product")
    box = _window(cfg, args)
    qw = _enumerate(cfg, box)
    n, d = cfg.L.n, cfg.L.d
    header = output.points_header(d, n)
    if cfg.is_product:
        header = header[:-1] + [f"u{b + 1}" for b in range(len(cfg.curve.blocks))]
    path = _table(cfg, args, "points", header, _points_rows(qw))
    stats = pointset.delone_stats(qw) if len(qw) >= 2 else {}
    return {"count": len(qw), "density_est": stats.get("density"), "min_gap": qw.min_gap,
            "covering_radius": stats.get("covering_radius"),
            "max_residual": float(qw.residuals.max()), "file": path}


def run_spectrum(cfg: JobConfig, args) -> dict:
    R = args.radius if args.radius is not None else 5.0
    box = _window(cfg, args, default=[-R, R] * cfg.L.d) if args.window is not None else \
        spectrum.as_box([-R, R] * cfg.L.d)
    sup = spectrum.enumerate_spectrum(cfg.L, box, max(R, float(np.max(np.abs(box)))))
    rows = [[*xi, *k] for xi, k in sup.atoms]
    path = _table(cfg, args, "spectrum", output.spectrum_header(cfg.L.d, cfg.L.n), rows)
    sites = sum(1 for _ in sup.sites())
    return {"count": len(sup), "distinct": sites, "collisions": len(sup.collisions),
            "near_collisions": len(sup.near_collisions), "radius": sup.radius, "file": path}


def run_coeffs(cfg: JobConfig, args) -> dict:
    R = args.radius if args.radius is not None else 3.0
    box = _window(cfg, args) if args.window is not None else spectrum.as_box([-R, R] * cfg.L.d)
    sup = spectrum.enumerate_spectrum(cfg.L, box, max(R, float(np.max(np.abs(box)))))
    atoms = fourier.coefficients_on_window(cfg.curve, cfg.L, sup)
    rows = [[*a.xi, *a.k, a.value.real, a.value.imag, abs(a.value),
             "quadrature" + ("(numerically zero)" if a.numerically_zero else ""), a.error]
            for a in atoms]
    path = _table(cfg, args, "coeffs", output.coeffs_header(cfg.L.d, cfg.L.n), rows)
    c0 = next(a.value for a in atoms if np.allclose(a.xi, 0))
    return {"count": len(atoms), "nonzero": sum(not a.numerically_zero for a in atoms),
            "c0": c0.real, "max_abs": max(abs(a.value) for a in atoms), "file": path}


def run_density(cfg: JobConfig, args) -> dict:
    box = _window(cfg, args)
    qw = _enumerate(cfg, box)
    stats = pointset.delone_stats(qw)
    c0_quad = fourier.c_lk(cfg.curve, cfg.L, np.zeros(cfg.L.n, dtype=int)).real
    c0_md = fourier.density_from_multidegree(cfg.curve, cfg.L)
    inr = float(np.min(box[:, 1] - box[:, 0]) / 2)
    Rs = [r for r in (inr / 8, inr / 4, inr / 2) if r > 0]
    sweep = diffraction.number_variance_sweep(qw, Rs, centers=50, seed=cfg.seed, density=c0_md)
    path = _table(cfg, args, "variance", output.VARIANCE_HEADER,
                  [[r["R"], r["variance"], r["sup_dev"], r["sup_dev_over_R_pow"]]
                   for r in sweep["rows"]])
    return {"count": len(qw), "density_est": stats["density"], "c0_quadrature": c0_quad,
            "c0_multidegree": c0_md, "min_gap": stats["min_gap"],
            "covering_radius": stats["covering_radius"], "variance_slope": sweep["slope"],
            "file": path}


def _radius_for(tail_fn, limit: float, start: float = 1.0) -> float:
    r = start
    while tail_fn(r) > limit:
        r *= 1.25
        if r > 1e3:
            raise FQCError("could not find a truncation radius")
    return r


def summation_check(curve, L: PositiveMatrix, g: fourier.Gaussian, limit: float = 1e-9) -> dict:
    """Both sides of the summation formula with truncation radii chosen from the tail bounds."""
    c0 = fourier.density_from_multidegree(curve, L)
    vol = spectrum.var_polytope_volume(L).total
    d, n = L.d, L.n
    rp = _radius_for(lambda r: fourier.point_side_tail(g, c0, r, d), limit / 2)
    ra = _radius_for(lambda r: fourier.spectrum_side_tail(g, c0, vol, n, r), limit / 2)
    box = spectrum.as_box([-rp - 0.5, rp + 0.5] * d)
    qw = (pointset.enumerate_points_product(curve, L, box) if isinstance(curve, ProductCurve)
          else pointset.enumerate_points(curve, L, box))
    mu = np.asarray(g.mu, float)
    sbox = np.column_stack([mu - ra - 0.5, mu + ra + 0.5])
    sup = spectrum.enumerate_spectrum(L, sbox, float(np.max(np.abs(sbox))))
    atoms = fourier.coefficients_on_window(curve, L, sup)
    return fourier.verify_summation(qw.points, rp, atoms, g, c0=c0, vol=vol, n=n, atom_radius=ra)


def run_summation(cfg: JobConfig, args) -> dict:
    d = cfg.L.d
    mu = args.mu if args.mu is not None else ([0.3, 0.4] + [0.0] * d)[:d]
    g = fourier.Gaussian(tuple(mu), args.sigma)
    report = summation_check(cfg.curve, cfg.L, g)
    report.update({"sigma": args.sigma, "mu": list(mu)})
    output.write_json(cfg.out / "summation.json", report)
    return report


def run_diffraction(cfg: JobConfig, args) -> dict:
    d = cfg.L.d
    Rs = [5.0, 10.0, 20.0] if args.radius is None else [args.radius / 4, args.radius / 2, args.radius]
    Rmax = max(Rs)
    box = spectrum.as_box([-Rmax - 1, Rmax + 1] * d)
    qw = _enumerate(cfg, box)
    sup = spectrum.enumerate_spectrum(cfg.L, spectrum.as_box([-2, 2] * d), 2.0)
    atoms = [a for a in fourier.coefficients_on_window(cfg.curve, cfg.L, sup)
             if not a.numerically_zero and np.linalg.norm(a.xi) > 0]
    atoms = sorted(atoms, key=lambda a: -abs(a.value))[:5]
    rep = diffraction.exp_sum_sweep(qw, [a.xi for a in atoms], Rs, [a.value for a in atoms])
    rows = [[*r["xi"], r["R"], r["S"].real, r["S"].imag, abs(r["S"]), r["vol"], abs(r["ratio"])]
            for r in rep.rows]
    path = _table(cfg, args, "diffraction", output.diffraction_header(d), rows)
    c0 = fourier.density_from_multidegree(cfg.curve, cfg.L)
    vRs = [Rmax / 16, Rmax / 8, Rmax / 4, Rmax / 2]
    sweep = diffraction.number_variance_sweep(qw, vRs, centers=400, seed=cfg.seed, density=c0)
    control = diffraction.number_variance_sweep(
        diffraction.poisson_control(c0, box, cfg.seed), vRs, centers=400, seed=cfg.seed)
    vpath = _table(cfg, args, "variance", output.VARIANCE_HEADER,
                   [[r["R"], r["variance"], r["sup_dev"], r["sup_dev_over_R_pow"]]
                    for r in sweep["rows"]])
    masses = []
    for a, atom in enumerate(atoms):
        last = [r for r in rep.rows if r["xi"] == atom.xi.tolist() and r["R"] == Rmax][0]
        masses.append({"xi": atom.xi, "abs_c_sq": abs(atom.value) ** 2,
                       "fitted_mass": abs(last["ratio"]) ** 2, "max_drift": max(rep.drift[a])})
    return {"atoms": masses, "variance_slope": sweep["slope"],
            "poisson_slope": control["slope"],
            "hyperuniform": diffraction.decay_check(sweep),
            "poisson_hyperuniform": diffraction.decay_check(control),
            "files": [path, vpath]}


def run_volume(cfg: JobConfig, args) -> dict:
    vol = spectrum.var_polytope_volume(cfg.L)
    report = vol.report()
    Rmax = args.radius if args.radius is not None else 40.0
    growth = spectrum.growth_check(cfg.L, [Rmax / 4, Rmax / 2, Rmax])
    report["growth"] = growth["rows"]
    report["growth_fit"] = growth["fit"]
    output.write_json(cfg.out / "volume.json", report)
    return report


def run_plot(cfg: JobConfig, args) -> dict:
    if cfg.L.d != 2:
        raise ConfigError("plots are drawn for two-dimensional sets only")
    box = _window(cfg, args)
    qw = _enumerate(cfg, box)
    canvas = output.SvgCanvas(box)
    M = cfg.L.entries
    if cfg.is_product:
        lifts = [(fourier._lift(b), sl) for b, sl in zip(cfg.curve.blocks, cfg.curve.block_slices())]
        for lift, sl in lifts:
            rows = list(range(sl.start, sl.stop))
            if len(rows) == 2 and np.linalg.matrix_rank(M[rows]) == 2:
                for seg in output.zero_curve_segments(lift, M[rows], (0, 1), box):
                    canvas.polyline(seg)
    else:
        lift = fourier._lift(cfg.curve)
        for j in range(1, cfg.L.n):
            if abs(np.linalg.det(M[[0, j]])) > 1e-12:
                for seg in output.zero_curve_segments(lift, M, (0, j), box):
                    canvas.polyline(seg)
    canvas.dots(qw.points)
    p1 = canvas.save(cfg.out / "points.svg")
    R = args.radius if args.radius is not None else 3.0
    sup = spectrum.enumerate_spectrum(cfg.L, spectrum.as_box([-R, R] * 2), R)
    atoms = fourier.coefficients_on_window(cfg.curve, cfg.L, sup)
    spec = output.SvgCanvas([-R, R, -R, R])
    big = max(abs(a.value) for a in atoms)
    live = [a for a in atoms if not a.numerically_zero]
    spec.dots([a.xi for a in live], color="#b22222",
              radii=[0.5 + 6 * math.sqrt(abs(a.value) / big) for a in live])
    p2 = spec.save(cfg.out / "spectrum.svg")
    return {"points": len(qw), "atoms": len(live), "files": [str(p1), str(p2)]}


def run_line_probe(cfg: JobConfig, args) -> dict:
    box = _window(cfg, args)
    qw = _enumerate(cfg, box)
    rng = np.random.default_rng(cfg.seed)
    if args.a is not None:
        a = np.asarray(args.a, float)
    else:
        center = box.mean(axis=1)
        a = qw.points[np.argmin(np.linalg.norm(qw.points - center, axis=1))]
    if args.b is not None:
        b = np.asarray(args.b, float)
    else:
        direction = rng.normal(size=cfg.L.d)
        b = direction / np.linalg.norm(direction) * float(np.min(box[:, 1] - box[:, 0])) / (4 * args.j_range)
    full = pointset.line_probe(qw, a, b, args.j_range)
    half = pointset.line_probe(qw, a, b, args.j_range // 2)
    return {"a": a, "b": b, "count": full["count"], "count_half_range": half["count"],
            "hits": full["hits"], "probed": full["probed"],
            "claim": "finitely many hits on every arithmetic progression"}


def run_almost_periods(cfg: JobConfig, args) -> dict:
    if cfg.is_product:
        raise ConfigError("almost-period search is implemented for single curves")
    d = cfg.L.d
    search = args.search if args.search is not None else [-10, 10] * d
    box = _window(cfg, args, default=[-5, 5] * d)
    res = pointset.almost_period_probe(cfg.curve, cfg.L, args.eps, search, box)
    output.write_json(cfg.out / "almost_periods.json", res)
    return {"eps": res["eps"], "found": len(res["taus"]), "fitted_C": res["fitted_C"],
            "taus": [t["tau"] for t in res["taus"]][:20]}


COMMANDS = {
    "validate": run_validate, "points": run_points, "points-product": run_points,
    "spectrum": run_spectrum, "coeffs": run_coeffs, "density": run_density,
    "summation": run_summation, "diffraction": run_diffraction, "volume": run_volume,
    "plot": run_plot, "line-probe": run_line_probe, "almost-periods": run_almost_periods,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fqc", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--config", required=True)
        s.add_argument("--window", type=float, nargs="+", default=None)
        s.add_argument("--radius", type=float, default=None)
        s.add_argument("--seed", type=lambda v: int(v, 0), default=None)
        s.add_argument("--out", default=None)
        s.add_argument("--format", choices=["csv", "json"], default="csv")
        if name == "summation":
            s.add_argument("--sigma", type=float, default=0.7)
            s.add_argument("--mu", type=float, nargs="+", default=None)
        if name == "line-probe":
            s.add_argument("--a", type=float, nargs="+", default=None)
            s.add_argument("--b", type=float, nargs="+", default=None)
            s.add_argument("--j-range", type=int, default=200)
        if name == "almost-periods":
            s.add_argument("--eps", type=float, default=0.05)
            s.add_argument("--search", type=float, nargs="+", default=None)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config, args.out, args.seed)
        summary = COMMANDS[args.command](cfg, args)
        summary = {"command": args.command, **summary}
        print(output.dumps(summary))
        return 0
    except FQCError as exc:
        print(f"fqc: {type(exc).__name__} [{exc.module}]: {exc}", file=sys.stderr)
        print(output.dumps({"command": args.command, "error": type(exc).__name__,
                            "module": exc.module, "message": str(exc)}))
        return exc.exit_code
    except ValueError as exc:
        print(f"fqc: invalid input: {exc}", file=sys.stderr)
        print(output.dumps({"command": args.command, "error": "ValueError", "module": "cli",
                            "message": str(exc)}))
        return 1


if __name__ == "__main__":
    sys.exit(main())
