"""Command line front end.

Every run writes into one output directory: ``config.json`` (echo of the
arguments), the tables (CSV/TSV) and a JSON report. Exit status is 0 when
the question was answered (including "not in class"), 1 on numerical
failure and 2 on bad input.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import billiards, exact_spectra, heat_trace, inverse_hearing, isoperimetric, mesh_fem, polygon
from .exact_spectra import Spectrum
from .heat_trace import HeatInvariants
from .polygon import Polygon

DEFAULT_SEED = 20240101


class InputError(ValueError):
    pass


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _outdir(args) -> Path:
    out = Path(args.out or f"hearshape-{args.command}")
    out.mkdir(parents=True, exist_ok=True)
    cfg = {k: v for k, v in vars(args).items() if k != "func"}
    _write_json(out / "config.json", cfg)
    return out


def _load_polygon(path) -> Polygon:
    if path is None:
        raise InputError("--input is required")
    try:
        return Polygon.load(path)
    except (OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
        raise InputError(f"cannot read polygon from {path}: {exc}") from exc


def _rectangle_sides(p: Polygon):
    if p.n == 4 and np.allclose(p.interior_angles, np.pi / 2, atol=1e-12, rtol=0):
        e = p.edge_lengths
        return float(e[0]), float(e[1])
    return None


# -- subcommands --------------------------------------------------------------

def cmd_spectrum(args) -> int:
    p = _load_polygon(args.input)
    out = _outdir(args)
    rect = _rectangle_sides(p)
    report = {"vertices": p.n, "area": p.area, "perimeter": p.perimeter}
    if rect is not None and args.method != "fem":
        s = exact_spectra.rectangle_spectrum(*rect, count=args.count)
        report["method"] = "exact rectangle"
    else:
        res = mesh_fem.dirichlet_eigenvalues(p, args.count, args.level, extrapolate=args.level >= 1)
        s = res.spectrum
        report["method"] = "fem"
        report["level"] = args.level
        rows = ["level," + ",".join(f"lambda_{k}" for k in range(1, args.count + 1))]
        rows += [f"{lev}," + ",".join(repr(float(x)) for x in lam) for lev, lam in sorted(res.history.items())]
        (out / "history.csv").write_text("\n".join(rows) + "\n")
    s.save_csv(out / "spectrum.csv")
    _write_json(out / "report.json", report)
    print(f"wrote {len(s)} eigenvalues to {out / 'spectrum.csv'}")
    return 0


def _invariants_from_input(args, out: Path):
    path = Path(args.input) if args.input else None
    if path is None:
        raise InputError("--input is required")
    if not path.exists():
        raise InputError(f"no such file: {path}")
    geodesic = args.geodesic
    if path.suffix.lower() == ".csv":
        s = Spectrum.load_csv(path)
        if args.t_min is not None and args.t_max is not None:
            grid = np.logspace(math.log10(args.t_min), math.log10(args.t_max), args.t_points)
        else:
            grid, _ = heat_trace.default_t_grid(s, points=args.t_points)
        inv, resid = heat_trace.fit_heat_invariants(s, grid)
        (out / "fit.json").write_text(heat_trace.fit_report(inv, resid, grid) + "\n")
        return inv, geodesic, {"fit_residual": resid}
    try:
        data = json.loads(path.read_text())
        inv = HeatInvariants.from_dict(data)
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise InputError(f"cannot read heat invariants from {path}: {exc}") from exc
    if geodesic is None and "geodesic" in data:
        geodesic = float(data["geodesic"])
    return inv, geodesic, {}


def cmd_hear(args) -> int:
    out = _outdir(args)
    inv, geodesic, extra = _invariants_from_input(args, out)
    family = args.family or ("trapezoid" if geodesic is not None else "parallelogram")
    truth = _load_polygon(args.truth) if args.truth else None
    inputs = {**inv.to_dict(), "geodesic": geodesic, **extra}
    try:
        if family == "parallelogram":
            params = inverse_hearing.hear_parallelogram(inv, args.tol)
            recon = params.polygon()
            got = heat_trace.geometric_heat_invariants(recon)
            resid = {"area": got.area - inv.area, "perimeter": got.perimeter - inv.perimeter,
                     "a0": got.a0 - inv.a0}
        elif family == "trapezoid":
            if geodesic is None:
                raise InputError("trapezoid hearing needs --geodesic (or a 'geodesic' key)")
            params = inverse_hearing.hear_acute_trapezoid(inv, geodesic, args.tol)
            recon = params.polygon()
            system, *_ = inverse_hearing.trapezoid_system_from_invariants(inv, geodesic)
            r1, r2 = inverse_hearing.angle_residuals(params.alpha, params.beta, system)
            resid = {"csc_equation": r1, "corner_equation": r2}
        elif family == "regular":
            if args.n is None:
                raise InputError("regular hearing needs --n")
            side = inverse_hearing.detect_regular(args.n, inv.area, inv.perimeter, args.tol or 1e-9)
            if side is None:
                raise inverse_hearing.NotInClassError(f"not a regular {args.n}-gon")
            params = None
            recon = polygon.make_regular_ngon(args.n, side)
            inputs["side"] = side
            resid = {"f": inv.area / inv.perimeter**2 - polygon.regular_shape_functional(args.n)}
        else:
            raise InputError(f"unknown family {family!r}")
    except inverse_hearing.NotInClassError as exc:
        _write_json(out / "hear_report.json",
                    {"kind": family, "inputs": inputs, "in_class": False, "reason": str(exc)})
        print(f"not in class: {exc}")
        return 0
    text = inverse_hearing.hear_report(family, inputs, params, resid, truth, recon, tol=max(args.tol, 1e-7))
    report = json.loads(text)
    report["in_class"] = True
    report["vertices"] = recon.vertices.tolist()
    _write_json(out / "hear_report.json", report)
    print(json.dumps(report.get("reconstructed") or {"side": inputs.get("side")}))
    return 0


def cmd_isoperimetric(args) -> int:
    if args.n is None or args.n < 3:
        raise InputError("--n must be an integer >= 3")
    out = _outdir(args)
    if args.input:
        seed_poly = _load_polygon(args.input)
    else:
        seed_poly = polygon.random_convex_polygon(args.n, np.random.default_rng(args.seed))
    opts = isoperimetric.MaximizeOptions(tol=args.tol or 1e-10)
    res = isoperimetric.maximize_f(args.n, seed_poly, opts)
    (out / "trajectory.csv").write_text(res.trajectory_csv())
    res.polygon.save(out / "polygon.json")
    target = polygon.regular_shape_functional(args.n)
    report = {"n": args.n, "seed": args.seed, "f": res.f, "target": target,
              "f_gap": abs(res.f - target), "stationarity_residual": res.stationarity_residual,
              "converged": res.converged, "iterations": res.iterations,
              "side_spread": float(np.ptp(res.polygon.edge_lengths)),
              "angle_spread": float(np.ptp(res.polygon.interior_angles))}
    _write_json(out / "report.json", report)
    print(f"n={args.n} f={res.f!r} target={target!r} converged={res.converged}")
    return 0 if res.converged else 1


def cmd_gap_scan(args) -> int:
    ds = [float(x) for x in args.d.split(",") if x.strip()] if args.d else []
    if not ds:
        raise InputError("empty family: give --d as a comma separated list")
    out = _outdir(args)
    rows = ["d\tlambda_1\tlambda_2\tgap\tgap_times_d23\terror"]
    good_d, good_gap = [], []
    for d in ds:
        try:
            res = mesh_fem.dirichlet_eigenvalues(polygon.thin_triangle(args.w, d), 2, args.level, extrapolate=True)
        except (mesh_fem.EigenSolverError, mesh_fem.MeshError, polygon.PolygonError) as exc:
            rows.append(f"{d!r}\tnan\tnan\tnan\tnan\t{exc}")
            continue
        l1, l2 = map(float, res.eigenvalues)
        gap = l2 - l1
        rows.append(f"{d!r}\t{l1!r}\t{l2!r}\t{gap!r}\t{gap * d ** (2 / 3)!r}\t")
        good_d.append(d)
        good_gap.append(gap)
    (out / "gap_scan.tsv").write_text("\n".join(rows) + "\n")
    report = {"w": args.w, "level": args.level, "rows": len(good_d)}
    if len(good_d) >= 2 and min(good_gap) > 0:
        slope = float(np.polyfit(np.log(good_d), np.log(good_gap), 1)[0])
        report["loglog_slope"] = slope
        scaled = np.array(good_gap) * np.array(good_d) ** (2 / 3)
        report["gap_times_d23_max"] = float(scaled.max())
        report["gap_times_d23_min"] = float(scaled.min())
    _write_json(out / "report.json", report)
    print(json.dumps(report))
    return 0 if good_d else 1


def cmd_trapezoid_pairs(args) -> int:
    out = _outdir(args)
    rng = np.random.default_rng(args.seed)
    seeds = [polygon.TrapezoidParams.from_base(6.0, 1.0, math.pi / 5, math.pi / 10)]
    report = {"budget": args.budget, "tol": args.tol, "found": False}
    for _ in range(args.budget):
        seed = seeds.pop(0) if seeds else _random_acute_trapezoid(rng)
        found = inverse_hearing.find_isoinvariant_trapezoids(seed, tol=args.tol)
        if found is None:
            continue
        t1, t2, mismatch = found
        inv1 = heat_trace.geometric_heat_invariants(t1.polygon())
        inv2 = heat_trace.geometric_heat_invariants(t2.polygon())
        report.update(found=True, mismatch=mismatch,
                      trapezoids=[vars(t1), vars(t2)],
                      invariants=[inv1.to_dict(), inv2.to_dict()],
                      geodesics=[2 * t1.h, 2 * t2.h])
        break
    _write_json(out / "pair.json", report)
    print("pair found" if report["found"] else "budget exhausted without a pair")
    return 0


def _random_acute_trapezoid(rng) -> polygon.TrapezoidParams:
    while True:
        a = rng.uniform(0.05, math.pi / 2 - 0.1)
        b = rng.uniform(0.03, math.pi / 2 - a - 0.02)
        h = rng.uniform(0.2, 2.0)
        B = h * (1 / math.tan(a) + 1 / math.tan(b)) + rng.uniform(0.2, 5.0)
        try:
            return polygon.TrapezoidParams.from_base(B, h, max(a, b), min(a, b))
        except polygon.PolygonError:
            continue


def cmd_gww_check(args) -> int:
    out = _outdir(args)
    p1, p2 = polygon.gww_pair()
    if args.control:
        v = p2.vertices.copy()
        v[0] += (0.05, 0.0)
        p2 = Polygon(v)
    r1 = mesh_fem.dirichlet_eigenvalues(p1, args.count, args.level, extrapolate=True)
    r2 = mesh_fem.dirichlet_eigenvalues(p2, args.count, args.level, extrapolate=True)
    r1.spectrum.save_csv(out / "spectrum_a.csv")
    r2.spectrum.save_csv(out / "spectrum_b.csv")
    rel = np.abs(r1.eigenvalues - r2.eigenvalues) / r1.eigenvalues
    rows = ["index,lambda_a,lambda_b,relative_difference"]
    rows += [f"{k},{a!r},{b!r},{d!r}" for k, (a, b, d) in
             enumerate(zip(r1.eigenvalues.tolist(), r2.eigenvalues.tolist(), rel.tolist()), start=1)]
    (out / "comparison.csv").write_text("\n".join(rows) + "\n")
    tol = args.tol or 0.01
    report = {"level": args.level, "count": args.count, "control": args.control,
              "max_relative_difference": float(rel.max()), "tol": tol,
              "isospectral_within_tol": bool(rel.max() < tol)}
    _write_json(out / "report.json", report)
    print(json.dumps(report))
    return 0


# -- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hearshape", description="Spectral geometry of polygons.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, **defaults):
        p.add_argument("--input", help="polygon JSON, invariants JSON or spectrum CSV")
        p.add_argument("--out", help="output directory (default hearshape-<command>)")
        p.add_argument("--seed", type=int, default=DEFAULT_SEED)
        p.add_argument("--tol", type=float, default=defaults.get("tol", 0.0))
        p.add_argument("--level", type=int, default=defaults.get("level", 4))
        p.add_argument("--count", type=int, default=defaults.get("count", 10))

    p = sub.add_parser("spectrum", help="Dirichlet spectrum of a polygon")
    common(p)
    p.add_argument("--method", choices=("auto", "fem"), default="auto")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("hear", help="reconstruct a shape from invariants or a spectrum")
    common(p)
    p.add_argument("--family", choices=("parallelogram", "trapezoid", "regular"))
    p.add_argument("--geodesic", type=float)
    p.add_argument("--n", type=int)
    p.add_argument("--truth", help="ground-truth polygon JSON for a congruence verdict")
    p.add_argument("--t-min", type=float)
    p.add_argument("--t-max", type=float)
    p.add_argument("--t-points", type=int, default=24)
    p.set_defaults(func=cmd_hear)

    p = sub.add_parser("isoperimetric", help="maximise area/perimeter**2 over n-gons")
    common(p, tol=1e-10)
    p.add_argument("--n", type=int)
    p.set_defaults(func=cmd_isoperimetric)

    p = sub.add_parser("gap-scan", help="fundamental gap of thin triangles")
    common(p, level=6)
    p.add_argument("--d", default="4,8,16,32", help="comma separated lengths")
    p.add_argument("--w", type=float, default=1.0)
    p.set_defaults(func=cmd_gap_scan)

    p = sub.add_parser("trapezoid-pairs", help="two trapezoids sharing area, perimeter and a0")
    common(p, tol=1e-8)
    p.add_argument("--budget", type=int, default=20)
    p.set_defaults(func=cmd_trapezoid_pairs)

    p = sub.add_parser("gww-check", help="compare FEM spectra of the isospectral pair")
    common(p, level=6, tol=0.01)
    p.add_argument("--control", action="store_true", help="perturb the second polygon")
    p.set_defaults(func=cmd_gww_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (mesh_fem.EigenSolverError, mesh_fem.MeshError, billiards.LemmaViolation,
            exact_spectra.BesselZeroError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 1
    except (InputError, polygon.PolygonError, exact_spectra.SpectrumError,
            heat_trace.HeatTraceError, isoperimetric.IsoperimetricError, ValueError, OSError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except (RuntimeError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
