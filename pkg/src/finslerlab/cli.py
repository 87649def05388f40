"""Batch command-line interface.

Subcommands: series, volume, cosmo integrate, cosmo hubble, residual,
curvature, geodesic, verify.  Output is CSV (header row, shortest
round-trip float format) or a single JSON document that echoes the
parameters and the tool version.  Exit codes: 0 success, 1 failed
verification, 2 bad flags.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import __version__, cosmology, curvature, field_theory, fields, geodesics
from . import spaces, verification, volumes


def _emit(args, parameters: dict, header, rows, extra: dict | None = None) -> None:
    """Write rows as CSV or a JSON document to --out (default stdout)."""
    if args.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
        text = buf.getvalue()
    else:
        doc = {
            "tool": "finslerlab",
            "version": __version__,
            "parameters": parameters,
            "columns": list(header),
            "rows": [list(row) for row in rows],
        }
        if extra:
            doc.update(extra)
        text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _parse_floats(text: str) -> list:
    return [float(tok) for tok in text.replace(",", " ").split()]


# ---------------------------------------------------------------------------
# subcommand handlers
# ---------------------------------------------------------------------------

def cmd_series(args) -> int:
    series = cosmology.phi_series(args.order)
    rows = [(k + 1, str(c), float(c)) for k, c in enumerate(series.coefficients)]
    _emit(args, {"order": args.order}, ("power", "coefficient", "float_value"), rows,
          extra={"coefficients": [str(c) for c in series.coefficients]})
    return 0


def cmd_volume(args) -> int:
    rows = []
    if args.family == "ellipsoid":
        diag = _parse_floats(args.diag)
        result = volumes.ellipsoid_volume(np.diag(diag))
        rows.append((args.diag, result.value, result.method, result.error_estimate))
        header = ("diagonal", "volume", "method", "error_estimate")
        params = {"family": "ellipsoid", "diag": diag}
    elif args.family == "conformal":
        maker = {
            "euclidean": spaces.SpaceSpec.euclidean,
            "pseudo": spaces.SpaceSpec.pseudo_euclidean,
        }
        for kappa in _parse_floats(args.kappa):
            if args.space == "berwald-moore":
                spec = spaces.SpaceSpec.berwald_moore(kappa=kappa)
            else:
                spec = maker[args.space](args.n, kappa=kappa)
            x = np.zeros(spec.dim)
            vol = volumes.conformal_indicatrix_volume(spec, x)
            lag = volumes.lagrangian_from_volume(spec, x)
            rows.append((kappa, vol.value, lag, vol.method))
        header = ("kappa", "volume", "lagrangian", "method")
        params = {"family": "conformal", "space": args.space, "n": args.n,
                  "kappa": _parse_floats(args.kappa)}
    else:
        for q0 in _parse_floats(args.q0):
            result = volumes.regularized_hyperboloid_volume(q0)
            rows.append((q0, result.value, result.error_estimate, result.method))
        header = ("q0", "volume", "error_estimate", "method")
        params = {"family": "regularized", "q0": _parse_floats(args.q0)}
    _emit(args, params, header, rows)
    return 0


def cmd_cosmo_integrate(args) -> int:
    sol = cosmology.integrate_phi(args.xi_max, args.rel_tol, gamma=args.gamma,
                                  amplitude=args.amplitude, c=args.c)
    xi_values = np.linspace(0.0, sol.xi_end, args.samples)
    rows = []
    for xi in xi_values:
        xi = float(xi)
        phi = sol.phi(xi)
        rows.append((xi, phi, sol.dphi(xi) if xi > 0 else 1.0,
                     math.exp(sol.phi_integral(xi)),
                     phi / xi if xi > 0 else 1.0))
    _emit(args, {"xi_max": args.xi_max, "rel_tol": args.rel_tol,
                 "gamma": args.gamma, "amplitude": args.amplitude, "c": args.c},
          ("xi", "phi", "dphi_dxi", "psi", "h_over_h0"), rows,
          extra={"singular_xi": sol.singular_xi, "residual_norm": sol.residual_norm,
                 "h0": sol.h0})
    return 0


def cmd_cosmo_hubble(args) -> int:
    xi_values = _parse_floats(args.xi)
    xi_top = max(max(xi_values), 0.1)
    sol = cosmology.integrate_phi(min(xi_top * 1.10, 0.58), args.rel_tol,
                                  gamma=args.gamma, c=args.c)
    rows = []
    for xi in xi_values:
        r = xi / sol.gamma
        rows.append((xi, r, cosmology.hubble(sol, r) / sol.h0,
                     cosmology.hubble_quadratic(sol, r) / sol.h0))
    _emit(args, {"xi": xi_values, "rel_tol": args.rel_tol,
                 "gamma": args.gamma, "c": args.c},
          ("xi", "r", "h_over_h0", "h_over_h0_quadratic"), rows,
          extra={"h0": sol.h0})
    return 0


def cmd_residual(args) -> int:
    cases = {c[0]: c[1:] for c in verification.GRID_CASES}
    if args.family not in cases:
        raise SystemExit(f"unknown family {args.family!r}")
    field_obj, form, origin, spacing, shape = cases[args.family]
    norms, orders = verification._grid_convergence_orders(
        form, field_obj, origin, spacing, shape, levels=args.levels)
    rows = []
    for level, norm in enumerate(norms):
        factor = 2**level
        if level == 0:
            order_label = ""
        elif math.isinf(orders[level - 1]):
            order_label = "exact"
        else:
            order_label = f"{orders[level - 1]:.4f}"
        rows.append((level,
                     "x".join(str((s - 1) * factor + 1) for s in shape),
                     float(np.max(np.asarray(spacing) / factor)),
                     norm,
                     order_label))
    _emit(args, {"family": args.family, "levels": args.levels},
          ("level", "shape", "max_spacing", "max_residual", "observed_order"), rows)
    return 0


def cmd_curvature(args) -> int:
    families = {name: (fam, point) for name, fam, point in verification.CURVATURE_FAMILIES}
    if args.family not in families:
        raise SystemExit(f"unknown family {args.family!r}")
    family, default_point = families[args.family]
    point = np.array(_parse_floats(args.point)) if args.point else default_point
    bundle = curvature.tensor_bundle(family, point)
    oracle = curvature.generic_oracle_curvature(
        curvature.conformal_metric_fn(family), point, step=args.step)
    diag = curvature.scalar_curvature_diagnostic(family, point)
    row = (
        ",".join(repr(float(v)) for v in point),
        family.kappa(point),
        bundle.scalar,
        diag["explicit"],
        diag["ratio"],
        bundle.stress_trace,
        float(np.max(np.abs(bundle.christoffel - oracle.christoffel))),
        float(np.max(np.abs(bundle.riemann - oracle.riemann))),
        float(np.max(np.abs(bundle.ricci - oracle.ricci))),
    )
    _emit(args, {"family": args.family, "point": [float(v) for v in point],
                 "step": args.step},
          ("point", "kappa", "scalar_trace", "scalar_explicit_rhs", "ratio",
           "stress_trace", "delta_christoffel", "delta_riemann", "delta_ricci"),
          [row],
          extra={"ricci": bundle.ricci.tolist(), "stress": bundle.stress.tolist()})
    return 0


def cmd_geodesic(args) -> int:
    diagnostics: dict = {}
    if args.family == "cosmo":
        sol = cosmology.integrate_phi(0.55, 1e-10)
        start = np.array(_parse_floats(args.start or "0.2,0.1,0.05"))
        traj = geodesics.cosmo_trajectory(sol, start, (0.0, args.tau), tol=args.tol)
        radii = np.linalg.norm(traj.points, axis=1)
        directions = traj.points / radii[:, None]
        diagnostics["direction_drift"] = float(np.max(np.abs(directions - directions[0])))
    else:
        flows = {
            "radial-log": (spaces.SpaceSpec.euclidean(3),
                           fields.RadialLog(c=1.0, r0=1.0, dim=3), "1,0.6,-0.4"),
            "interval-log": (spaces.SpaceSpec.pseudo_euclidean(4),
                             fields.IntervalLog(c=1.0, s0=1.0, dim=4), "1,0.5,0.3,0.1"),
            "berwald-moore-log": (spaces.SpaceSpec.berwald_moore(),
                                  fields.BerwaldMooreLog(amplitude=1.0, s0=1.0),
                                  "1,0.8,1.3,0.6"),
        }
        if args.family not in flows:
            raise SystemExit(f"unknown family {args.family!r}")
        space, field_obj, default_start = flows[args.family]
        start = np.array(_parse_floats(args.start or default_start))
        flow = geodesics.FlowSpec(space, field_obj)
        traj = geodesics.integrate_flow(flow, start, (0.0, args.tau), tol=args.tol)
        diagnostics["straightness_deviation"] = geodesics.straightness_deviation(traj)
        if args.family == "interval-log":
            slope, fit_residual = geodesics.interval_slope(traj)
            diagnostics["interval_slope"] = slope
            diagnostics["interval_fit_residual"] = fit_residual
        if args.family == "berwald-moore-log":
            diagnostics["uniformity_deviation"] = geodesics.uniformity_deviation(traj)

    stride = max(1, len(traj.taus) // args.samples)
    rows = [(float(t),) + tuple(float(v) for v in p)
            for t, p in zip(traj.taus[::stride], traj.points[::stride])]
    header = ("tau",) + tuple(f"x{i}" for i in range(traj.points.shape[1]))
    _emit(args, {"family": args.family, "start": [float(v) for v in start],
                 "tau": args.tau, "tol": args.tol},
          header, rows, extra={"diagnostics": diagnostics})
    return 0


def cmd_verify(args) -> int:
    results = verification.run_all(seed=args.seed, mc_samples=args.mc_samples)
    rows = [(r.name, "PASS" if r.passed else "FAIL", r.value) for r in results]
    for name, status, value in rows:
        print(f"{status:4s} {name}: {value}")
    if args.out:
        doc = {
            "tool": "finslerlab",
            "version": __version__,
            "parameters": {"seed": args.seed, "mc_samples": args.mc_samples},
            "checks": [{"name": r.name, "passed": r.passed, "value": r.value}
                       for r in results],
            "all_passed": all(r.passed for r in results),
        }
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return 0 if all(r.passed for r in results) else 1


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="finslerlab",
        description="Numerical laboratory for conformally flat Finsler spaces.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_output_flags(p):
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--out", default=None, help="output file (default stdout)")

    p = sub.add_parser("series", help="series coefficients of the expansion profile")
    p.add_argument("--order", type=int, default=3)
    add_output_flags(p)
    p.set_defaults(func=cmd_series)

    p = sub.add_parser("volume", help="indicatrix volume tables")
    p.add_argument("--family", choices=("ellipsoid", "conformal", "regularized"),
                   required=True)
    p.add_argument("--diag", default="1,1,1", help="ellipsoid: metric diagonal")
    p.add_argument("--space", choices=("euclidean", "pseudo", "berwald-moore"),
                   default="euclidean")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--kappa", default="1.0", help="conformal: kappa values")
    p.add_argument("--q0", default="0.25,0.5,1,2", help="regularized: q0 values")
    add_output_flags(p)
    p.set_defaults(func=cmd_volume)

    p = sub.add_parser("cosmo", help="model cosmology")
    cosmo_sub = p.add_subparsers(dest="cosmo_command", required=True)

    q = cosmo_sub.add_parser("integrate", help="integrate the expansion profile")
    q.add_argument("--xi-max", type=float, default=0.55)
    q.add_argument("--rel-tol", type=float, default=1e-10)
    q.add_argument("--gamma", type=float, default=1.0)
    q.add_argument("--amplitude", type=float, default=1.0)
    q.add_argument("--c", type=float, default=1.0)
    q.add_argument("--samples", type=int, default=56)
    add_output_flags(q)
    q.set_defaults(func=cmd_cosmo_integrate)

    q = cosmo_sub.add_parser("hubble", help="Hubble profile table")
    q.add_argument("--xi", default="0.1", help="dimensionless xi = H0 r / c values")
    q.add_argument("--rel-tol", type=float, default=1e-10)
    q.add_argument("--gamma", type=float, default=1.0)
    q.add_argument("--c", type=float, default=1.0)
    add_output_flags(q)
    q.set_defaults(func=cmd_cosmo_hubble)

    p = sub.add_parser("residual", help="lattice field-equation residual norms")
    p.add_argument("--family", choices=("radial_log", "interval_log", "berwald_moore_log"),
                   default="radial_log")
    p.add_argument("--levels", type=int, default=3)
    add_output_flags(p)
    p.set_defaults(func=cmd_residual)

    p = sub.add_parser("curvature", help="tensor bundle and oracle deltas at a point")
    p.add_argument("--family", choices=("exponential", "log_interval", "quadratic"),
                   default="exponential")
    p.add_argument("--point", default=None, help="comma-separated 4 coordinates")
    p.add_argument("--step", type=float, default=0.02)
    add_output_flags(p)
    p.set_defaults(func=cmd_curvature)

    p = sub.add_parser("geodesic", help="congruence flow trajectories")
    p.add_argument("--family",
                   choices=("radial-log", "interval-log", "berwald-moore-log", "cosmo"),
                   default="radial-log")
    p.add_argument("--start", default=None, help="comma-separated start point")
    p.add_argument("--tau", type=float, default=2.0)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--samples", type=int, default=33)
    add_output_flags(p)
    p.set_defaults(func=cmd_geodesic)

    p = sub.add_parser("verify", help="run the full verification suite")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mc-samples", type=int, default=10_000_000)
    p.add_argument("--out", default=None, help="JSON report path")
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
