"""Command-line front end: single solves, exponent sweeps, and
mesh-refinement tables (CSV plus optional figures)."""

import argparse
import sys

from . import experiments
from .experiments import (CASES, DEFAULT_P_GRID, SINGULAR_DOMAIN, SMOOTH_DOMAIN,
                          SweepError, aronsson_data, convergence_study, p_sweep,
                          write_sweep_csv, write_table_csv)
from .mesh import MESH_KINDS, Rect, build_structured_mesh
from .solver import SolverConfig, SolverError, solve_plaplace
from .space import BoundaryData, write_coefficients


def _parse_domain(text):
    try:
        x0, x1, y0, y1 = (float(t) for t in text.split(","))
        return Rect(x0, x1, y0, y1)
    except (ValueError, TypeError):
        raise argparse.ArgumentTypeError(
            "expected x0,x1,y0,y1 with x0 < x1 and y0 < y1: %r" % text)


def _parse_grid(text):
    try:
        return [float(t) for t in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError("expected a comma-separated list of exponents")


def _positive(text):
    v = float(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("expected a positive value, got %s" % text)
    return v


def build_parser():
    parser = argparse.ArgumentParser(
        prog="pharmonic",
        description="p-harmonic finite element solves and convergence studies "
                    "against an infinity-harmonic reference.")
    parser.add_argument("--seed", type=int, default=None,
                        help="seed for randomised property probes (never affects solves)")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--kind", choices=MESH_KINDS, default="alternating")
    common.add_argument("--tol", type=_positive, default=1e-10, help="Newton tolerance")
    common.add_argument("--eps", type=_positive, default=1e-8,
                        help="gradient-norm regularisation")
    common.add_argument("--max-iter", type=int, default=50,
                        help="Newton iterations per continuation stage")

    ps = sub.add_parser("solve", parents=[common],
                        help="solve one p-Dirichlet problem")
    ps.add_argument("--case", choices=("affine", "aronsson"), default="aronsson")
    ps.add_argument("--n", type=int, default=16, help="cells per side")
    ps.add_argument("--p", type=_positive, default=2.0, help="target exponent")
    ps.add_argument("--domain", type=_parse_domain, default=None,
                    help="x0,x1,y0,y1 (defaults depend on --case)")
    ps.add_argument("--out", default=None, help="coefficient dump path")

    pw = sub.add_parser("sweep", parents=[common],
                        help="error-vs-p curve at fixed mesh")
    pw.add_argument("--case", choices=CASES, default="aronsson_singular")
    pw.add_argument("--n", type=int, default=16)
    pw.add_argument("--p-grid", type=_parse_grid, default=list(DEFAULT_P_GRID))
    pw.add_argument("--out", default=None, help="curve CSV path")
    pw.add_argument("--plot", default=None, help="figure path (png/pdf)")

    pt = sub.add_parser("table", parents=[common],
                        help="mesh-refinement study")
    pt.add_argument("--case", choices=CASES, default="aronsson_singular")
    pt.add_argument("--levels", type=int, default=4)
    pt.add_argument("--p-grid", type=_parse_grid, default=list(DEFAULT_P_GRID))
    pt.add_argument("--out", default=None, help="table CSV path")
    pt.add_argument("--plot", default=None, help="figure path (png/pdf)")
    return parser


def _solver_config(args, p_target=2.0):
    if args.max_iter <= 0:
        raise SystemExit(2)
    return SolverConfig(p_target=p_target, newton_tol=args.tol, eps=args.eps,
                        newton_max_iter=args.max_iter)


def _case_domain(case):
    return SINGULAR_DOMAIN if case.endswith("singular") else SMOOTH_DOMAIN


def _cmd_solve(args):
    if args.case == "affine":
        g = BoundaryData(lambda x, y: 1.0 + 2.0 * x - 3.0 * y)
        domain = args.domain or Rect(0.0, 1.0, 0.0, 1.0)
    else:
        g = aronsson_data()
        domain = args.domain or SINGULAR_DOMAIN
    m = build_structured_mesh(domain, args.n, args.kind)
    try:
        U, report = solve_plaplace(m, g, _solver_config(args, args.p))
    except SolverError as exc:
        print("solver failure: %s" % exc, file=sys.stderr)
        return 1
    print("p = %g  dofs = %d" % (args.p, m.num_vertices))
    print("energy = %.12g" % report.final_energy)
    print("residual_norm = %.6e" % report.final_residual_norm)
    if args.out:
        write_coefficients(U, args.out)
        print("wrote %s" % args.out)
    return 0


def _cmd_sweep(args):
    m = build_structured_mesh(_case_domain(args.case), args.n, args.kind)
    try:
        curve = p_sweep(m, aronsson_data(), experiments.aronsson, args.p_grid,
                        _solver_config(args))
    except SweepError as exc:
        print("solver failure: %s" % exc, file=sys.stderr)
        return 1
    p_star, best = curve.best()
    print("n = %d  best_error = %.6g at p* = %g" % (args.n, best, p_star))
    if args.out:
        write_sweep_csv(curve, args.out)
        print("wrote %s" % args.out)
    if args.plot:
        from .plotting import plot_sweep
        plot_sweep(curve, args.plot, title="%s, n = %d" % (args.case, args.n))
        print("wrote %s" % args.plot)
    return 0


def _cmd_table(args):
    if args.levels < 1:
        print("--levels must be at least 1", file=sys.stderr)
        return 2
    try:
        rows = convergence_study(args.case, args.levels, args.p_grid, args.kind,
                                 _solver_config(args))
    except SweepError as exc:
        print("solver failure: %s" % exc, file=sys.stderr)
        return 1
    print("dim,h,best_error,eoc,p_star")
    for r in rows:
        print("%d,%.6g,%.6g,%.6g,%.6g" % (r.dim, r.h, r.best_error, r.eoc, r.p_star))
    if args.out:
        write_table_csv(rows, args.out)
        print("wrote %s" % args.out)
    if args.plot:
        from .plotting import plot_table
        plot_table(rows, args.plot, title=args.case)
        print("wrote %s" % args.plot)
    return 0


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "solve":
            return _cmd_solve(args)
        if args.command == "sweep":
            return _cmd_sweep(args)
        return _cmd_table(args)
    except ValueError as exc:
        print("bad arguments: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
