"""Reference solution, sweeps over the exponent, and mesh-refinement
studies.

The reference is a weighted Aronsson function, a viscosity solution of
the infinity-Laplace equation that is singular on the coordinate axes and
has |grad u| <= 1 on the study domains. Two standard test domains are
provided: a square shifted so the axes cut through mesh cells (singular
case) and a square away from the axes (smooth case).
"""

import csv
from dataclasses import dataclass, replace
from typing import List, Sequence

import numpy as np

from .linalg import CgError
from .mesh import Rect, build_structured_mesh, mesh_size
from .solver import (SolverConfig, SolverError, StageFailure, advance_exponent,
                     solve_plaplace)
from .space import BoundaryData, linf_error

SINGULAR_DOMAIN = Rect(-1.0001, 0.9999, -1.0001, 0.9999)
SMOOTH_DOMAIN = Rect(0.5, 1.5, 0.5, 1.5)

# exponent grid for locating the best approximation at fixed mesh
DEFAULT_P_GRID = (2, 3, 4, 5, 10, 15, 20, 30, 45, 60, 75, 100, 125, 150, 185, 200)

CASES = ("aronsson_singular", "aronsson_smooth")


def aronsson(x, y):
    """Weighted Aronsson function (3/8)(|x|^{4/3} - |y|^{4/3})."""
    return 0.375 * (np.abs(x) ** (4.0 / 3.0) - np.abs(y) ** (4.0 / 3.0))


def aronsson_grad(x, y):
    """Gradient of :func:`aronsson`; components vanish on the axes."""
    gx = 0.5 * np.sign(x) * np.abs(x) ** (1.0 / 3.0)
    gy = -0.5 * np.sign(y) * np.abs(y) ** (1.0 / 3.0)
    return np.stack(np.broadcast_arrays(gx, gy), axis=-1)


def aronsson_data() -> BoundaryData:
    return BoundaryData(aronsson, aronsson_grad)


def verify_infinity_harmonic(pt, fd_step, fn=aronsson):
    """|grad u . D2u . grad u| at ``pt`` by second-order central
    differences on ``fn``; small when fn is a classical solution there.

    Rejects points closer than 10 * fd_step to a coordinate axis, where
    the Aronsson function is not twice differentiable.
    """
    x, y = float(pt[0]), float(pt[1])
    h = float(fd_step)
    if abs(x) <= 10.0 * h or abs(y) <= 10.0 * h:
        raise ValueError("point (%g, %g) too close to a coordinate axis" % (x, y))
    ux = (fn(x + h, y) - fn(x - h, y)) / (2 * h)
    uy = (fn(x, y + h) - fn(x, y - h)) / (2 * h)
    uxx = (fn(x + h, y) - 2 * fn(x, y) + fn(x - h, y)) / h**2
    uyy = (fn(x, y + h) - 2 * fn(x, y) + fn(x, y - h)) / h**2
    uxy = (fn(x + h, y + h) - fn(x + h, y - h) - fn(x - h, y + h) + fn(x - h, y - h)) / (4 * h**2)
    return float(abs(ux * ux * uxx + 2 * ux * uy * uxy + uy * uy * uyy))


@dataclass
class SweepCurve:
    """L-infinity error against the reference for each exponent, at a
    fixed mesh."""

    p_values: List[float]
    errors: List[float]

    def best(self):
        """(p*, error): smallest exponent attaining the minimal error."""
        i = int(np.argmin(self.errors))
        return self.p_values[i], self.errors[i]


@dataclass
class ExperimentRow:
    dim: int
    h: float
    best_error: float
    eoc: float
    p_star: float


class SweepError(RuntimeError):
    """Solver failure mid-sweep; carries the partial curve."""

    def __init__(self, message, curve):
        super().__init__(message)
        self.curve = curve


def p_sweep(m, g: BoundaryData, exact, p_grid, cfg: SolverConfig = None) -> SweepCurve:
    """Solve for each exponent in ``p_grid`` on a single warm-started
    continuation chain and record the error against ``exact``."""
    p_grid = [float(p) for p in p_grid]
    if any(p < 2 for p in p_grid) or any(b <= a for a, b in zip(p_grid, p_grid[1:])):
        raise ValueError("p_grid must be strictly increasing with entries >= 2")
    if cfg is None:
        cfg = SolverConfig()

    curve = SweepCurve([], [])
    U = None
    p_prev = None
    for p in p_grid:
        try:
            if U is None:
                U, _ = solve_plaplace(m, g, replace(cfg, p_target=p, continuation=None))
            else:
                U, _ = advance_exponent(U, p_prev, p, cfg)
        except (SolverError, StageFailure, CgError) as exc:
            raise SweepError("sweep failed at p=%g: %s" % (p, exc), curve) from exc
        curve.p_values.append(p)
        curve.errors.append(linf_error(U, exact))
        p_prev = p
    return curve


def eoc(e_coarse, e_fine, h_coarse, h_fine):
    """Experimental order of convergence between two refinement levels."""
    if min(e_coarse, e_fine, h_coarse, h_fine) <= 0:
        raise ValueError("errors and mesh sizes must be positive")
    if h_fine >= h_coarse:
        raise ValueError("need h_fine < h_coarse")
    return float(np.log(e_coarse / e_fine) / np.log(h_coarse / h_fine))


def convergence_study(case, levels, p_grid=DEFAULT_P_GRID, kind="alternating",
                      cfg: SolverConfig = None) -> List[ExperimentRow]:
    """Best-approximation errors over a family of refined meshes.

    Level j uses n = 4 * 2^j cells per side. Each row records the space
    dimension, mesh size, minimal sweep error, its exponent p*, and the
    convergence order relative to the previous level (0.0 for the first).
    """
    if case not in CASES:
        raise ValueError("unknown case %r; expected one of %s" % (case, (CASES,)))
    if levels < 1:
        raise ValueError("need at least one level")
    domain = SINGULAR_DOMAIN if case == "aronsson_singular" else SMOOTH_DOMAIN
    g = aronsson_data()

    rows = []
    prev = None
    for j in range(levels):
        n = 4 * 2**j
        m = build_structured_mesh(domain, n, kind)
        curve = p_sweep(m, g, aronsson, p_grid, cfg)
        p_star, best = curve.best()
        h = mesh_size(m)
        order = 0.0 if prev is None else eoc(prev[0], best, prev[1], h)
        rows.append(ExperimentRow(m.num_vertices, h, best, order, p_star))
        prev = (best, h)
    return rows


# --- delimited output ----------------------------------------------------

def _fmt(v):
    return "%.6g" % v


def write_sweep_csv(curve: SweepCurve, path):
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["p", "error"])
        for p, e in zip(curve.p_values, curve.errors):
            w.writerow([_fmt(p), _fmt(e)])


def read_sweep_csv(path) -> SweepCurve:
    with open(path, newline="") as f:
        rows = list(csv.DictReader(f))
    return SweepCurve([float(r["p"]) for r in rows], [float(r["error"]) for r in rows])


def write_table_csv(rows: Sequence[ExperimentRow], path):
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["dim", "h", "best_error", "eoc", "p_star"])
        for r in rows:
            w.writerow([r.dim, _fmt(r.h), _fmt(r.best_error), _fmt(r.eoc), _fmt(r.p_star)])


def read_table_csv(path) -> List[ExperimentRow]:
    with open(path, newline="") as f:
        rows = list(csv.DictReader(f))
    return [
        ExperimentRow(int(r["dim"]), float(r["h"]), float(r["best_error"]),
                      float(r["eoc"]), float(r["p_star"]))
        for r in rows
    ]
