"""Damped Newton solver for the discrete p-Laplace problem with
continuation in the exponent.

Each continuation stage solves the Galerkin optimality system at a fixed
exponent, warm-started from the previous stage; stage 1 starts from the
nodal interpolant of the boundary data. Within a stage, steps are damped
by Armijo backtracking on the (regularised) energy, which decreases
monotonically along accepted iterates.
"""

from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from .assembly import energy, jacobian, residual
from .linalg import CgConfig, CgError, SparseMatrix, cg_solve
from .mesh import Mesh
from .space import BoundaryData, DiscreteFunction, Space, interpolate

# Armijo slack absorbing roundoff in energy differences near stationarity
_LS_ROUNDOFF = 1e-14


@dataclass
class SolverConfig:
    p_target: float = 2.0
    continuation: Optional[Sequence[float]] = None  # default: continuation_schedule
    newton_tol: float = 1e-10
    newton_max_iter: int = 50
    # step-size stop: the residual scale collapses like |grad U|^(p-2) for
    # large p, so a purely residual-based test would quit far too early
    step_tol: float = 1e-11
    eps: float = 1e-8
    ls_factor: float = 0.5
    ls_max: int = 30
    armijo: float = 1e-4
    # cap inner CG work: at large p the Newton systems are so ill
    # conditioned that chasing rel_tol can take O(10 n) iterations; a
    # truncated solve still yields a good inexact Newton direction
    cg: CgConfig = field(default_factory=lambda: CgConfig(max_iter=1500))


@dataclass
class StageRecord:
    p: float
    iterations: int
    residual_norm: float
    energy: float  # unregularised, at stage end
    cg_iterations: int


@dataclass
class SolveReport:
    stages: List[StageRecord] = field(default_factory=list)
    total_cg_iterations: int = 0
    final_energy: float = 0.0  # eps = 0
    final_residual_norm: float = 0.0  # eps = 0


@dataclass
class StepReport:
    step_length: float
    cg_iterations: int
    direction_norm: float
    energy: float  # regularised, after the step


class StageFailure(RuntimeError):
    """A Newton stage ran out of iterations or line-search halvings."""


class SolverError(RuntimeError):
    """Continuation failed; carries the last convergent stage's solution."""

    def __init__(self, message, solution, p, report):
        super().__init__(message)
        self.solution = solution
        self.p = p
        self.report = report


def continuation_schedule(p_target):
    """Exponent schedule from 2 to p_target: unit steps up to 10, then
    multiplicative steps of at most 1.25."""
    p_target = float(p_target)
    if p_target < 2:
        raise ValueError("continuation needs p_target >= 2, got %g" % p_target)
    sched = [2.0]
    while sched[-1] < p_target:
        cur = sched[-1]
        nxt = cur + 1.0 if cur < 10.0 else cur * 1.25
        sched.append(min(nxt, p_target))
    return sched


def newton_step(U: DiscreteFunction, p, cfg: SolverConfig):
    """One damped Newton step at fixed exponent.

    Solves jacobian * d = -residual on the free dofs and backtracks the
    step length until the Armijo decrease condition on the energy holds.
    """
    sp = U.space
    r = residual(U, p, cfg.eps)
    A = jacobian(U, p, cfg.eps)
    # rescale to O(1): entries shrink like |grad U|^(p-2), and for large p
    # the raw system drops into the denormal range where CG arithmetic dies
    scale = np.max(np.abs(A.data))
    if scale > 0:
        A = SparseMatrix(A.indptr, A.indices, A.data / scale, A.n)
    try:
        d_free, cg_iters = cg_solve(A, -r / max(scale, 1.0e-300), cfg.cg)
    except CgError as exc:
        # partial CG iterates are still descent directions for the energy;
        # the line search below keeps the step safe
        d_free, cg_iters = exc.x, exc.iterations

    d = np.zeros(sp.num_dofs)
    d[sp.free_dofs] = d_free
    descent = r @ d_free  # = (1/p) grad-energy . d, negative for SPD systems

    e0 = energy(U, p, cfg.eps)
    slack = _LS_ROUNDOFF * (1.0 + abs(e0))
    lam = 1.0
    for _ in range(cfg.ls_max + 1):
        trial = DiscreteFunction(sp, U.coeffs + lam * d)
        if energy(trial, p, cfg.eps) <= e0 + cfg.armijo * lam * descent + slack:
            return trial, StepReport(lam, cg_iters, float(np.linalg.norm(d_free)),
                                     energy(trial, p, cfg.eps))
        lam *= cfg.ls_factor
    raise StageFailure("line search exhausted at p=%g" % p)


def _solve_stage(U, p, cfg):
    """Newton iteration at fixed p.

    Converged when the residual norm has dropped by newton_tol relative
    to the stage's initial iterate, or the damped update is negligible
    against the coefficient vector. Either implies the residual is below
    newton_tol * (1 + initial residual norm)."""
    r0 = float(np.linalg.norm(residual(U, p, cfg.eps)))
    e_prev = energy(U, p, cfg.eps)
    cg_total = 0
    for it in range(1, cfg.newton_max_iter + 1):
        U, step = newton_step(U, p, cfg)
        cg_total += step.cg_iterations
        rn = float(np.linalg.norm(residual(U, p, cfg.eps)))
        small_step = (step.step_length * step.direction_norm
                      <= cfg.step_tol * (1.0 + float(np.linalg.norm(U.coeffs))))
        # strictly convex energy: stagnation of a full (undamped) accepted
        # step means double precision has nothing left to give
        stagnant = (step.step_length >= 0.0625
                    and e_prev - step.energy <= 1e-15 * (1.0 + abs(step.energy)))
        e_prev = step.energy
        if rn <= cfg.newton_tol * r0 or small_step or stagnant:
            return U, StageRecord(p, it, rn, energy(U, p, 0.0), cg_total)
    raise StageFailure("Newton did not converge at p=%g within %d iterations"
                       % (p, cfg.newton_max_iter))


def _stage_with_bisection(U, p_prev, p, cfg):
    """Run one continuation stage; on failure, bisect the step once."""
    try:
        U_new, rec = _solve_stage(U, p, cfg)
        return U_new, rec, []
    except (StageFailure, CgError):
        mid = 0.5 * (p_prev + p)
        U_mid, rec_mid = _solve_stage(U, mid, cfg)
        U_new, rec = _solve_stage(U_mid, p, cfg)
        return U_new, rec, [rec_mid]


def advance_exponent(U: DiscreteFunction, p_prev, p, cfg: SolverConfig):
    """Warm-start from a converged solution at ``p_prev`` and solve at
    ``p`` (one continuation hop, with single-bisection fallback).

    Returns (solution, list of stage records)."""
    U_new, rec, extra = _stage_with_bisection(U, p_prev, p, cfg)
    return U_new, extra + [rec]


def solve_plaplace(m: Mesh, g: BoundaryData, cfg: SolverConfig):
    """Solve the discrete p-Dirichlet problem on mesh ``m`` with boundary
    datum ``g``; returns (solution, report).

    Raises :class:`SolverError` carrying the last convergent stage's
    solution and exponent if a continuation stage fails.
    """
    space = Space(m)
    U = interpolate(g, space)
    schedule = list(cfg.continuation) if cfg.continuation is not None \
        else continuation_schedule(cfg.p_target)
    if schedule[0] != 2.0 or any(b <= a for a, b in zip(schedule, schedule[1:])):
        raise ValueError("continuation schedule must start at 2 and increase strictly")
    if schedule[-1] != cfg.p_target:
        raise ValueError("continuation schedule must end at p_target")

    report = SolveReport()
    p_prev = 2.0
    for i, p in enumerate(schedule):
        try:
            if i == 0:
                U, rec = _solve_stage(U, p, cfg)
                extra = []
            else:
                U, rec, extra = _stage_with_bisection(U, p_prev, p, cfg)
        except (StageFailure, CgError) as exc:
            raise SolverError(
                "continuation failed at p=%g: %s" % (p, exc), U, p_prev, report
            ) from exc
        report.stages.extend(extra + [rec])
        p_prev = p

    report.total_cg_iterations = sum(s.cg_iterations for s in report.stages)
    report.final_energy = energy(U, cfg.p_target, 0.0)
    report.final_residual_norm = float(
        np.linalg.norm(residual(U, cfg.p_target, 0.0)))
    return U, report
