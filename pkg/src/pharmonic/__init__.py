"""Finite element approximation of p-harmonic and infinity-harmonic
functions on triangulated rectangles."""

from .assembly import energy, jacobian, residual
from .experiments import (DEFAULT_P_GRID, SINGULAR_DOMAIN, SMOOTH_DOMAIN,
                          ExperimentRow, SweepCurve, aronsson, aronsson_data,
                          aronsson_grad, convergence_study, eoc, p_sweep,
                          verify_infinity_harmonic)
from .linalg import CgConfig, CgError, SparseMatrix, cg_solve, spmv
from .mesh import (Mesh, Rect, build_structured_mesh, mesh_size,
                   shape_regularity)
from .solver import (SolveReport, SolverConfig, SolverError,
                     continuation_schedule, newton_step, solve_plaplace)
from .space import (BoundaryData, DiscreteFunction, Space, cell_gradient,
                    evaluate, grad_lp_norm, interpolate, linf_error)

__version__ = "0.1.0"
