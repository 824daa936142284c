"""Exact element-wise assembly for the p-Dirichlet energy.

Energy, its first variation (residual) and its Newton linearisation
(Jacobian) for P1 functions. Gradients are piecewise constant, so
one-point quadrature per cell is exact. The gradient norm is regularised,
|grad U|^2 -> |grad U|^2 + eps^2, to keep the linearisation definite at
critical points of U; eps = 0 recovers the unregularised forms.
"""

import numpy as np

from .linalg import SparseMatrix
from .space import DiscreteFunction, all_cell_gradients


def energy(U: DiscreteFunction, p, eps=0.0) -> float:
    """Regularised p-Dirichlet energy sum_K |K| (|grad U|_K^2 + eps^2)^(p/2)."""
    p = float(p)
    if p <= 1:
        raise ValueError("energy needs p > 1, got p=%g" % p)
    gu = all_cell_gradients(U)
    s = np.einsum("cd,cd->c", gu, gu) + eps * eps
    with np.errstate(over="ignore"):  # inf energy just rejects a trial step
        return float(U.space.cell_areas @ s ** (0.5 * p))


def residual(U: DiscreteFunction, p, eps=0.0) -> np.ndarray:
    """First variation against the free-dof hat functions.

    Entry i is sum_K |K| (|grad U|^2 + eps^2)^((p-2)/2) grad U . grad phi_i,
    which equals (1/p) d/dt energy(U + t phi_i) at t = 0.
    """
    sp = U.space
    gu = all_cell_gradients(U)
    s = np.einsum("cd,cd->c", gu, gu) + eps * eps
    w = sp.cell_areas * s ** (0.5 * (p - 2.0))
    # per-cell, per-local-node contribution w * (grad U . grad phi_a)
    local = w[:, None] * np.einsum("cd,cad->ca", gu, sp.cell_grads)
    full = np.zeros(sp.num_dofs)
    np.add.at(full, sp.mesh.cells, local)
    return full[sp.free_dofs]


def jacobian(U: DiscreteFunction, p, eps=0.0, free_only=True) -> SparseMatrix:
    """Derivative of the residual: symmetric sparse matrix

    A_ij = sum_K |K| [ s^((p-2)/2) grad phi_j . grad phi_i
                       + (p-2) s^((p-4)/2) (grad U . grad phi_j)(grad U . grad phi_i) ]

    with s = |grad U|^2 + eps^2, restricted to free dofs unless
    ``free_only=False``. Positive definite on free dofs for p > 1, eps > 0.
    """
    sp = U.space
    cells = sp.mesh.cells
    grads = sp.cell_grads
    gu = all_cell_gradients(U)
    s = np.einsum("cd,cd->c", gu, gu) + eps * eps

    gg = np.einsum("cad,cbd->cab", grads, grads)  # grad phi_a . grad phi_b
    gug = np.einsum("cd,cad->ca", gu, grads)  # grad U . grad phi_a
    w1 = sp.cell_areas * s ** (0.5 * (p - 2.0))
    w2 = sp.cell_areas * (p - 2.0) * s ** (0.5 * (p - 4.0))
    ke = w1[:, None, None] * gg + w2[:, None, None] * np.einsum("ca,cb->cab", gug, gug)

    nc = cells.shape[0]
    rows = np.repeat(cells, 3, axis=1).ravel()  # a index varies slower
    cols = np.tile(cells, (1, 3)).ravel()
    A = SparseMatrix.from_coo(rows, cols, ke.reshape(nc * 9), sp.num_dofs)
    if free_only:
        return A.submatrix(sp.free_dofs)
    return A
