"""Minimal sparse linear algebra for the Newton systems.

Compressed-row symmetric matrices and a Jacobi-preconditioned conjugate
gradient loop. The CG iteration is written out explicitly so iteration
counts and residual histories are deterministic and inspectable.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.sparse as sps


class CgError(RuntimeError):
    """Conjugate gradients failed to reach the requested tolerance."""

    def __init__(self, residual_norm, iterations, x=None):
        super().__init__(
            "CG did not converge in %d iterations (residual %.3e)"
            % (iterations, residual_norm)
        )
        self.residual_norm = residual_norm
        self.iterations = iterations
        self.x = x  # last iterate, usable as an inexact solution


@dataclass
class CgConfig:
    rel_tol: float = 1e-12
    max_iter: Optional[int] = None  # default 10 * n
    preconditioner: str = "jacobi"  # or "none"

    def __post_init__(self):
        if self.rel_tol <= 0:
            raise ValueError("rel_tol must be positive")
        if self.preconditioner not in ("none", "jacobi"):
            raise ValueError("unknown preconditioner %r" % self.preconditioner)


class SparseMatrix:
    """Square sparse matrix in compressed-row storage with sorted columns."""

    def __init__(self, indptr, indices, data, n):
        self.indptr = np.asarray(indptr, dtype=np.int64)
        self.indices = np.asarray(indices, dtype=np.int64)
        self.data = np.asarray(data, dtype=float)
        self.n = int(n)
        self._rowids = np.repeat(np.arange(self.n), np.diff(self.indptr))

    @classmethod
    def from_coo(cls, rows, cols, vals, n):
        """Build from triplets, summing duplicate entries."""
        m = sps.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()
        m.sort_indices()
        return cls(m.indptr, m.indices, m.data, n)

    @property
    def nnz(self):
        return self.data.shape[0]

    def matvec(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n,):
            raise ValueError("dimension mismatch: matrix is %d, vector is %s" % (self.n, x.shape))
        prod = self.data * x[self.indices]
        return np.bincount(self._rowids, weights=prod, minlength=self.n)

    def __matmul__(self, x):
        return self.matvec(x)

    def diagonal(self):
        d = np.zeros(self.n)
        for i in range(self.n):
            row = slice(self.indptr[i], self.indptr[i + 1])
            hit = np.searchsorted(self.indices[row], i)
            lo = self.indptr[i] + hit
            if lo < self.indptr[i + 1] and self.indices[lo] == i:
                d[i] = self.data[lo]
        return d

    def toarray(self):
        a = np.zeros((self.n, self.n))
        for i in range(self.n):
            row = slice(self.indptr[i], self.indptr[i + 1])
            a[i, self.indices[row]] = self.data[row]
        return a

    def submatrix(self, keep):
        """Principal submatrix on the given (sorted) index set."""
        m = sps.csr_matrix((self.data, self.indices, self.indptr), shape=(self.n, self.n))
        m = m[np.ix_(keep, keep)].tocsr()
        m.sort_indices()
        return SparseMatrix(m.indptr, m.indices, m.data, len(keep))


def spmv(A: SparseMatrix, x):
    """Sparse matrix-vector product y = A x."""
    return A.matvec(x)


def cg_solve(A: SparseMatrix, b, cfg: CgConfig = None, callback=None):
    """Solve A x = b for SPD A; returns (x, iterations).

    Stops when ||Ax - b|| <= rel_tol * ||b||. Raises :class:`CgError` on
    non-convergence, carrying the last residual norm.
    """
    if cfg is None:
        cfg = CgConfig()
    b = np.asarray(b, dtype=float)
    if b.shape != (A.n,):
        raise ValueError("dimension mismatch between matrix and right-hand side")
    n = A.n
    max_iter = cfg.max_iter if cfg.max_iter is not None else 10 * n

    bnorm = np.linalg.norm(b)
    x = np.zeros(n)
    if bnorm == 0.0:
        return x, 0
    tol = cfg.rel_tol * bnorm

    if cfg.preconditioner == "jacobi":
        diag = A.diagonal()
        # an underflowed-to-zero diagonal marks a numerically inactive dof
        minv = np.where(diag > 0, 1.0 / np.where(diag > 0, diag, 1.0), 1.0)
    else:
        minv = np.ones(n)

    r = b.copy()
    z = minv * r
    d = z.copy()
    rz = r @ z
    rn = bnorm
    for k in range(1, max_iter + 1):
        Ad = A.matvec(d)
        alpha = rz / (d @ Ad)
        x += alpha * d
        if k % 50 == 0:
            r = b - A.matvec(x)  # periodic refresh against drift
        else:
            r -= alpha * Ad
        rn = np.linalg.norm(r)
        if callback is not None:
            callback(rn)
        if rn <= tol:
            return x, k
        z = minv * r
        rz_new = r @ z
        beta = rz_new / rz
        rz = rz_new
        d = z + beta * d
    raise CgError(rn, max_iter, x)
