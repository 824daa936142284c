"""Continuous piecewise-linear finite element space on a triangulation.

One degree of freedom per vertex; boundary vertices are constrained,
interior vertices are free. Gradients of basis functions are piecewise
constant and precomputed per cell.
"""

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .mesh import Mesh


@dataclass
class BoundaryData:
    """Dirichlet datum g(x, y) with optional gradient (both vectorised)."""

    g: Callable
    grad_g: Optional[Callable] = None


class Space:
    """P1 Lagrange space: hat function per vertex, split into free and
    constrained (boundary) degrees of freedom."""

    def __init__(self, mesh: Mesh):
        self.mesh = mesh
        nv = mesh.num_vertices
        mask = np.zeros(nv, dtype=bool)
        mask[mesh.boundary_vertices] = True
        self.constrained_dofs = np.flatnonzero(mask)
        self.free_dofs = np.flatnonzero(~mask)

        # per-cell geometry: areas and constant basis gradients
        pts = mesh.vertices
        cells = mesh.cells
        p0, p1, p2 = pts[cells[:, 0]], pts[cells[:, 1]], pts[cells[:, 2]]
        d1 = p1 - p0
        d2 = p2 - p0
        det = d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]  # = 2*area > 0
        self.cell_areas = 0.5 * det
        g = np.empty((cells.shape[0], 3, 2))
        g[:, 0, 0] = p1[:, 1] - p2[:, 1]
        g[:, 0, 1] = p2[:, 0] - p1[:, 0]
        g[:, 1, 0] = p2[:, 1] - p0[:, 1]
        g[:, 1, 1] = p0[:, 0] - p2[:, 0]
        g[:, 2, 0] = p0[:, 1] - p1[:, 1]
        g[:, 2, 1] = p1[:, 0] - p0[:, 0]
        g /= det[:, None, None]
        self.cell_grads = g  # (nc, 3, 2): grad of local basis a on cell c

        self._edges = None

    @property
    def num_dofs(self):
        return self.mesh.num_vertices

    def edges(self):
        """Unique mesh edges as a (ne, 2) array of vertex indices."""
        if self._edges is None:
            c = self.mesh.cells
            e = np.vstack([c[:, [0, 1]], c[:, [1, 2]], c[:, [2, 0]]])
            e.sort(axis=1)
            self._edges = np.unique(e, axis=0)
        return self._edges


@dataclass
class DiscreteFunction:
    """Coefficient vector over the vertices of a :class:`Space`."""

    space: Space
    coeffs: np.ndarray

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=float)
        if self.coeffs.shape != (self.space.num_dofs,):
            raise ValueError("coefficient vector has wrong length")

    def copy(self):
        return DiscreteFunction(self.space, self.coeffs.copy())


def interpolate(g, space: Space) -> DiscreteFunction:
    """Nodal interpolant: coefficient i equals g at vertex i."""
    fn = g.g if isinstance(g, BoundaryData) else g
    pts = space.mesh.vertices
    vals = np.asarray(fn(pts[:, 0], pts[:, 1]), dtype=float)
    vals = np.broadcast_to(vals, (space.num_dofs,)).copy()
    if not np.all(np.isfinite(vals)):
        raise ValueError("boundary datum is not finite at some vertex")
    return DiscreteFunction(space, vals)


def _barycentric(space, cell, pt):
    pts = space.mesh.vertices[space.mesh.cells[cell]]
    T = np.column_stack([pts[1] - pts[0], pts[2] - pts[0]])
    lam12 = np.linalg.solve(T, np.asarray(pt, dtype=float) - pts[0])
    return np.array([1.0 - lam12.sum(), lam12[0], lam12[1]])


def evaluate(U: DiscreteFunction, pt, cell=None) -> float:
    """Value of U at a point; barycentric interpolation on the containing
    cell (or the given cell)."""
    space = U.space
    if cell is not None:
        lam = _barycentric(space, cell, pt)
        return float(lam @ U.coeffs[space.mesh.cells[cell]])
    for c in range(space.mesh.num_cells):
        lam = _barycentric(space, c, pt)
        if lam.min() >= -1e-12:
            return float(lam @ U.coeffs[space.mesh.cells[c]])
    raise ValueError("point %s is outside the mesh" % (tuple(pt),))


def cell_gradient(U: DiscreteFunction, cell) -> np.ndarray:
    """Constant gradient of U on one cell."""
    s = U.space
    return U.coeffs[s.mesh.cells[cell]] @ s.cell_grads[cell]


def all_cell_gradients(U: DiscreteFunction) -> np.ndarray:
    """(nc, 2) array of per-cell gradients."""
    s = U.space
    return np.einsum("ca,cad->cd", U.coeffs[s.mesh.cells], s.cell_grads)


def grad_lp_norm(U: DiscreteFunction, p) -> float:
    """L^p norm of |grad U| over the domain; exact for P1."""
    mags = np.linalg.norm(all_cell_gradients(U), axis=1)
    if p == np.inf or p == "inf":
        return float(mags.max())
    p = float(p)
    if p < 1:
        raise ValueError("need p >= 1, got p=%g" % p)
    return float((U.space.cell_areas @ mags**p) ** (1.0 / p))


def linf_error(U: DiscreteFunction, exact) -> float:
    """max |U - exact| over vertices, edge midpoints and cell barycentres."""
    s = U.space
    pts = s.mesh.vertices
    c = U.coeffs

    err = np.abs(c - exact(pts[:, 0], pts[:, 1])).max()

    e = s.edges()
    mid = 0.5 * (pts[e[:, 0]] + pts[e[:, 1]])
    umid = 0.5 * (c[e[:, 0]] + c[e[:, 1]])
    err = max(err, np.abs(umid - exact(mid[:, 0], mid[:, 1])).max())

    tri = s.mesh.cells
    bar = pts[tri].mean(axis=1)
    ubar = c[tri].mean(axis=1)
    err = max(err, np.abs(ubar - exact(bar[:, 0], bar[:, 1])).max())
    return float(err)


def write_coefficients(U: DiscreteFunction, path):
    """One coefficient per line, ordered by vertex index."""
    with open(path, "w") as f:
        for v in U.coeffs:
            f.write("%.17g\n" % v)


def read_coefficients(path, space: Space) -> DiscreteFunction:
    vals = np.loadtxt(path, dtype=float, ndmin=1)
    return DiscreteFunction(space, vals)
