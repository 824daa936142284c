"""Structured conforming triangulations of axis-aligned rectangles.

Three mesh kinds are supported:

* ``diagonal``    -- every square split along the same diagonal,
* ``alternating`` -- diagonal direction flips per square (union-jack),
* ``crisscross``  -- every square split into 4 triangles via its centre.

Vertices are numbered in row-major lattice order (x fastest); criss-cross
centre nodes are appended after the lattice. Cells are counter-clockwise.
Meshes are immutable after construction.
"""

from dataclasses import dataclass

import numpy as np

MESH_KINDS = ("diagonal", "alternating", "crisscross")


@dataclass(frozen=True)
class Rect:
    """Axis-aligned rectangle [x0, x1] x [y0, y1]."""

    x0: float
    x1: float
    y0: float
    y1: float

    def __post_init__(self):
        if not (self.x0 < self.x1 and self.y0 < self.y1):
            raise ValueError("degenerate rectangle: need x0 < x1 and y0 < y1")

    @property
    def width(self):
        return self.x1 - self.x0

    @property
    def height(self):
        return self.y1 - self.y0

    @property
    def area(self):
        return self.width * self.height


@dataclass
class Mesh:
    """Conforming triangulation of a rectangle.

    vertices : (nv, 2) float array
    cells    : (nc, 3) int array, counter-clockwise
    boundary_vertices : sorted int array of vertices on the rectangle boundary
    """

    domain: Rect
    vertices: np.ndarray
    cells: np.ndarray
    boundary_vertices: np.ndarray
    kind: str
    n: int

    def __post_init__(self):
        for a in (self.vertices, self.cells, self.boundary_vertices):
            a.setflags(write=False)

    @property
    def num_vertices(self):
        return self.vertices.shape[0]

    @property
    def num_cells(self):
        return self.cells.shape[0]


def _lattice(domain, n):
    xs = np.linspace(domain.x0, domain.x1, n + 1)
    ys = np.linspace(domain.y0, domain.y1, n + 1)
    X, Y = np.meshgrid(xs, ys)  # row-major: index = iy*(n+1) + ix
    return np.column_stack([X.ravel(), Y.ravel()])


def build_structured_mesh(domain, n, kind="alternating"):
    """Triangulate ``domain`` with ``n`` squares per side.

    Vertex/cell counts: diagonal and alternating give (n+1)^2 vertices and
    2 n^2 cells; crisscross gives (n+1)^2 + n^2 vertices and 4 n^2 cells.
    """
    if kind not in MESH_KINDS:
        raise ValueError("unknown mesh kind %r; expected one of %s" % (kind, (MESH_KINDS,)))
    n = int(n)
    if n < 1:
        raise ValueError("need at least one cell per side, got n=%d" % n)

    verts = _lattice(domain, n)
    idx = lambda ix, iy: iy * (n + 1) + ix

    cells = []
    if kind == "crisscross":
        # centre nodes appended after the lattice, row-major over squares
        xs = np.linspace(domain.x0, domain.x1, n + 1)
        ys = np.linspace(domain.y0, domain.y1, n + 1)
        cx = 0.5 * (xs[:-1] + xs[1:])
        cy = 0.5 * (ys[:-1] + ys[1:])
        CX, CY = np.meshgrid(cx, cy)
        centres = np.column_stack([CX.ravel(), CY.ravel()])
        base = verts.shape[0]
        verts = np.vstack([verts, centres])
        for iy in range(n):
            for ix in range(n):
                a = idx(ix, iy)
                b = idx(ix + 1, iy)
                c = idx(ix + 1, iy + 1)
                d = idx(ix, iy + 1)
                m = base + iy * n + ix
                cells += [(a, b, m), (b, c, m), (c, d, m), (d, a, m)]
    else:
        for iy in range(n):
            for ix in range(n):
                a = idx(ix, iy)
                b = idx(ix + 1, iy)
                c = idx(ix + 1, iy + 1)
                d = idx(ix, iy + 1)
                if kind == "diagonal" or (ix + iy) % 2 == 0:
                    cells += [(a, b, c), (a, c, d)]
                else:
                    cells += [(a, b, d), (b, c, d)]

    cells = np.asarray(cells, dtype=np.int64)

    # enforce counter-clockwise orientation
    p0 = verts[cells[:, 0]]
    d1 = verts[cells[:, 1]] - p0
    d2 = verts[cells[:, 2]] - p0
    signed = d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]
    flip = signed < 0
    cells[flip, 1], cells[flip, 2] = cells[flip, 2].copy(), cells[flip, 1].copy()

    bnd = []
    for iy in range(n + 1):
        for ix in range(n + 1):
            if ix in (0, n) or iy in (0, n):
                bnd.append(idx(ix, iy))
    boundary = np.asarray(sorted(bnd), dtype=np.int64)

    return Mesh(domain, verts, cells, boundary, kind, n)


def cell_areas(m):
    """Positive areas of all cells."""
    p0 = m.vertices[m.cells[:, 0]]
    d1 = m.vertices[m.cells[:, 1]] - p0
    d2 = m.vertices[m.cells[:, 2]] - p0
    return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])


def _edge_lengths(m):
    pts = m.vertices[m.cells]  # (nc, 3, 2)
    e = pts - np.roll(pts, 1, axis=1)
    return np.linalg.norm(e, axis=2)  # (nc, 3)


def mesh_size(m):
    """Maximum cell diameter h = max_K h_K (longest edge of a triangle)."""
    return float(_edge_lengths(m).max())


def shape_regularity(m):
    """min_K (inradius of K) / (diameter of K)."""
    lengths = _edge_lengths(m)
    perim = lengths.sum(axis=1)
    rho = 2.0 * cell_areas(m) / perim
    h = lengths.max(axis=1)
    return float((rho / h).min())


def write_mesh(m, path):
    """Plain-text dump: `nv nc`, vertices, cells, boundary indices."""
    with open(path, "w") as f:
        f.write("%d %d\n" % (m.num_vertices, m.num_cells))
        for x, y in m.vertices:
            f.write("%.17g %.17g\n" % (x, y))
        for i, j, k in m.cells:
            f.write("%d %d %d\n" % (i, j, k))
        f.write(" ".join(str(i) for i in m.boundary_vertices) + "\n")


def read_mesh(path, domain=None, kind="diagonal", n=0):
    """Read a mesh dump written by :func:`write_mesh`."""
    with open(path) as f:
        nv, nc = (int(t) for t in f.readline().split())
        verts = np.array([[float(t) for t in f.readline().split()] for _ in range(nv)])
        cells = np.array(
            [[int(t) for t in f.readline().split()] for _ in range(nc)], dtype=np.int64
        )
        boundary = np.array([int(t) for t in f.readline().split()], dtype=np.int64)
    if domain is None:
        domain = Rect(verts[:, 0].min(), verts[:, 0].max(), verts[:, 1].min(), verts[:, 1].max())
    return Mesh(domain, verts, cells, boundary, kind, n)
