"""Reference stiffness matrices from harmonic liftings.

The element module never constructs its shape functions; it only uses
their projections.  This module builds the functions the element is
implicitly working with: for each polygon vertex the piecewise-linear
boundary hat is lifted harmonically into the cell by a P1 finite
element solve on a refined sub-triangulation.  The energy inner
products of those liftings form a reference stiffness matrix that the
polygonal element can be measured against, both for consistency (the
two matrices act identically on linear data) and for stability
(generalized eigenvalue bounds).

On a triangle the lifting is exact and the reference matrix collapses
to the classical P1 stiffness, which is also exposed directly together
with a global P1 solve for cross-checking whole pipelines on
triangular meshes.

None of this feeds the production solve path; it is verification
machinery only.
"""

from dataclasses import dataclass

import numpy as np

from .element import StabilityConstants, local_load
from .errors import (
    DegenerateTriangle,
    EmptyInterior,
    InvertedSubTriangle,
    NoConvergence,
)
from .geometry import cell_geometry, fan_quadrature, polygon_diameter
from .linalg import SparseSymMatrix, cg_solve, generalized_eig_bounds
from .mesh import boundary_vertices
from .solver import SolveOptions, apply_dirichlet

MAX_LEVELS = 5


@dataclass
class SubTriangulation:
    """P1 mesh of one polygon: centroid fan, then uniform refinement.

    points      (M,2) sub-mesh nodes; the first N rows are the polygon
                vertices, row N is the centroid
    triangles   (T,3) vertex index triples, positively oriented
    boundary    (M,) bool mask, True for nodes on the polygon boundary
    trace       (N,M) hat boundary data: trace[i,p] is the value of the
                i-th boundary hat at node p (1 at vertex i, 0 at the
                other polygon vertices, linear along each edge, 0 at
                interior nodes where it is never used)
    """

    points: np.ndarray
    triangles: np.ndarray
    boundary: np.ndarray
    trace: np.ndarray


@dataclass
class OracleStiffness:
    """Reference local stiffness and the refinement level it used."""

    matrix: np.ndarray
    levels: int


def subtriangulate(poly, levels):
    """Fan a polygon from its centroid, then refine 4-way `levels` times."""
    if not 0 <= levels <= MAX_LEVELS:
        raise ValueError(f"levels must be in [0, {MAX_LEVELS}], got {levels}")
    geom = cell_geometry(poly)
    n = geom.n_vertices
    points = list(map(tuple, geom.vertices))
    points.append(tuple(geom.centroid))
    tri_scale = 1e-14 * geom.diameter ** 2
    triangles = []
    for i in range(n):
        j = (i + 1) % n
        a, b = geom.vertices[i], geom.vertices[j]
        c = geom.centroid
        area2 = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        if area2 <= tri_scale:
            raise InvertedSubTriangle(
                f"fan triangle at vertex {i} has area {area2 / 2:.3e}")
        triangles.append((i, j, n))
    trace = [np.eye(n)[:, i] for i in range(n)] + [np.zeros(n)]
    boundary_edges = {(min(i, (i + 1) % n), max(i, (i + 1) % n))
                      for i in range(n)}

    for _ in range(levels):
        midpoint = {}

        def split(a, b):
            key = (min(a, b), max(a, b))
            if key not in midpoint:
                pa, pb = points[a], points[b]
                points.append(((pa[0] + pb[0]) / 2, (pa[1] + pb[1]) / 2))
                if key in boundary_edges:
                    trace.append((trace[a] + trace[b]) / 2)
                    boundary_edges.discard(key)
                    m = len(points) - 1
                    boundary_edges.add((min(a, m), max(a, m)))
                    boundary_edges.add((min(b, m), max(b, m)))
                else:
                    trace.append(np.zeros(n))
                midpoint[key] = len(points) - 1
            return midpoint[key]

        refined = []
        for a, b, c in triangles:
            ab, bc, ca = split(a, b), split(b, c), split(c, a)
            refined += [(a, ab, ca), (ab, b, bc), (ca, bc, c), (ab, bc, ca)]
        triangles = refined

    m = len(points)
    boundary = np.zeros(m, dtype=bool)
    for a, b in boundary_edges:
        boundary[a] = boundary[b] = True
    return SubTriangulation(
        points=np.array(points, dtype=float),
        triangles=np.array(triangles, dtype=np.int64),
        boundary=boundary,
        trace=np.array(trace).T.copy(),
    )


def p1_stiffness(triangle):
    """Exact stiffness of the linear element on one triangle."""
    tri = np.asarray(triangle, dtype=float)
    if tri.shape != (3, 2):
        raise ValueError(f"expected 3 vertices, got shape {tri.shape}")
    x, y = tri[:, 0], tri[:, 1]
    # hat gradients are constant: grad lambda_i = (b_i, c_i) / (2A)
    b = np.array([y[1] - y[2], y[2] - y[0], y[0] - y[1]])
    c = np.array([x[2] - x[1], x[0] - x[2], x[1] - x[0]])
    area2 = x[0] * b[0] + x[1] * b[1] + x[2] * b[2]
    if area2 <= 1e-14 * polygon_diameter(tri) ** 2:
        raise DegenerateTriangle(f"signed doubled area {area2:.3e}")
    return (np.outer(b, b) + np.outer(c, c)) / (2.0 * area2)


def _submesh_stiffness(sub):
    rows, cols, vals = [], [], []
    for t in sub.triangles:
        k = p1_stiffness(sub.points[t])
        rows.append(np.repeat(t, 3))
        cols.append(np.tile(t, 3))
        vals.append(k.ravel())
    return SparseSymMatrix.from_triplets(
        len(sub.points), np.concatenate(rows), np.concatenate(cols),
        np.concatenate(vals))


def harmonic_stiffness(poly, levels=3):
    """Energy inner products of the P1 liftings of the boundary hats."""
    sub = subtriangulate(poly, levels)
    A = _submesh_stiffness(sub)
    n = sub.trace.shape[0]
    interior = np.flatnonzero(~sub.boundary)
    liftings = np.array(sub.trace, dtype=float, copy=True)
    if interior.size:
        reduced = A.restrict(interior)
        for i in range(n):
            rhs = -(A @ liftings[i])[interior]
            result = cg_solve(reduced, rhs, tol=1e-13)
            if not result.converged:
                raise NoConvergence(
                    f"lifting of hat {i} stalled at relative residual "
                    f"{result.residual:.3e}")
            liftings[i, interior] = result.x
    products = np.array([A @ liftings[i] for i in range(n)])
    matrix = liftings @ products.T
    return OracleStiffness(matrix=(matrix + matrix.T) / 2.0, levels=levels)


def stability_report(poly, K_vem, levels=3):
    """Eigenvalue bounds of the element stiffness against the reference."""
    oracle = harmonic_stiffness(poly, levels)
    kernel = np.ones(oracle.matrix.shape[0])
    lo, hi = generalized_eig_bounds(K_vem, oracle.matrix, kernel)
    return StabilityConstants(alpha_star_lower=lo, alpha_star_upper=hi)


def p1_global_solve(mesh, problem, options=None):
    """Classical P1 solve on an all-triangle mesh.

    Uses the same right-hand side rule (cell average of the load
    spread evenly over the vertices) and the same boundary treatment
    as the polygonal driver, so a comparison against it exercises only
    the element matrices.
    """
    options = options or SolveOptions()
    rows, cols, vals = [], [], []
    rhs = np.zeros(mesh.n_vertices)
    for ci in range(mesh.n_cells):
        loop = mesh.cells[ci]
        if len(loop) != 3:
            raise ValueError(
                f"cell {ci} has {len(loop)} vertices; p1_global_solve "
                "needs an all-triangle mesh")
        verts = mesh.cell_vertices(ci)
        k = p1_stiffness(verts)
        geom = cell_geometry(verts)
        quad = fan_quadrature(verts, order=options.quad_order)
        rhs[loop] += local_load(geom, quad, problem.f)
        rows.append(np.repeat(loop, 3))
        cols.append(np.tile(loop, 3))
        vals.append(k.ravel())
    A = SparseSymMatrix.from_triplets(
        mesh.n_vertices, np.concatenate(rows), np.concatenate(cols),
        np.concatenate(vals))
    dofs = np.zeros(mesh.n_vertices)
    try:
        system = apply_dirichlet(A, rhs, mesh, problem.g)
    except EmptyInterior:
        bnd = boundary_vertices(mesh)
        dofs[bnd] = problem.g(mesh.vertices[bnd, 0], mesh.vertices[bnd, 1])
        return dofs
    result = cg_solve(system.matrix, system.rhs, tol=options.tol,
                      max_iter=options.max_iter)
    if not result.converged:
        raise NoConvergence(
            f"CG stalled at relative residual {result.residual:.3e} "
            f"after {result.iterations} iterations")
    dofs[:] = system.lift
    dofs[system.interior] = result.x
    return dofs
