"""Per-cell virtual element construction for the Poisson problem.

Degree one, one degree of freedom per vertex. Everything a cell
contributes is built from four small matrices:

  D (N x 3)  vertex values of the scaled monomials 1, (x-x_P)/h_P, (y-y_P)/h_P
  B (3 x N)  right-hand sides of the energy projection, boundary integrals
             that vertex values determine exactly
  G = B D    (3 x 3) Gram matrix of the projection
  Pi_star (3 x N) = G^{-1} B, the energy projector onto linear polynomials

The local stiffness is the projected (consistency) energy plus a
stabilization acting only on the part the projector removes:

  K = Pi_star^T G_tilde Pi_star + nu * (I - Pi)^T (I - Pi),  Pi = D Pi_star

with G_tilde equal to G with its first row zeroed. No shape function is
ever evaluated in the cell interior; the harmonic extension exists only
implicitly.
"""

from dataclasses import dataclass

import numpy as np

from .errors import SingularG

NU_POLICIES = ("unit", "trace")


@dataclass
class ScaledMonomialBasis:
    """Monomials 1, (x-x_P)/h_P, (y-y_P)/h_P for one cell."""

    centroid: np.ndarray
    diameter: float

    def evaluate(self, points):
        """Values of the three monomials at (M, 2) points, as (M, 3)."""
        p = np.atleast_2d(np.asarray(points, dtype=float))
        out = np.empty((len(p), 3))
        out[:, 0] = 1.0
        out[:, 1] = (p[:, 0] - self.centroid[0]) / self.diameter
        out[:, 2] = (p[:, 1] - self.centroid[1]) / self.diameter
        return out

    def gradients(self):
        """Constant gradients of the monomials, rows of a (3, 2) array."""
        h = self.diameter
        return np.array([[0.0, 0.0], [1.0 / h, 0.0], [0.0, 1.0 / h]])


def matrix_D(geom, vertices):
    """Vertex values of the scaled monomial basis, one row per vertex."""
    basis = ScaledMonomialBasis(geom.centroid, geom.diameter)
    return basis.evaluate(np.asarray(vertices, dtype=float))


def matrix_B(geom):
    """Projection right-hand sides from vertex dofs.

    Row 1 holds the vertex-average weights 1/N (the rank-3 completion of
    the gradient projection). Rows 2 and 3 are exact boundary integrals
    of the normal derivative of the monomials against each vertex's hat
    trace: column j couples the two edges meeting at vertex j,

      B[1+c][j] = (|E_{j-1}| n_c^{(j-1)} + |E_j| n_c^{(j)}) / (2 h_P).
    """
    N = geom.n_vertices
    lengths = geom.edge_lengths
    normals = geom.edge_normals
    B = np.empty((3, N))
    B[0] = 1.0 / N
    weighted = lengths[:, None] * normals  # (N, 2), edge j from V_j to V_{j+1}
    prev = np.roll(weighted, 1, axis=0)
    B[1] = (prev[:, 0] + weighted[:, 0]) / (2.0 * geom.diameter)
    B[2] = (prev[:, 1] + weighted[:, 1]) / (2.0 * geom.diameter)
    return B


def _det3(G):
    return (G[0, 0] * (G[1, 1] * G[2, 2] - G[1, 2] * G[2, 1])
            - G[0, 1] * (G[1, 0] * G[2, 2] - G[1, 2] * G[2, 0])
            + G[0, 2] * (G[1, 0] * G[2, 1] - G[1, 1] * G[2, 0]))


def _solve3(G, rhs):
    """Solve the 3x3 system G X = rhs by Gaussian elimination with
    partial pivoting. rhs has shape (3, m)."""
    a = np.column_stack([np.array(G, dtype=float), np.array(rhs, dtype=float)])
    for col in range(3):
        pivot = col + int(np.argmax(np.abs(a[col:, col])))
        if a[pivot, col] == 0.0:
            raise SingularG("zero pivot in 3x3 projection solve")
        if pivot != col:
            a[[col, pivot]] = a[[pivot, col]]
        for row in range(col + 1, 3):
            factor = a[row, col] / a[col, col]
            if factor != 0.0:
                a[row, col:] -= factor * a[col, col:]
    x = np.empty((3, a.shape[1] - 3))
    for row in (2, 1, 0):
        x[row] = (a[row, 3:] - a[row, row + 1:3] @ x[row + 1:]) / a[row, row]
    return x


def projector_pistar(D, B):
    """Energy projector onto the monomial space: (G, G_tilde, Pi_star).

    G = B D must be invertible; Pi_star = G^{-1} B reproduces linear
    polynomials exactly (Pi_star D = identity).
    """
    G = B @ D
    norm = float(np.linalg.norm(G))
    if abs(_det3(G)) < 1e-12 * norm ** 3:
        raise SingularG(
            f"projection Gram matrix is singular (det {_det3(G):.3e})")
    G_tilde = G.copy()
    G_tilde[0, :] = 0.0
    Pi_star = _solve3(G, B)
    return G, G_tilde, Pi_star


def average_gradient(geom, dof_values):
    """Cell average of the gradient from vertex values alone.

    (1/|P|) sum_i ((v_i + v_{i+1})/2) |E_i| n_i -- the divergence theorem
    applied to the (never evaluated) interior extension, exact because
    traces are linear on edges. Equals the gradient of the energy
    projection in physical coordinates.
    """
    v = np.asarray(dof_values, dtype=float)
    vbar = 0.5 * (v + np.roll(v, -1))
    weighted = geom.edge_lengths[:, None] * geom.edge_normals
    return (vbar[:, None] * weighted).sum(axis=0) / geom.area


def _stiffness_parts(D, B, nu_policy):
    G, G_tilde, Pi_star = projector_pistar(D, B)
    Pi = D @ Pi_star
    Kc = Pi_star.T @ G_tilde @ Pi_star
    R = np.eye(len(D)) - Pi
    S = R.T @ R
    if nu_policy == "unit":
        nu = 1.0
    elif nu_policy == "trace":
        nu = 0.5 * float(np.trace(Kc))
    else:
        raise ValueError(
            f"unknown nu policy {nu_policy!r}; valid: {', '.join(NU_POLICIES)}")
    K = Kc + nu * S
    return G, G_tilde, Pi_star, Pi, K, nu


def local_stiffness(D, B, nu_policy="unit"):
    """Stabilized local stiffness matrix and the coefficient used."""
    _, _, _, _, K, nu = _stiffness_parts(D, B, nu_policy)
    return K, nu


def consistency_check(K, D, B):
    """Max residual of the exactness property on linear polynomials.

    For a linear q, the true energy pairing against each hat function is
    a pure boundary term, which is exactly rows 2-3 of B (and zero for
    the constant). So K applied to each monomial dof column must return
    those rows; the largest deviation is returned.
    """
    expected = np.vstack([np.zeros(B.shape[1]), B[1], B[2]]).T  # (N, 3)
    return float(np.abs(K @ D - expected).max())


def local_load(geom, quad, f):
    """Low-order load vector: each vertex gets an equal share of the
    cell integral of f."""
    integral = quad.integrate(f)
    N = geom.n_vertices
    return np.full(N, integral / N)


@dataclass
class LocalElementMatrices:
    """Every matrix the construction produces for one cell."""

    D: np.ndarray
    B: np.ndarray
    G: np.ndarray
    G_tilde: np.ndarray
    Pi_star: np.ndarray
    Pi: np.ndarray
    K: np.ndarray
    nu: float


@dataclass
class StabilityConstants:
    """Measured spectral bounds of the element energy against a
    reference energy on the same cell."""

    alpha_star_lower: float
    alpha_star_upper: float


def build_element(geom, nu_policy="unit"):
    """Run the whole local construction for one cell."""
    D = matrix_D(geom, geom.vertices)
    B = matrix_B(geom)
    G, G_tilde, Pi_star, Pi, K, nu = _stiffness_parts(D, B, nu_policy)
    return LocalElementMatrices(
        D=D, B=B, G=G, G_tilde=G_tilde, Pi_star=Pi_star, Pi=Pi, K=K, nu=nu)
