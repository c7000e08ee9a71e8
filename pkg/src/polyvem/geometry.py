"""Polygon geometry and quadrature.

A polygon is an (N, 2) float array of vertices in counterclockwise order,
N >= 3, no repeated points. All tolerances are relative to the polygon
scale so behaviour does not depend on physical units.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InvertedSubTriangle, NonPositiveArea, ZeroLengthEdge

# Symmetric Gauss rules on the reference triangle, barycentric coordinates.
# Each row of the point table is (l1, l2, l3); weights sum to one and are
# scaled by the physical triangle area on use.
_TRI_POINTS_DEG2 = np.array([
    [2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0],
    [1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0],
    [1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0],
])
_TRI_WEIGHTS_DEG2 = np.array([1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0])

_A4 = 0.816847572980459
_B4 = 0.091576213509771
_C4 = 0.108103018168070
_D4 = 0.445948490915965
_TRI_POINTS_DEG4 = np.array([
    [_A4, _B4, _B4],
    [_B4, _A4, _B4],
    [_B4, _B4, _A4],
    [_C4, _D4, _D4],
    [_D4, _C4, _D4],
    [_D4, _D4, _C4],
])
_TRI_WEIGHTS_DEG4 = np.array([
    0.109951743655322, 0.109951743655322, 0.109951743655322,
    0.223381589678011, 0.223381589678011, 0.223381589678011,
])

_TRI_RULES = {
    2: (_TRI_POINTS_DEG2, _TRI_WEIGHTS_DEG2),
    4: (_TRI_POINTS_DEG4, _TRI_WEIGHTS_DEG4),
}


def _as_polygon(vertices):
    v = np.asarray(vertices, dtype=float)
    if v.ndim != 2 or v.shape[1] != 2 or v.shape[0] < 3:
        raise ValueError("polygon must be an (N, 2) array with N >= 3")
    return v


def polygon_diameter(vertices):
    """Largest distance between any two vertices."""
    v = _as_polygon(vertices)
    diff = v[:, None, :] - v[None, :, :]
    return float(np.sqrt((diff ** 2).sum(axis=2)).max())


def polygon_area(vertices):
    """Signed shoelace area; raises NonPositiveArea unless positive.

    Positive area is the orientation contract: clockwise input is an error
    here, not something we silently fix.
    """
    v = _as_polygon(vertices)
    x, y = v[:, 0], v[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    area = 0.5 * float(np.sum(x * yn - xn * y))
    scale = polygon_diameter(v)
    if area <= 1e-14 * scale * scale:
        raise NonPositiveArea(
            f"signed area {area:.3e} is not positive; vertices must be "
            "counterclockwise and non-degenerate")
    return area


def polygon_centroid(vertices):
    """Area centroid (not the vertex average)."""
    v = _as_polygon(vertices)
    area = polygon_area(v)
    vn = np.roll(v, -1, axis=0)
    cross = v[:, 0] * vn[:, 1] - vn[:, 0] * v[:, 1]
    c = (v + vn) * cross[:, None]
    return c.sum(axis=0) / (6.0 * area)


def edge_data(vertices):
    """Edge lengths and outward unit normals.

    Edge i runs from vertex i to vertex i+1 (cyclic). For a counterclockwise
    polygon the outward normal of direction (dx, dy) is (dy, -dx)/length.
    Returns (lengths (N,), normals (N, 2)).
    """
    v = _as_polygon(vertices)
    d = np.roll(v, -1, axis=0) - v
    lengths = np.sqrt((d ** 2).sum(axis=1))
    scale = polygon_diameter(v)
    short = np.nonzero(lengths <= 1e-14 * scale)[0]
    if short.size:
        raise ZeroLengthEdge(f"edge {int(short[0])} has zero length")
    normals = np.column_stack([d[:, 1], -d[:, 0]]) / lengths[:, None]
    return lengths, normals


@dataclass
class CellGeometry:
    """All per-cell geometric quantities the element construction needs."""

    vertices: np.ndarray
    area: float
    centroid: np.ndarray
    diameter: float
    edge_lengths: np.ndarray
    edge_normals: np.ndarray

    @property
    def n_vertices(self):
        return len(self.vertices)


def cell_geometry(vertices):
    """Bundle area, centroid, diameter and edge data for one polygon."""
    v = _as_polygon(vertices)
    lengths, normals = edge_data(v)
    return CellGeometry(
        vertices=v,
        area=polygon_area(v),
        centroid=polygon_centroid(v),
        diameter=polygon_diameter(v),
        edge_lengths=lengths,
        edge_normals=normals,
    )


@dataclass
class QuadratureRule:
    """Points (M, 2) and weights (M,); weights sum to the polygon area."""

    points: np.ndarray
    weights: np.ndarray

    def integrate(self, f):
        """Integrate a vectorized callable f(x, y) over the polygon."""
        vals = np.asarray(f(self.points[:, 0], self.points[:, 1]), dtype=float)
        return float(np.dot(self.weights, vals))


def fan_quadrature(vertices, order=2):
    """Quadrature on a polygon by fanning triangles from the centroid.

    Each triangle (centroid, v_i, v_{i+1}) carries a symmetric Gauss rule
    exact to the requested polynomial degree (2 or 4). The polygon must be
    star-shaped with respect to its centroid; an inverted fan triangle is
    reported rather than silently producing negative weights.
    """
    if order not in _TRI_RULES:
        raise ValueError(f"unsupported quadrature order {order}; use 2 or 4")
    v = _as_polygon(vertices)
    c = polygon_centroid(v)
    diam2 = polygon_diameter(v) ** 2
    bary, w = _TRI_RULES[order]
    vn = np.roll(v, -1, axis=0)
    # signed areas of the fan triangles (c, v_i, v_{i+1})
    tri_areas = 0.5 * ((v[:, 0] - c[0]) * (vn[:, 1] - c[1])
                       - (vn[:, 0] - c[0]) * (v[:, 1] - c[1]))
    bad = np.nonzero(tri_areas <= 1e-14 * diam2)[0]
    if bad.size:
        raise InvertedSubTriangle(
            f"fan triangle at edge {int(bad[0])} is inverted; polygon is "
            "not star-shaped with respect to its centroid")
    # map the barycentric rule onto every fan triangle at once
    corners = np.stack([np.broadcast_to(c, v.shape), v, vn], axis=1)  # (N,3,2)
    pts = np.einsum("qk,nkd->nqd", bary, corners).reshape(-1, 2)
    wts = (tri_areas[:, None] * w[None, :]).reshape(-1)
    return QuadratureRule(points=pts, weights=wts)
