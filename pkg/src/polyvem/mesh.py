"""Polygonal meshes of the unit square: data model, generators, JSON I/O.

A mesh is a flat vertex array plus one CCW vertex-index loop per cell.
Hanging nodes are ordinary polygon vertices (a square with a midpoint on
one side is stored as a pentagon), so no constraint bookkeeping exists
anywhere downstream.

All generators are deterministic: integer lattice constructions where
possible, and a tiny documented xorshift generator where randomness is
requested, so equal specs give byte-identical JSON files.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    IndexOutOfRange,
    NonPositiveArea,
    ParseError,
    UnsupportedResolution,
    ValidationError,
    ZeroLengthEdge,
)
from .geometry import edge_data, polygon_area, polygon_centroid

FAMILIES = ("quad", "perturbed_quad", "triangle", "hexagon", "hanging_node")

_MASK64 = (1 << 64) - 1


class XorShift64Star:
    """xorshift64* pseudo-random generator.

    State update on 64-bit unsigned integers:
        s ^= s >> 12;  s ^= s << 25;  s ^= s >> 27
    output = (s * 0x2545F4914F6CDD1D) mod 2^64, and uniform doubles take
    the top 53 bits: (output >> 11) * 2^-53. A zero seed is replaced by
    0x9E3779B97F4A7C15 so the state never sticks at zero.

    This generator is part of the mesh file contract: perturbed meshes
    are reproducible across implementations from the seed alone.
    """

    def __init__(self, seed):
        s = int(seed) & _MASK64
        if s == 0:
            s = 0x9E3779B97F4A7C15
        self.state = s

    def next_u64(self):
        s = self.state
        s ^= s >> 12
        s = (s ^ (s << 25)) & _MASK64
        s ^= s >> 27
        self.state = s
        return (s * 0x2545F4914F6CDD1D) & _MASK64

    def uniform(self):
        """Uniform double in [0, 1)."""
        return (self.next_u64() >> 11) * 2.0 ** -53


@dataclass(frozen=True)
class MeshFamilySpec:
    """Recipe for one generated mesh of the unit square."""

    family: str
    n: int
    perturbation: float = 0.25
    seed: int = 0


class PolygonalMesh:
    """Immutable polygonal mesh with derived edge topology.

    vertices: (V, 2) float array. cells: list of integer index arrays,
    each a CCW loop. Edges are undirected (vmin, vmax) pairs; the incident
    cell lists follow the order cells were given in.
    """

    def __init__(self, vertices, cells):
        self.vertices = np.asarray(vertices, dtype=float).reshape(-1, 2)
        self.cells = [np.asarray(c, dtype=np.int64).ravel() for c in cells]
        V = len(self.vertices)
        for ci, loop in enumerate(self.cells):
            if len(loop) and (loop.min() < 0 or loop.max() >= V):
                raise IndexOutOfRange(
                    f"cell {ci} references a vertex outside [0, {V})")
        self._build_topology()

    def _build_topology(self):
        # undirected edge -> [(cell, tail, head), ...] in cell order
        incident = {}
        for ci, loop in enumerate(self.cells):
            for k in range(len(loop)):
                a = int(loop[k])
                b = int(loop[(k + 1) % len(loop)])
                if a == b:
                    continue  # degenerate; validate() reports it
                key = (a, b) if a < b else (b, a)
                incident.setdefault(key, []).append((ci, a, b))
        keys = sorted(incident)
        self.edges = np.array(keys, dtype=np.int64).reshape(-1, 2)
        self.edge_cells = [[rec[0] for rec in incident[k]] for k in keys]
        self._edge_traversals = [incident[k] for k in keys]
        self.boundary_edge_ids = np.array(
            [i for i, cs in enumerate(self.edge_cells) if len(cs) == 1],
            dtype=np.int64)
        flags = np.zeros(len(self.vertices), dtype=bool)
        if len(self.boundary_edge_ids):
            flags[self.edges[self.boundary_edge_ids].ravel()] = True
        self.boundary_vertex_flags = flags

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_cells(self):
        return len(self.cells)

    @property
    def n_edges(self):
        return len(self.edges)

    def cell_vertices(self, ci):
        """Coordinates of cell ci as an (N, 2) array."""
        if not 0 <= ci < len(self.cells):
            raise IndexOutOfRange(f"cell index {ci} outside [0, {len(self.cells)})")
        return self.vertices[self.cells[ci]]

    def max_diameter(self):
        h = 0.0
        for loop in self.cells:
            v = self.vertices[loop]
            diff = v[:, None, :] - v[None, :, :]
            h = max(h, float(np.sqrt((diff ** 2).sum(axis=2)).max()))
        return h

    def __eq__(self, other):
        if not isinstance(other, PolygonalMesh):
            return NotImplemented
        return (self.vertices.shape == other.vertices.shape
                and np.array_equal(self.vertices, other.vertices)
                and len(self.cells) == len(other.cells)
                and all(np.array_equal(a, b)
                        for a, b in zip(self.cells, other.cells)))


def boundary_vertices(mesh):
    """Sorted indices of vertices touching at least one boundary edge."""
    return np.nonzero(mesh.boundary_vertex_flags)[0]


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations


def validate(mesh):
    """Check every structural invariant and report all violations found."""
    report = ValidationReport()
    say = report.violations.append

    for ci, loop in enumerate(mesh.cells):
        if len(np.unique(loop)) < 3:
            say(f"cell {ci}: fewer than 3 distinct vertices")
            continue
        if np.any(loop == np.roll(loop, -1)):
            say(f"cell {ci}: repeated consecutive vertex index")
            continue
        v = mesh.vertices[loop]
        try:
            polygon_area(v)
        except NonPositiveArea:
            say(f"cell {ci}: non-positive area (clockwise or degenerate)")
            continue
        try:
            edge_data(v)
        except ZeroLengthEdge:
            say(f"cell {ci}: zero-length edge")
            continue
        c = polygon_centroid(v)
        vn = np.roll(v, -1, axis=0)
        tri = 0.5 * ((v[:, 0] - c[0]) * (vn[:, 1] - c[1])
                     - (vn[:, 0] - c[0]) * (v[:, 1] - c[1]))
        diam2 = float(((v[:, None, :] - v[None, :, :]) ** 2).sum(axis=2).max())
        if np.any(tri <= 1e-14 * diam2):
            say(f"cell {ci}: not star-shaped with respect to its centroid")

    for ei, recs in enumerate(mesh._edge_traversals):
        a, b = mesh.edges[ei]
        if len(recs) > 2:
            say(f"edge ({a},{b}): incident to {len(recs)} cells (non-manifold)")
        elif len(recs) == 2 and recs[0][1:] == recs[1][1:]:
            say(f"edge ({a},{b}): traversed in the same direction twice")

    in_cell = np.zeros(mesh.n_vertices, dtype=bool)
    for loop in mesh.cells:
        in_cell[loop] = True
    for vi in np.nonzero(~in_cell)[0]:
        say(f"vertex {vi}: not referenced by any cell")

    if mesh.n_vertices:
        lo = mesh.vertices.min(axis=0)
        hi = mesh.vertices.max(axis=0)
        tol = 1e-12 * float(np.linalg.norm(hi - lo))
        if tol > 0:
            bins = {}
            for vi, (x, y) in enumerate(mesh.vertices):
                keyx, keyy = int(np.floor(x / tol)), int(np.floor(y / tol))
                for dx in (-1, 0, 1):
                    for dy in (-1, 0, 1):
                        for vj in bins.get((keyx + dx, keyy + dy), ()):
                            d = np.hypot(x - mesh.vertices[vj, 0],
                                         y - mesh.vertices[vj, 1])
                            if d <= tol:
                                say(f"vertices {vj} and {vi}: closer than "
                                    "1e-12 of the domain diameter")
                bins.setdefault((keyx, keyy), []).append(vi)

    return report


# ---------------------------------------------------------------------------
# generators


def _generate_quad(n):
    xs = np.arange(n + 1) / n
    X, Y = np.meshgrid(xs, xs, indexing="xy")
    vertices = np.column_stack([X.ravel(), Y.ravel()])

    def vid(i, j):
        return j * (n + 1) + i

    cells = []
    for j in range(n):
        for i in range(n):
            cells.append([vid(i, j), vid(i + 1, j),
                          vid(i + 1, j + 1), vid(i, j + 1)])
    return vertices, cells


def _generate_perturbed_quad(n, perturbation, seed):
    vertices, cells = _generate_quad(n)
    rng = XorShift64Star(seed)
    amp = perturbation / n
    # two draws per interior vertex, x then y, in vertex-index order;
    # boundary vertices take no draws so the domain stays exactly [0,1]^2
    for vi in range(len(vertices)):
        i, j = vi % (n + 1), vi // (n + 1)
        if 0 < i < n and 0 < j < n:
            vertices[vi, 0] += (2.0 * rng.uniform() - 1.0) * amp
            vertices[vi, 1] += (2.0 * rng.uniform() - 1.0) * amp
    return vertices, cells


def _generate_triangle(n):
    vertices, _ = _generate_quad(n)

    def vid(i, j):
        return j * (n + 1) + i

    cells = []
    for j in range(n):
        for i in range(n):
            # split along the bottom-left to top-right diagonal
            cells.append([vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)])
            cells.append([vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)])
    return vertices, cells


# pointy-top hexagon on the integer lattice, CCW from the lower-right
_HEX_OFFSETS = ((1, -1), (1, 1), (0, 2), (-1, 1), (-1, -1), (0, -2))


def _clip_axis(poly, axis, bound, keep_le):
    """Sutherland-Hodgman clip of an integer polygon by one axis line.

    Polygon edges here have slope 0 in the clip axis never (hex edges are
    vertical or slope +-1, and earlier clips only add edges on the clip
    lines), so every intersection has integer coordinates and the whole
    construction stays exact.
    """
    def inside(p):
        return p[axis] <= bound if keep_le else p[axis] >= bound

    def crossing(a, b):
        o = 1 - axis
        t_num = bound - a[axis]
        t_den = b[axis] - a[axis]
        other = a[o] + (b[o] - a[o]) * t_num // t_den
        return (bound, other) if axis == 0 else (other, bound)

    out = []
    m = len(poly)
    for k in range(m):
        a, b = poly[k], poly[(k + 1) % m]
        if inside(a):
            out.append(a)
            if not inside(b):
                out.append(crossing(a, b))
        elif inside(b):
            out.append(crossing(a, b))
    return out


def _dedupe_loop(poly):
    out = []
    for p in poly:
        if not out or p != out[-1]:
            out.append(p)
    if len(out) > 1 and out[0] == out[-1]:
        out.pop()
    return out


def _int_shoelace2(poly):
    s = 0
    m = len(poly)
    for k in range(m):
        x0, y0 = poly[k]
        x1, y1 = poly[(k + 1) % m]
        s += x0 * y1 - x1 * y0
    return s


def _generate_hexagon(n):
    """Hexagon-dominant tiling with exact integer cut cells.

    The honeycomb lives on an integer lattice where each hexagon spans 2
    units across and 4 tall; the window [0, 2n]^2 is clipped out and then
    scaled by 1/(2n). All clip intersections are integers, so cut cells
    on the boundary are exact and shared vertices match bit for bit.
    """
    if n < 2:
        raise UnsupportedResolution("hexagon family requires n >= 2")
    L = 2 * n
    cells_keys = []
    r = 0
    while 3 * r - 2 < L:
        par = r % 2
        c = 0
        while 2 * c + par - 1 < L:
            cx, cy = 2 * c + par, 3 * r
            poly = [(cx + dx, cy + dy) for dx, dy in _HEX_OFFSETS]
            for axis, bound, keep_le in ((0, 0, False), (0, L, True),
                                         (1, 0, False), (1, L, True)):
                poly = _clip_axis(poly, axis, bound, keep_le)
                if not poly:
                    break
            poly = _dedupe_loop(poly)
            if len(poly) >= 3 and _int_shoelace2(poly) > 0:
                cells_keys.append(poly)
            c += 1
        r += 1

    index = {}
    cells = []
    for poly in cells_keys:
        loop = []
        for key in poly:
            if key not in index:
                index[key] = len(index)
            loop.append(index[key])
        cells.append(loop)
    scale = 1.0 / L
    vertices = np.array([[kx * scale, ky * scale] for kx, ky in index])
    return vertices, cells


def _generate_hanging_node(n):
    """Square mesh with the quadrant [0, 0.5]^2 refined once.

    Built on a half-step integer lattice (spacing 1/(2n)) so hanging
    vertices on the quadrant interface are exact midpoints. Parent cells
    bordering the refined quadrant keep the midpoint as an ordinary,
    collinear polygon vertex.
    """
    if n < 2 or n % 2:
        raise UnsupportedResolution("hanging_node family requires even n >= 2")
    half = n // 2
    index = {}
    cells = []

    def vid(kx, ky):
        if (kx, ky) not in index:
            index[(kx, ky)] = len(index)
        return index[(kx, ky)]

    def add(loop_keys):
        cells.append([vid(*k) for k in loop_keys])

    for j in range(n):
        for i in range(n):
            x0, y0 = 2 * i, 2 * j
            if i < half and j < half:
                for dj in (0, 1):
                    for di in (0, 1):
                        a, b = x0 + di, y0 + dj
                        add([(a, b), (a + 1, b), (a + 1, b + 1), (a, b + 1)])
            elif i == half and j < half:
                # right neighbor of the quadrant: midpoint on the left edge
                add([(x0, y0), (x0 + 2, y0), (x0 + 2, y0 + 2),
                     (x0, y0 + 2), (x0, y0 + 1)])
            elif j == half and i < half:
                # top neighbor: midpoint on the bottom edge
                add([(x0, y0), (x0 + 1, y0), (x0 + 2, y0),
                     (x0 + 2, y0 + 2), (x0, y0 + 2)])
            else:
                add([(x0, y0), (x0 + 2, y0), (x0 + 2, y0 + 2), (x0, y0 + 2)])

    scale = 1.0 / (2 * n)
    vertices = np.array([[kx * scale, ky * scale] for kx, ky in index])
    return vertices, cells


def generate(spec):
    """Build the mesh described by a MeshFamilySpec."""
    if spec.family not in FAMILIES:
        raise ValueError(
            f"unknown family {spec.family!r}; valid: {', '.join(FAMILIES)}")
    n = int(spec.n)
    if n < 1:
        raise UnsupportedResolution("resolution must be a positive integer")
    if spec.family == "quad":
        vertices, cells = _generate_quad(n)
    elif spec.family == "perturbed_quad":
        if not 0.0 <= spec.perturbation < 0.5:
            raise ValueError("perturbation must lie in [0, 0.5)")
        vertices, cells = _generate_perturbed_quad(
            n, float(spec.perturbation), spec.seed)
    elif spec.family == "triangle":
        vertices, cells = _generate_triangle(n)
    elif spec.family == "hexagon":
        vertices, cells = _generate_hexagon(n)
    else:
        vertices, cells = _generate_hanging_node(n)
    return PolygonalMesh(vertices, cells)


# ---------------------------------------------------------------------------
# JSON interchange


def to_json_text(mesh):
    """Serialize a mesh with 17-significant-digit coordinates.

    The text is fully determined by the mesh, so equal meshes produce
    byte-identical files.
    """
    lines = ["{", '"vertices": [']
    for k, (x, y) in enumerate(mesh.vertices):
        comma = "," if k + 1 < mesh.n_vertices else ""
        lines.append(f"[{x:.17g}, {y:.17g}]{comma}")
    lines.append("],")
    lines.append('"cells": [')
    for k, loop in enumerate(mesh.cells):
        comma = "," if k + 1 < mesh.n_cells else ""
        lines.append("[" + ", ".join(str(int(v)) for v in loop) + f"]{comma}")
    lines.append("]")
    lines.append("}")
    return "\n".join(lines) + "\n"


def write_json(mesh, path):
    """Write a mesh as JSON; see to_json_text."""
    with open(path, "w", newline="\n") as fh:
        fh.write(to_json_text(mesh))


def _expect(cond, what):
    if not cond:
        raise ParseError(what)


def read_json(path):
    """Read and validate a mesh file; see write_json for the format."""
    with open(path) as fh:
        text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"line {e.lineno}, column {e.colno}: {e.msg}") from None

    _expect(isinstance(doc, dict), "top level must be a JSON object")
    _expect("vertices" in doc, 'missing "vertices" key')
    _expect("cells" in doc, 'missing "cells" key')
    verts = doc["vertices"]
    cells = doc["cells"]
    _expect(isinstance(verts, list), '"vertices" must be an array')
    _expect(isinstance(cells, list), '"cells" must be an array')
    for k, p in enumerate(verts):
        _expect(isinstance(p, list) and len(p) == 2
                and all(isinstance(c, (int, float)) and not isinstance(c, bool)
                        for c in p),
                f"vertices[{k}] must be a pair of numbers")
    for k, loop in enumerate(cells):
        _expect(isinstance(loop, list) and all(
            isinstance(i, int) and not isinstance(i, bool) for i in loop),
            f"cells[{k}] must be an array of integer indices")

    try:
        mesh = PolygonalMesh(np.array(verts, dtype=float).reshape(-1, 2), cells)
    except IndexOutOfRange as e:
        raise ValidationError(str(e)) from None
    report = validate(mesh)
    if not report.ok:
        raise ValidationError("; ".join(report.violations))
    return mesh
