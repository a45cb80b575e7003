"""
Structured crossed-diagonal triangulations and regularity checks.

Cell (i, j) of the epsilon grid is split along the diagonal (i, j) -> (i+1, j+1)
when i + j is even and along (i, j+1) -> (i+1, j) otherwise. Local edge k of a
triangle (v0, v1, v2) joins v_k and v_{k+1}.
"""

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, Optional, Tuple

import numpy as np
from matplotlib import tri as mtri

from infrastructure.utilities.logger import get_logger
from infrastructure.utilities.structured_logger import get_structured_logger

from .domain import BoundaryLabel, DomainError, DomainSpec, NonConformingDomain, Region

logger = get_logger(__name__)
structured_logger = get_structured_logger("mesh")

# Right isoceles cells with legs epsilon
C1 = 1.0 / (1.0 + math.sqrt(2.0))
C2 = math.sqrt(2.0)
THETA1 = math.pi / 4
THETA2 = math.pi / 2

GRID_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class RegularTriangulation:
    """Background mesh R_eps with region and boundary labels."""
    eps: float
    vertices: np.ndarray        # (nv, 2)
    triangles: np.ndarray       # (nt, 3) counterclockwise
    edges: np.ndarray           # (ne, 2) stored as [x, y] with x < y
    edge_triangles: np.ndarray  # (ne, 2) incident triangles, -1 when absent
    edge_local: np.ndarray      # (ne, 2) local edge index inside each incident triangle
    tri_edges: np.ndarray       # (nt, 3) edge of local edge k
    edge_labels: np.ndarray     # (ne,) BoundaryLabel values
    regions: np.ndarray         # (nt,) Region values
    domain: Optional[DomainSpec] = None
    c1: float = C1
    c2: float = C2
    theta1: float = THETA1
    theta2: float = THETA2

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @cached_property
    def areas(self) -> np.ndarray:
        p = self.vertices[self.triangles]
        d1 = p[:, 1] - p[:, 0]
        d2 = p[:, 2] - p[:, 0]
        return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])

    @property
    def total_area(self) -> float:
        return float(self.areas.sum())

    @cached_property
    def edge_lengths(self) -> np.ndarray:
        d = self.vertices[self.edges[:, 1]] - self.vertices[self.edges[:, 0]]
        return np.hypot(d[:, 0], d[:, 1])

    @property
    def boundary_edge_mask(self) -> np.ndarray:
        return self.edge_triangles[:, 1] < 0

    @cached_property
    def brittle_edge_mask(self) -> np.ndarray:
        """Edges with at least one incident brittle triangle, i.e. inside closure(Omega_B)."""
        brittle = self.regions == Region.BRITTLE
        mask = brittle[self.edge_triangles[:, 0]]
        second = self.edge_triangles[:, 1]
        has_second = second >= 0
        mask[has_second] |= brittle[second[has_second]]
        return mask

    @cached_property
    def crackable_edge_mask(self) -> np.ndarray:
        """Base edges whose halves may crack: in closure(Omega_B) and not on the Neumann boundary."""
        allowed = (self.edge_labels == BoundaryLabel.INTERIOR) | (self.edge_labels == BoundaryLabel.DIRICHLET)
        return self.brittle_edge_mask & allowed

    @cached_property
    def brittle_vertex_mask(self) -> np.ndarray:
        mask = np.zeros(self.n_vertices, dtype=bool)
        mask[self.triangles[self.regions == Region.BRITTLE].ravel()] = True
        return mask

    @cached_property
    def omega_s_triangles(self) -> np.ndarray:
        """Elastic triangles touching the traction boundary."""
        traction = np.flatnonzero(self.edge_labels == BoundaryLabel.TRACTION)
        tris = np.unique(self.edge_triangles[traction, 0])
        return tris[self.regions[tris] == Region.ELASTIC]

    @cached_property
    def triangulation(self) -> mtri.Triangulation:
        return mtri.Triangulation(self.vertices[:, 0], self.vertices[:, 1], self.triangles)

    @cached_property
    def trifinder(self) -> mtri.TrapezoidMapTriFinder:
        return self.triangulation.get_trifinder()

    def common_triangle(self, e0: int, e1: int) -> int:
        """The triangle incident to both edges, or -1."""
        a = {int(t) for t in self.edge_triangles[e0] if t >= 0}
        b = {int(t) for t in self.edge_triangles[e1] if t >= 0}
        both = a & b
        return min(both) if both else -1


@dataclass
class RegularityReport:
    """Shape measures of a triangle family relative to epsilon."""
    min_inradius_ratio: float
    max_circumdiameter_ratio: float
    angle_range: Tuple[float, float]
    edge_ratio_range: Tuple[float, float]
    passed: bool

    @property
    def angle_range_degrees(self) -> Tuple[float, float]:
        return math.degrees(self.angle_range[0]), math.degrees(self.angle_range[1])


def triangle_measures(points: np.ndarray) -> Dict[str, np.ndarray]:
    """Area, inradius, circumdiameter, angles and side lengths of (n, 3, 2) triangles."""
    points = np.asarray(points, dtype=float)
    sides = np.stack([
        np.linalg.norm(points[:, (k + 1) % 3] - points[:, k], axis=1) for k in range(3)
    ], axis=1)
    d1 = points[:, 1] - points[:, 0]
    d2 = points[:, 2] - points[:, 0]
    area = 0.5 * np.abs(d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])
    perimeter = sides.sum(axis=1)
    angles = []
    for k in range(3):
        u = points[:, (k + 1) % 3] - points[:, k]
        v = points[:, (k + 2) % 3] - points[:, k]
        cosang = np.sum(u * v, axis=1) / (np.linalg.norm(u, axis=1) * np.linalg.norm(v, axis=1))
        angles.append(np.arccos(np.clip(cosang, -1.0, 1.0)))
    return {
        'area': area,
        'inradius': 2.0 * area / perimeter,
        'circumdiameter': np.prod(sides, axis=1) / (2.0 * area),
        'angles': np.stack(angles, axis=1),
        'sides': sides,
    }


def check_regularity(tri, c1: Optional[float] = None, c2: Optional[float] = None,
                     angle_bounds: Optional[Tuple[float, float]] = None,
                     tol: float = 1e-12) -> RegularityReport:
    """
    Regularity of any triangle family exposing ``vertices``, ``triangles`` and ``eps``.

    Bounds default to the attributes of ``tri`` when present, else to the
    structured-grid constants.
    """
    c1 = c1 if c1 is not None else getattr(tri, "c1", C1)
    c2 = c2 if c2 is not None else getattr(tri, "c2", C2)
    if angle_bounds is None:
        angle_bounds = (getattr(tri, "theta1", THETA1), getattr(tri, "theta2", THETA2))

    m = triangle_measures(tri.vertices[tri.triangles])
    eps = tri.eps
    inradius_ratio = float((2.0 * m['inradius'] / eps).min())
    circum_ratio = float((m['circumdiameter'] / eps).max())
    angle_range = (float(m['angles'].min()), float(m['angles'].max()))
    edge_range = (float(m['sides'].min() / eps), float(m['sides'].max() / eps))

    passed = (
        inradius_ratio >= c1 - tol
        and circum_ratio <= c2 + tol
        and angle_range[0] >= angle_bounds[0] - tol
        and angle_range[1] <= angle_bounds[1] + tol
        and edge_range[0] >= c1 - tol
        and edge_range[1] <= c2 + tol
    )
    return RegularityReport(inradius_ratio, circum_ratio, angle_range, edge_range, passed)


def _check_grid_alignment(domain: DomainSpec, eps: float) -> None:
    for name, value in domain.grid_coordinates():
        ratio = value / eps
        if abs(ratio - round(ratio)) > GRID_TOL * max(1.0, abs(ratio)):
            raise NonConformingDomain(
                f"{name} = {value} does not lie on the epsilon = {eps} grid"
            )


def build_structured_mesh(domain: DomainSpec, eps: float) -> RegularTriangulation:
    """Crossed-diagonal triangulation of ``domain`` with cell size ``eps``."""
    if not eps > 0:
        raise NonConformingDomain(f"epsilon must be positive, got {eps}")
    _check_grid_alignment(domain, eps)

    with structured_logger.operation_context("build_structured_mesh", eps=eps):
        x0, y0, x1, y1 = domain.bounding_box
        i0, j0 = int(round(x0 / eps)), int(round(y0 / eps))
        nx, ny = int(round((x1 - x0) / eps)), int(round((y1 - y0) / eps))

        ii, jj = np.meshgrid(np.arange(i0, i0 + nx), np.arange(j0, j0 + ny))
        cells = np.column_stack([ii.ravel(), jj.ravel()])
        centers = (cells + 0.5) * eps
        cells = cells[domain.contains_points(centers)]
        if len(cells) == 0:
            raise DomainError("the polygon contains no grid cell")

        corners = np.concatenate([cells, cells + [1, 0], cells + [1, 1], cells + [0, 1]])
        grid = np.unique(corners, axis=0)
        # row-major vertex order
        grid = grid[np.lexsort((grid[:, 0], grid[:, 1]))]
        index = {(int(i), int(j)): n for n, (i, j) in enumerate(grid)}
        vertices = grid.astype(float) * eps

        triangles = []
        for i, j in cells:
            p00, p10 = index[(i, j)], index[(i + 1, j)]
            p11, p01 = index[(i + 1, j + 1)], index[(i, j + 1)]
            if (i + j) % 2 == 0:
                triangles += [(p00, p10, p11), (p00, p11, p01)]
            else:
                triangles += [(p00, p10, p01), (p10, p11, p01)]
        triangles = np.asarray(triangles, dtype=np.int64)

        edge_index: Dict[Tuple[int, int], int] = {}
        edges, edge_tris, edge_loc = [], [], []
        tri_edges = np.empty_like(triangles)
        for t, tri_v in enumerate(triangles):
            for k in range(3):
                a, b = int(tri_v[k]), int(tri_v[(k + 1) % 3])
                key = (min(a, b), max(a, b))
                e = edge_index.get(key)
                if e is None:
                    e = edge_index[key] = len(edges)
                    edges.append(key)
                    edge_tris.append([t, -1])
                    edge_loc.append([k, -1])
                else:
                    edge_tris[e][1] = t
                    edge_loc[e][1] = k
                tri_edges[t, k] = e
        edges = np.asarray(edges, dtype=np.int64)
        edge_tris = np.asarray(edge_tris, dtype=np.int64)
        edge_loc = np.asarray(edge_loc, dtype=np.int64)

        regions = np.full(len(triangles), int(Region.ELASTIC), dtype=np.int64)
        regions[domain.in_brittle(vertices[triangles].mean(axis=1))] = int(Region.BRITTLE)

        edge_labels = _label_edges(domain, eps, vertices, edges, edge_tris)

        mesh = RegularTriangulation(
            eps=float(eps),
            vertices=vertices,
            triangles=triangles,
            edges=edges,
            edge_triangles=edge_tris,
            edge_local=edge_loc,
            tri_edges=tri_edges,
            edge_labels=edge_labels,
            regions=regions,
            domain=domain,
        )
        _check_traction_separation(mesh)

    logger.debug(f"Built mesh eps={eps}: {mesh.n_vertices} vertices, "
                 f"{mesh.n_triangles} triangles, {mesh.n_edges} edges")
    return mesh


def _label_edges(domain: DomainSpec, eps: float, vertices: np.ndarray,
                 edges: np.ndarray, edge_tris: np.ndarray) -> np.ndarray:
    labels = np.full(len(edges), int(BoundaryLabel.INTERIOR), dtype=np.int64)
    boundary = np.flatnonzero(edge_tris[:, 1] < 0)
    labels[boundary] = int(BoundaryLabel.NEUMANN)
    tol = GRID_TOL * eps
    for s, seg in enumerate(domain.boundary):
        hits = 0
        for e in boundary:
            a, b = vertices[edges[e, 0]], vertices[edges[e, 1]]
            if seg.contains(a, tol) and seg.contains(b, tol):
                labels[e] = int(seg.label)
                hits += 1
        if hits == 0:
            raise DomainError(f"boundary[{s}] {seg.start} -> {seg.end} does not lie on the outer boundary")
    return labels


def _check_traction_separation(mesh: RegularTriangulation) -> None:
    traction = np.flatnonzero(mesh.edge_labels == BoundaryLabel.TRACTION)
    if len(traction) == 0:
        return
    touching = mesh.brittle_vertex_mask[mesh.edges[traction]].any(axis=1)
    if touching.any():
        e = traction[np.argmax(touching)]
        a, b = mesh.vertices[mesh.edges[e]]
        raise DomainError(
            f"TRACTION edge {tuple(a)} -> {tuple(b)} touches the brittle region; "
            "closure(Ω_B)∩∂_S Ω = ∅ is required"
        )


__all__ = [
    'C1',
    'C2',
    'THETA1',
    'THETA2',
    'RegularTriangulation',
    'RegularityReport',
    'triangle_measures',
    'check_regularity',
    'build_structured_mesh',
]
