"""
Adaptive 4-way subdivision of a regular triangulation.

Every base edge [x, y] carries a knot z = t*x + (1-t)*y with t in [a, 1-a].
Base triangle T = (v0, v1, v2) with knots m_k on local edge k is split into
(v0, m0, m2), (v1, m1, m0), (v2, m2, m1) and the central (m0, m1, m2).

Sub-edges are numbered structurally so that ids are stable across knot choices:
  2*e + h            half h of base edge e (h = 0 touches x, h = 1 touches y)
  2*ne + 3*T + k     interior edge m_k -> m_{k+1} of base triangle T
"""

import itertools
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, Iterable, Optional, Sequence, Tuple

import numpy as np
from matplotlib import tri as mtri

from infrastructure.utilities.error_handling import SimulationError
from infrastructure.utilities.logger import get_logger

from .domain import BoundaryLabel, Region
from .triangulation import RegularTriangulation, triangle_measures

logger = get_logger(__name__)

PARAM_TOL = 1e-14

# Corner subtriangles in terms of (base vertex k, knot k, knot k-1)
_CORNERS = ((0, 0, 2), (1, 1, 0), (2, 2, 1))


class ParamOutOfRange(SimulationError):
    """A knot parameter lies outside [a, 1-a] or a is outside (0, 1/2)."""


@dataclass(frozen=True, eq=False)
class AdaptiveParams:
    """Knot parameter per base edge."""
    a: float
    t: np.ndarray

    def __post_init__(self):
        if not (0.0 < self.a < 0.5):
            raise ParamOutOfRange(f"a must lie in (0, 1/2), got {self.a}")
        t = np.asarray(self.t, dtype=float)
        object.__setattr__(self, "t", t)
        bad = (t < self.a - PARAM_TOL) | (t > 1.0 - self.a + PARAM_TOL)
        if bad.any():
            e = int(np.argmax(bad))
            raise ParamOutOfRange(
                f"knot parameter t[{e}] = {t[e]} outside [{self.a}, {1.0 - self.a}]"
            )
        t.setflags(write=False)

    @classmethod
    def uniform(cls, mesh: RegularTriangulation, a: float, value: float = 0.5) -> "AdaptiveParams":
        return cls(a, np.full(mesh.n_edges, float(value)))

    def with_values(self, edges: Iterable[int], value) -> "AdaptiveParams":
        t = self.t.copy()
        t[list(edges)] = value
        return AdaptiveParams(self.a, t)

    def key(self) -> bytes:
        return self.t.tobytes()

    def __eq__(self, other) -> bool:
        return (isinstance(other, AdaptiveParams) and self.a == other.a
                and np.array_equal(self.t, other.t))

    def __hash__(self) -> int:
        return hash((self.a, self.key()))


@dataclass(frozen=True, eq=False)
class AdaptiveTriangulation:
    """The subdivided mesh T_{eps,a} with sub-edge adjacency and crackability."""
    base: RegularTriangulation
    params: AdaptiveParams
    vertices: np.ndarray           # base vertices then one knot per base edge
    triangles: np.ndarray          # (4*nt, 3)
    sub_edges: np.ndarray          # (nse, 2) node indices
    sub_edge_triangles: np.ndarray  # (nse, 2) incident subtriangles, -1 when absent
    sub_edge_corners: np.ndarray   # (nse, 2, 2) local corners of the two end nodes per side
    sub_edge_labels: np.ndarray    # (nse,) BoundaryLabel values
    crackable: np.ndarray          # (nse,) bool

    @property
    def eps(self) -> float:
        return self.base.eps

    @property
    def a(self) -> float:
        return self.params.a

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    @property
    def n_sub_edges(self) -> int:
        return len(self.sub_edges)

    @property
    def n_nodes(self) -> int:
        return len(self.vertices)

    @property
    def parent(self) -> np.ndarray:
        return np.repeat(np.arange(self.base.n_triangles), 4)

    @cached_property
    def regions(self) -> np.ndarray:
        return np.repeat(self.base.regions, 4)

    @cached_property
    def areas(self) -> np.ndarray:
        p = self.vertices[self.triangles]
        d1 = p[:, 1] - p[:, 0]
        d2 = p[:, 2] - p[:, 0]
        return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])

    @cached_property
    def basis_gradients(self) -> np.ndarray:
        """(n, 3, 2) gradients of the barycentric coordinates of each subtriangle."""
        p = self.vertices[self.triangles]
        jac = np.stack([p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]], axis=2)  # columns
        inv = np.linalg.inv(jac)  # rows are gradients of lambda_1, lambda_2
        grads = np.empty((len(p), 3, 2))
        grads[:, 1] = inv[:, 0]
        grads[:, 2] = inv[:, 1]
        grads[:, 0] = -inv[:, 0] - inv[:, 1]
        return grads

    @cached_property
    def sub_edge_lengths(self) -> np.ndarray:
        d = self.vertices[self.sub_edges[:, 1]] - self.vertices[self.sub_edges[:, 0]]
        return np.hypot(d[:, 0], d[:, 1])

    @cached_property
    def interior_mask(self) -> np.ndarray:
        return self.sub_edge_triangles[:, 1] >= 0

    @cached_property
    def crackable_ids(self) -> Tuple[int, ...]:
        return tuple(int(i) for i in np.flatnonzero(self.crackable))

    @cached_property
    def dirichlet_ids(self) -> np.ndarray:
        return np.flatnonzero(self.sub_edge_labels == BoundaryLabel.DIRICHLET)

    @cached_property
    def traction_ids(self) -> np.ndarray:
        return np.flatnonzero(self.sub_edge_labels == BoundaryLabel.TRACTION)

    @cached_property
    def triangulation(self) -> mtri.Triangulation:
        return mtri.Triangulation(self.vertices[:, 0], self.vertices[:, 1], self.triangles)

    @cached_property
    def trifinder(self) -> mtri.TrapezoidMapTriFinder:
        return self.triangulation.get_trifinder()

    @cached_property
    def node_sub_edges(self) -> Dict[int, Tuple[int, ...]]:
        incident: Dict[int, list] = {}
        for se, (n0, n1) in enumerate(self.sub_edges):
            incident.setdefault(int(n0), []).append(se)
            incident.setdefault(int(n1), []).append(se)
        return {n: tuple(v) for n, v in incident.items()}

    def half_id(self, edge: int, half: int) -> int:
        return 2 * edge + half

    def interior_id(self, base_triangle: int, k: int) -> int:
        return 2 * self.base.n_edges + 3 * base_triangle + k

    def is_half(self, sub_edge: int) -> bool:
        return sub_edge < 2 * self.base.n_edges

    def half_interval(self, sub_edge: int) -> Tuple[int, float, float]:
        """Base edge and parameter interval along [x, y] (0 at x) covered by a half."""
        e, h = divmod(sub_edge, 2)
        s = 1.0 - float(self.params.t[e])
        return (e, 0.0, s) if h == 0 else (e, s, 1.0)

    def interior_knot_edges(self, sub_edge: int) -> Tuple[int, int]:
        """The two base edges whose knots bound an interior sub-edge."""
        T, k = divmod(sub_edge - 2 * self.base.n_edges, 3)
        edges = self.base.tri_edges[T]
        return int(edges[k]), int(edges[(k + 1) % 3])

    def knot_edges_of(self, sub_edge: int) -> Tuple[int, ...]:
        """Base edges whose knot is an endpoint of the sub-edge."""
        if self.is_half(sub_edge):
            return (sub_edge // 2,)
        return self.interior_knot_edges(sub_edge)

    def neighbours(self, sub_edge: int) -> Tuple[int, ...]:
        """Sub-edges sharing a node with ``sub_edge``."""
        n0, n1 = self.sub_edges[sub_edge]
        found = set(self.node_sub_edges[int(n0)]) | set(self.node_sub_edges[int(n1)])
        found.discard(sub_edge)
        return tuple(sorted(found))


def subdivide(tri: RegularTriangulation, params: AdaptiveParams) -> AdaptiveTriangulation:
    """Split every base triangle into four at the knots given by ``params``."""
    if len(params.t) != tri.n_edges:
        raise ParamOutOfRange(
            f"params cover {len(params.t)} edges but the mesh has {tri.n_edges}"
        )
    nv, ne, nt = tri.n_vertices, tri.n_edges, tri.n_triangles
    t = params.t[:, None]
    knots = t * tri.vertices[tri.edges[:, 0]] + (1.0 - t) * tri.vertices[tri.edges[:, 1]]
    vertices = np.vstack([tri.vertices, knots])

    v = tri.triangles
    m = nv + tri.tri_edges
    triangles = np.empty((nt, 4, 3), dtype=np.int64)
    for s, (kv, km, kp) in enumerate(_CORNERS):
        triangles[:, s] = np.column_stack([v[:, kv], m[:, km], m[:, kp]])
    triangles[:, 3] = m
    triangles = triangles.reshape(-1, 3)

    halves = np.empty((ne, 2, 2), dtype=np.int64)
    halves[:, 0] = np.column_stack([tri.edges[:, 0], nv + np.arange(ne)])
    halves[:, 1] = np.column_stack([nv + np.arange(ne), tri.edges[:, 1]])
    interior = np.stack([m, np.roll(m, -1, axis=1)], axis=2)  # (nt, 3, 2): m_k -> m_{k+1}
    sub_edges = np.vstack([halves.reshape(-1, 2), interior.reshape(-1, 2)])

    lookup = {(min(a, b), max(a, b)): i for i, (a, b) in enumerate(sub_edges.tolist())}
    nse = len(sub_edges)
    se_tris = np.full((nse, 2), -1, dtype=np.int64)
    se_corners = np.full((nse, 2, 2), -1, dtype=np.int64)
    for s_tri, nodes in enumerate(triangles.tolist()):
        for j in range(3):
            a, b = nodes[j], nodes[(j + 1) % 3]
            se = lookup[(min(a, b), max(a, b))]
            side = 0 if se_tris[se, 0] < 0 else 1
            se_tris[se, side] = s_tri
            n0 = sub_edges[se, 0]
            se_corners[se, side] = (j, (j + 1) % 3) if a == n0 else ((j + 1) % 3, j)

    labels = np.full(nse, int(BoundaryLabel.INTERIOR), dtype=np.int64)
    labels[:2 * ne] = np.repeat(tri.edge_labels, 2)

    crackable = np.zeros(nse, dtype=bool)
    crackable[:2 * ne] = np.repeat(tri.crackable_edge_mask, 2)
    crackable[2 * ne:] = np.repeat(tri.regions == Region.BRITTLE, 3)

    adaptive = AdaptiveTriangulation(
        base=tri,
        params=params,
        vertices=vertices,
        triangles=triangles,
        sub_edges=sub_edges,
        sub_edge_triangles=se_tris,
        sub_edge_corners=se_corners,
        sub_edge_labels=labels,
        crackable=crackable,
    )
    if logger.isEnabledFor(10):
        drift = abs(adaptive.areas.sum() - tri.total_area) / tri.total_area
        logger.debug(f"Subdivided {nt} triangles into {len(triangles)}; relative area drift {drift:.2e}")
    return adaptive


def adaptive_regularity_constants(a: float, grid: Optional[Sequence[float]] = None) -> Dict[str, float]:
    """
    Angle and edge-length bounds of subtriangles over a knot grid.

    Both triangle shapes of the structured grid are congruent right isoceles
    triangles, so the bounds follow from the reference triangle with unit legs.
    """
    grid = sorted(set(grid if grid is not None else (a, 0.5, 1.0 - a)))
    ref = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    theta1, theta2 = math.pi, 0.0
    c1, c2 = math.inf, 0.0
    for ts in itertools.product(grid, repeat=3):
        knots = np.array([ts[k] * ref[k] + (1.0 - ts[k]) * ref[(k + 1) % 3] for k in range(3)])
        subs = [np.array([ref[kv], knots[km], knots[kp]]) for kv, km, kp in _CORNERS]
        subs.append(knots)
        meas = triangle_measures(np.stack(subs))
        theta1 = min(theta1, float(meas['angles'].min()))
        theta2 = max(theta2, float(meas['angles'].max()))
        c1 = min(c1, float(meas['sides'].min()))
        c2 = max(c2, float(meas['sides'].max()))
    return {'theta1': theta1, 'theta2': theta2, 'c1': c1, 'c2': c2}


__all__ = [
    'ParamOutOfRange',
    'AdaptiveParams',
    'AdaptiveTriangulation',
    'subdivide',
    'adaptive_regularity_constants',
]
