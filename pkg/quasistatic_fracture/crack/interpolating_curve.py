"""
Interpolating curves of polylines on adaptive triangulations.

Each crossing of a polyline with a base edge [x, y] is projected to the
nearest admissible knot t*x + (1-t)*y with t in [a, 1-a]; consecutive
projected knots are joined by the interior adaptive edge of the base
triangle they share.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

import numpy as np

from infrastructure.utilities.error_handling import SimulationError
from infrastructure.utilities.logger import get_logger

from ..mesh.adaptive import AdaptiveParams
from ..mesh.triangulation import RegularTriangulation

logger = get_logger(__name__)

GENERIC_TOL = 1e-12

Polyline = Sequence[Tuple[float, float]]


class NonGenericPosition(SimulationError):
    """A polyline touches a mesh vertex, overlaps an edge or crosses an edge twice."""


@dataclass
class Crossing:
    edge: int
    raw_t: float                # knot parameter of the exact crossing
    point: Tuple[float, float]  # exact crossing point
    polyline: int
    position: float             # segment index + fraction along the segment


@dataclass
class InterpolatingCurve:
    a: float
    knots: Dict[int, float] = field(default_factory=dict)
    crossings: List[List[Crossing]] = field(default_factory=list)
    sub_edges: List[int] = field(default_factory=list)
    sub_edge_polyline: Dict[int, int] = field(default_factory=dict)
    sub_edge_ends: Dict[int, Tuple[int, int]] = field(default_factory=dict)  # base edges in travel order
    projected: List[np.ndarray] = field(default_factory=list)
    tip_triangles: frozenset = frozenset()
    joint_triangles: frozenset = frozenset()
    tip_edges: frozenset = frozenset()

    @property
    def zeroed_triangles(self) -> frozenset:
        return self.tip_triangles | self.joint_triangles

    def params(self, n_edges: int, base: AdaptiveParams = None) -> AdaptiveParams:
        """Knot parameters with the curve knots set and ``base`` (or midpoints) elsewhere."""
        t = np.full(n_edges, 0.5) if base is None else base.t.copy()
        for e, value in self.knots.items():
            t[e] = value
        return AdaptiveParams(self.a, t)

    def projected_length(self) -> float:
        return float(sum(np.linalg.norm(np.diff(p, axis=0), axis=1).sum() for p in self.projected if len(p) > 1))


def _cross(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    return u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]


def segment_crossings(p: np.ndarray, q: np.ndarray, tri: RegularTriangulation) -> List[Tuple[int, float, float]]:
    """
    Crossings of segment p -> q with base edges as (edge, fraction along pq, s along [x, y]).
    """
    tol = GENERIC_TOL * tri.eps
    d = q - p
    seg_len = float(np.hypot(*d))
    if seg_len <= tol:
        raise NonGenericPosition(f"polyline segment {tuple(p)} -> {tuple(q)} has zero length")
    x = tri.vertices[tri.edges[:, 0]]
    y = tri.vertices[tri.edges[:, 1]]
    e = y - x
    e_len = np.hypot(e[:, 0], e[:, 1])
    denom = _cross(d[None, :], e)
    w = x - p[None, :]
    parallel = np.abs(denom) <= 1e-14 * seg_len * e_len

    # collinear overlaps and vertex contacts along parallel edges
    if parallel.any():
        idx = np.flatnonzero(parallel)
        off_line = np.abs(_cross(w[idx], np.broadcast_to(d, w[idx].shape))) / seg_len
        for k in idx[off_line <= tol]:
            u0 = float(np.dot(x[k] - p, d)) / seg_len ** 2
            u1 = float(np.dot(y[k] - p, d)) / seg_len ** 2
            lo, hi = min(u0, u1), max(u0, u1)
            overlap = (min(hi, 1.0) - max(lo, 0.0)) * seg_len
            if overlap > tol:
                raise NonGenericPosition(
                    f"segment {tuple(p)} -> {tuple(q)} overlaps mesh edge "
                    f"{tuple(x[k])} -> {tuple(y[k])}"
                )
            if overlap > -tol:
                raise NonGenericPosition(f"segment {tuple(p)} -> {tuple(q)} touches a mesh vertex")

    safe = np.where(parallel, 1.0, denom)
    u = _cross(w, e) / safe
    s = _cross(w, np.broadcast_to(d, w.shape)) / safe
    u_tol = tol / seg_len
    s_tol = tol / e_len
    hit = (~parallel) & (u >= -u_tol) & (u <= 1.0 + u_tol) & (s >= -s_tol) & (s <= 1.0 + s_tol)
    result = []
    for k in np.flatnonzero(hit):
        if s[k] <= s_tol[k] or s[k] >= 1.0 - s_tol[k]:
            vertex = x[k] if s[k] <= s_tol[k] else y[k]
            raise NonGenericPosition(
                f"segment {tuple(p)} -> {tuple(q)} passes through mesh vertex {tuple(vertex)}"
            )
        result.append((int(k), float(np.clip(u[k], 0.0, 1.0)), float(s[k])))
    return result


def locate_points(tri: RegularTriangulation, points: np.ndarray) -> np.ndarray:
    """Containing base triangle per point; points on the outer boundary map to the incident triangle."""
    points = np.atleast_2d(points)
    found = np.asarray(tri.trifinder(points[:, 0], points[:, 1]), dtype=np.int64)
    missing = np.flatnonzero(found < 0)
    if len(missing):
        boundary = np.flatnonzero(tri.boundary_edge_mask)
        x = tri.vertices[tri.edges[boundary, 0]]
        e = tri.vertices[tri.edges[boundary, 1]] - x
        tol = GENERIC_TOL * tri.eps * 10
        for i in missing:
            w = points[i] - x
            s = np.clip(np.sum(w * e, axis=1) / np.sum(e * e, axis=1), 0.0, 1.0)
            dist = np.hypot(*(w - s[:, None] * e).T)
            k = int(np.argmin(dist))
            if dist[k] <= tol:
                found[i] = tri.edge_triangles[boundary[k], 0]
    return found


def _segment_intersections(polylines: List[np.ndarray], tol: float) -> List[np.ndarray]:
    """Points where two non-adjacent segments of the input meet."""
    segments = []
    for pi, line in enumerate(polylines):
        for si in range(len(line) - 1):
            segments.append((pi, si, line[si], line[si + 1]))
    points = []
    for i in range(len(segments)):
        pi, si, p, q = segments[i]
        for j in range(i + 1, len(segments)):
            pj, sj, r, s = segments[j]
            if pi == pj and abs(si - sj) <= 1:
                continue
            d1, d2 = q - p, s - r
            denom = float(_cross(d1, d2))
            if abs(denom) <= 1e-14:
                continue
            u = float(_cross(r - p, d2)) / denom
            v = float(_cross(r - p, d1)) / denom
            if -tol <= u <= 1 + tol and -tol <= v <= 1 + tol:
                points.append(p + u * d1)
    return points


def interpolating_curve(polylines: Sequence[Polyline], tri: RegularTriangulation, a: float) -> InterpolatingCurve:
    """Project every polyline onto the adaptive knots and connect consecutive knots."""
    if not (0.0 < a < 0.5):
        raise NonGenericPosition(f"a must lie in (0, 1/2), got {a}")
    lines = [np.asarray(line, dtype=float).reshape(-1, 2) for line in polylines]
    curve = InterpolatingCurve(a=a)
    tol = GENERIC_TOL * tri.eps
    boundary = tri.boundary_edge_mask

    tips, tip_edges = set(), set()
    for pi, line in enumerate(lines):
        if len(line) < 2:
            raise NonGenericPosition(f"polyline {pi} needs at least two points")
        found = locate_points(tri, line)
        if (found < 0).any():
            k = int(np.argmax(found < 0))
            raise NonGenericPosition(f"polyline {pi} point {tuple(line[k])} lies outside the mesh")

        crossings: List[Crossing] = []
        for si in range(len(line) - 1):
            for edge, u, s in sorted(segment_crossings(line[si], line[si + 1], tri), key=lambda c: c[1]):
                point = tuple(line[si] + u * (line[si + 1] - line[si]))
                if crossings and crossings[-1].edge == edge and \
                        np.hypot(*np.subtract(crossings[-1].point, point)) <= tol:
                    continue
                crossings.append(Crossing(edge, 1.0 - s, point, pi, si + u))
        seen = set()
        for c in crossings:
            if c.edge in seen:
                raise NonGenericPosition(f"polyline {pi} crosses base edge {c.edge} more than once")
            seen.add(c.edge)
        curve.crossings.append(crossings)

        # tips: polyline ends inside the domain
        for end, where in ((line[0], 0.0), (line[-1], float(len(line) - 1))):
            on_edge = [c for c in crossings if abs(c.position - where) <= tol]
            if on_edge and boundary[on_edge[0].edge]:
                continue
            if on_edge:
                tip_edges.add(on_edge[0].edge)
            else:
                tips.add(int(locate_points(tri, end[None, :])[0]))

        for c in crossings:
            if c.edge not in curve.knots:
                curve.knots[c.edge] = float(np.clip(c.raw_t, a, 1.0 - a))

    for pi, crossings in enumerate(curve.crossings):
        points = []
        for c in crossings:
            t = curve.knots[c.edge]
            x, y = tri.vertices[tri.edges[c.edge]]
            points.append(t * x + (1.0 - t) * y)
        curve.projected.append(np.array(points).reshape(-1, 2))
        for c0, c1 in zip(crossings, crossings[1:]):
            T = tri.common_triangle(c0.edge, c1.edge)
            if T < 0:
                raise NonGenericPosition(
                    f"consecutive crossings of polyline {pi} on edges {c0.edge} and {c1.edge} share no triangle"
                )
            local = list(tri.tri_edges[T])
            ka, kb = local.index(c0.edge), local.index(c1.edge)
            k = ka if kb == (ka + 1) % 3 else kb
            sid = 2 * tri.n_edges + 3 * T + k
            if sid not in curve.sub_edge_polyline:
                curve.sub_edges.append(sid)
                curve.sub_edge_polyline[sid] = pi
                curve.sub_edge_ends[sid] = (c0.edge, c1.edge)

    joints = _segment_intersections(lines, GENERIC_TOL)
    if joints:
        pts = np.array(joints)
        found = locate_points(tri, pts)
        curve.joint_triangles = frozenset(int(t) for t in found if t >= 0)
    curve.tip_triangles = frozenset(t for t in tips if t >= 0)
    curve.tip_edges = frozenset(tip_edges)
    logger.debug(f"Interpolating curve: {len(curve.knots)} knots, {len(curve.sub_edges)} sub-edges, "
                 f"{len(curve.zeroed_triangles)} zeroed triangles")
    return curve


__all__ = [
    'NonGenericPosition',
    'Crossing',
    'InterpolatingCurve',
    'segment_crossings',
    'locate_points',
    'interpolating_curve',
]
