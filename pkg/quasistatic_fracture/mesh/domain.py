"""
Domain description: a rectilinear outer polygon, the brittle region and
boundary labels, all aligned with the mesh grid.
"""

from dataclasses import dataclass
from enum import IntEnum
from typing import List, Sequence, Tuple

import numpy as np
from matplotlib.path import Path as PolygonPath

from infrastructure.utilities.error_handling import SimulationError

Point = Tuple[float, float]


class NonConformingDomain(SimulationError):
    """A polygon, region or label coordinate does not land on the epsilon grid."""


class DomainError(SimulationError):
    """The domain description is inconsistent."""


class Region(IntEnum):
    ELASTIC = 0
    BRITTLE = 1


class BoundaryLabel(IntEnum):
    INTERIOR = -1
    NEUMANN = 0
    DIRICHLET = 1
    TRACTION = 2


@dataclass(frozen=True)
class BoundarySegment:
    """A straight piece of the outer boundary carrying one label."""
    start: Point
    end: Point
    label: BoundaryLabel

    def contains(self, p: np.ndarray, tol: float) -> bool:
        a = np.asarray(self.start, dtype=float)
        b = np.asarray(self.end, dtype=float)
        d = b - a
        length = float(np.hypot(*d))
        if length == 0.0:
            return False
        cross = d[0] * (p[1] - a[1]) - d[1] * (p[0] - a[0])
        if abs(cross) / length > tol:
            return False
        s = float(np.dot(p - a, d)) / length**2
        return -tol / length <= s <= 1.0 + tol / length


@dataclass(frozen=True)
class DomainSpec:
    """
    Rectilinear domain with brittle rectangles and labelled boundary segments.

    Boundary edges not covered by a segment are NEUMANN. TRACTION edges are
    Neumann edges carrying the surface load.
    """
    polygon: Tuple[Point, ...]
    brittle: Tuple[Tuple[float, float, float, float], ...] = ()
    boundary: Tuple[BoundarySegment, ...] = ()
    collar: bool = False

    def __post_init__(self):
        poly = np.asarray(self.polygon, dtype=float)
        if poly.ndim != 2 or poly.shape[1] != 2 or len(poly) < 4:
            raise DomainError("polygon needs at least 4 vertices (x, y)")
        for i in range(len(poly)):
            p, q = poly[i], poly[(i + 1) % len(poly)]
            if p[0] != q[0] and p[1] != q[1]:
                raise DomainError(f"polygon side {tuple(p)} -> {tuple(q)} is not axis-aligned")
            if p[0] == q[0] and p[1] == q[1]:
                raise DomainError(f"polygon has a repeated vertex {tuple(p)}")
        for rect in self.brittle:
            x0, y0, x1, y1 = rect
            if not (x1 > x0 and y1 > y0):
                raise DomainError(f"brittle rectangle {rect} must have x1 > x0 and y1 > y0")
        for seg in self.boundary:
            if seg.label == BoundaryLabel.INTERIOR:
                raise DomainError("boundary segments cannot be labelled INTERIOR")

    @property
    def vertices(self) -> np.ndarray:
        return np.asarray(self.polygon, dtype=float)

    @property
    def bounding_box(self) -> Tuple[float, float, float, float]:
        v = self.vertices
        return float(v[:, 0].min()), float(v[:, 1].min()), float(v[:, 0].max()), float(v[:, 1].max())

    @property
    def area(self) -> float:
        v = self.vertices
        x, y = v[:, 0], v[:, 1]
        return 0.5 * abs(float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))

    def path(self) -> PolygonPath:
        return PolygonPath(np.vstack([self.vertices, self.vertices[:1]]), closed=True)

    def contains_points(self, points: np.ndarray) -> np.ndarray:
        return self.path().contains_points(np.asarray(points, dtype=float))

    def in_brittle(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        mask = np.zeros(len(points), dtype=bool)
        for x0, y0, x1, y1 in self.brittle:
            mask |= ((points[:, 0] > x0) & (points[:, 0] < x1)
                     & (points[:, 1] > y0) & (points[:, 1] < y1))
        return mask

    def grid_coordinates(self) -> List[Tuple[str, float]]:
        """Every coordinate that must land on the epsilon grid, with its origin."""
        coords: List[Tuple[str, float]] = []
        for i, (x, y) in enumerate(self.polygon):
            coords += [(f"polygon[{i}].x", x), (f"polygon[{i}].y", y)]
        for i, rect in enumerate(self.brittle):
            coords += [(f"brittle[{i}][{j}]", c) for j, c in enumerate(rect)]
        for i, seg in enumerate(self.boundary):
            coords += [(f"boundary[{i}].start.x", seg.start[0]), (f"boundary[{i}].start.y", seg.start[1]),
                       (f"boundary[{i}].end.x", seg.end[0]), (f"boundary[{i}].end.y", seg.end[1])]
        return coords


def rectangle(x0: float, y0: float, x1: float, y1: float) -> Tuple[Point, ...]:
    return ((x0, y0), (x1, y0), (x1, y1), (x0, y1))


def make_domain(polygon: Sequence[Sequence[float]],
                brittle: Sequence[Sequence[float]] = (),
                boundary: Sequence[Tuple[Sequence[float], Sequence[float], str]] = (),
                collar: bool = False) -> DomainSpec:
    """Build a DomainSpec from plain lists, labels given by name."""
    segments = tuple(
        BoundarySegment(tuple(map(float, s)), tuple(map(float, e)), BoundaryLabel[label.upper()])
        for s, e, label in boundary
    )
    return DomainSpec(
        polygon=tuple(tuple(map(float, p)) for p in polygon),
        brittle=tuple(tuple(map(float, r)) for r in brittle),
        boundary=segments,
        collar=collar,
    )


__all__ = [
    'NonConformingDomain',
    'DomainError',
    'Region',
    'BoundaryLabel',
    'BoundarySegment',
    'DomainSpec',
    'rectangle',
    'make_domain',
]
