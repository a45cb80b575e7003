"""
Interpolation of piecewise-smooth targets into the discontinuous space.

A target is a family of smooth branches, a selector choosing the branch at
each point, and the polylines carrying its jumps. The interpolant jumps only
on the interpolating curves of those polylines and on the boundaries of
zeroed triangles (triangles containing polyline tips or crossings).
"""

from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

import numpy as np

from infrastructure.utilities.logger import get_logger

from ..crack.crack_set import CrackOutsideBrittle, CrackSet
from ..crack.interpolating_curve import InterpolatingCurve, Polyline, interpolating_curve
from ..mesh.adaptive import AdaptiveParams, AdaptiveTriangulation, subdivide
from ..mesh.domain import BoundaryLabel
from ..mesh.triangulation import RegularTriangulation
from .field import DiscreteField

logger = get_logger(__name__)

Branch = Callable[[np.ndarray], np.ndarray]


@dataclass
class JumpTarget:
    branches: Sequence[Branch]
    selector: Callable[[np.ndarray], np.ndarray] = None
    polylines: Sequence[Polyline] = field(default_factory=list)

    @classmethod
    def continuous(cls, target: Branch) -> "JumpTarget":
        return cls([target], None, [])

    def branch_at(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(points)
        if self.selector is None or len(self.branches) == 1:
            return np.zeros(len(points), dtype=np.int64)
        return np.asarray(self.selector(points), dtype=np.int64)

    def scaled(self, factor: float) -> "JumpTarget":
        return JumpTarget([lambda p, b=b: factor * b(p) for b in self.branches], self.selector, self.polylines)


@dataclass(frozen=True, eq=False)
class InterpolationResult:
    field: DiscreteField
    crack: CrackSet
    params: AdaptiveParams
    curve: Optional[InterpolatingCurve]
    zeroed_triangles: frozenset

    @property
    def adaptive(self) -> AdaptiveTriangulation:
        return self.field.adaptive


def interpolate_to_fespace(target: JumpTarget, tri: RegularTriangulation, a: float) -> InterpolationResult:
    """Nodal interpolation of the target branch of every subtriangle on T_{eps,a}."""
    curve = interpolating_curve(target.polylines, tri, a) if target.polylines else None
    params = curve.params(tri.n_edges) if curve else AdaptiveParams.uniform(tri, a)
    adaptive = subdivide(tri, params)
    zeroed = curve.zeroed_triangles if curve else frozenset()
    ne = tri.n_edges

    n_sub = adaptive.n_triangles
    branch = target.branch_at(adaptive.vertices[adaptive.triangles].mean(axis=1))
    topology: List[int] = []
    if curve:
        for sid in curve.sub_edges:
            T, k = divmod(sid - 2 * ne, 3)
            if T in zeroed:
                continue
            topology.append(sid)
            shared = (k + 1) % 3
            v_star = tri.vertices[tri.triangles[T, shared]]
            opposite = 0.5 * (tri.vertices[tri.triangles[T, (shared + 1) % 3]]
                              + tri.vertices[tri.triangles[T, (shared + 2) % 3]])
            near, far = target.branch_at(np.array([v_star, opposite]))
            branch[4 * T:4 * T + 4] = far
            branch[4 * T + shared] = near

    nodes = adaptive.vertices[adaptive.triangles]  # (n, 3, 2)
    values = np.zeros((n_sub, 3, 2))
    for b, func in enumerate(target.branches):
        mask = branch == b
        if mask.any():
            values[mask] = np.asarray(func(nodes[mask].reshape(-1, 2)), dtype=float).reshape(-1, 3, 2)

    for T in sorted(zeroed):
        values[4 * T:4 * T + 4] = 0.0
        for e in tri.tri_edges[T]:
            label = tri.edge_labels[e]
            for sid in (2 * e, 2 * e + 1):
                if label == BoundaryLabel.INTERIOR:
                    if not adaptive.crackable[sid]:
                        raise CrackOutsideBrittle(
                            f"zeroed triangle {T} has a non-crackable interior edge {e}"
                        )
                    topology.append(sid)
                elif label == BoundaryLabel.DIRICHLET and adaptive.crackable[sid]:
                    topology.append(sid)

    topology = sorted(set(topology))
    crack = CrackSet.from_sub_edges(adaptive, topology)
    result_field = DiscreteField(adaptive, values, frozenset(topology))
    logger.debug(f"Interpolated target with {len(target.branches)} branches: "
                 f"{len(topology)} topology edges, {len(zeroed)} zeroed triangles")
    return InterpolationResult(result_field, crack, params, curve, zeroed)


__all__ = ['JumpTarget', 'InterpolationResult', 'interpolate_to_fespace']
