"""
Boundary deformations and their continuous nodal interpolants g_eps(t).
"""

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence, Union

import numpy as np

from ..mesh.adaptive import AdaptiveTriangulation
from ..mesh.triangulation import RegularTriangulation
from ..model.expressions import Expression, VectorExpression
from .field import DiscreteField, barycentric


@dataclass(frozen=True, eq=False)
class BoundaryDeformation:
    """Analytic boundary deformation g(t, x) with its time derivative."""
    g: VectorExpression

    @classmethod
    def from_formulas(cls, components: Sequence[Union[str, float, Expression]]) -> "BoundaryDeformation":
        return cls(VectorExpression(components))

    @cached_property
    def g_dot(self) -> VectorExpression:
        return self.g.diff("t")

    def is_static(self) -> bool:
        return self.g_dot.is_zero()

    def interpolant(self, tri: RegularTriangulation, t: float) -> "ContinuousField":
        return nodal_interpolant(self.g, tri, t)

    def rate_interpolant(self, tri: RegularTriangulation, t: float) -> "ContinuousField":
        return nodal_interpolant(self.g_dot, tri, t)


@dataclass(frozen=True, eq=False)
class ContinuousField:
    """Continuous field, affine on every base triangle, given by vertex values."""
    mesh: RegularTriangulation
    values: np.ndarray  # (nv, 2)
    time: float = 0.0

    def node_values(self, adaptive: AdaptiveTriangulation) -> np.ndarray:
        """Values at the adaptive nodes; the knot value is t g(x) + (1-t) g(y)."""
        t = adaptive.params.t[:, None]
        edges = self.mesh.edges
        knots = t * self.values[edges[:, 0]] + (1.0 - t) * self.values[edges[:, 1]]
        return np.vstack([self.values, knots])

    def to_discrete(self, adaptive: AdaptiveTriangulation) -> DiscreteField:
        return DiscreteField.from_nodal(adaptive, self.node_values(adaptive))

    def evaluate(self, points: np.ndarray, fill: float = np.nan) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        tri = self.mesh.trifinder(points[:, 0], points[:, 1])
        out = np.full((len(points), 2), fill)
        inside = tri >= 0
        if inside.any():
            bary = barycentric(self.mesh.vertices[self.mesh.triangles[tri[inside]]], points[inside])
            out[inside] = np.einsum("nj,njc->nc", bary, self.values[self.mesh.triangles[tri[inside]]])
        return out


def nodal_interpolant(g: VectorExpression, tri: RegularTriangulation, t: float) -> ContinuousField:
    """Vertex-interpolating continuous piecewise-affine field of g(t, .)."""
    return ContinuousField(tri, g(t, tri.vertices), float(t))


__all__ = ['BoundaryDeformation', 'ContinuousField', 'nodal_interpolant']
