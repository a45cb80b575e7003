"""
Discontinuous piecewise-affine vector fields on adaptive triangulations.
"""

from dataclasses import dataclass
from functools import cached_property
from typing import FrozenSet, Iterable, Optional

import numpy as np

from ..mesh.adaptive import AdaptiveTriangulation


def barycentric(corners: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Barycentric coordinates of points inside (n, 3, 2) triangles."""
    v0 = corners[:, 0]
    jac = np.stack([corners[:, 1] - v0, corners[:, 2] - v0], axis=2)
    local = np.linalg.solve(jac, (points - v0)[..., None])[..., 0]
    return np.column_stack([1.0 - local.sum(axis=1), local])


@dataclass(frozen=True, eq=False)
class DiscreteField:
    """
    Corner values per subtriangle plus the declared crack topology.

    ``values[T, j, c]`` is component c at corner j of subtriangle T. The
    topology lists interior and Dirichlet sub-edges across which the field
    may be discontinuous.
    """
    adaptive: AdaptiveTriangulation
    values: np.ndarray
    topology: FrozenSet[int] = frozenset()

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        expected = (self.adaptive.n_triangles, 3, 2)
        if values.shape != expected:
            raise ValueError(f"field values have shape {values.shape}, expected {expected}")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "topology", frozenset(int(e) for e in self.topology))

    @classmethod
    def zero(cls, adaptive: AdaptiveTriangulation, topology: Iterable[int] = ()) -> "DiscreteField":
        return cls(adaptive, np.zeros((adaptive.n_triangles, 3, 2)), frozenset(topology))

    @classmethod
    def from_nodal(cls, adaptive: AdaptiveTriangulation, nodal: np.ndarray,
                   topology: Iterable[int] = ()) -> "DiscreteField":
        """Continuous field from values at the adaptive nodes."""
        return cls(adaptive, np.asarray(nodal, dtype=float)[adaptive.triangles], frozenset(topology))

    @cached_property
    def gradients(self) -> np.ndarray:
        """(n, 2, 2) with gradients[T, c, d] = d u_c / d x_d."""
        return np.einsum("njc,njd->ncd", self.values, self.adaptive.basis_gradients)

    @cached_property
    def scale(self) -> float:
        if self.values.size == 0:
            return 1.0
        return float(np.sqrt(np.sum(self.values ** 2, axis=-1)).max()) + 1.0

    def at_barycentric(self, bary: np.ndarray) -> np.ndarray:
        """Values at barycentric points of every subtriangle, shape (n, nq, 2)."""
        return np.einsum("qj,njc->nqc", np.asarray(bary, dtype=float), self.values)

    def trace(self, sub_edges: np.ndarray, side: int = 0) -> np.ndarray:
        """
        Values at the two end nodes of each sub-edge seen from one side, (m, 2, 2).

        Node order follows ``adaptive.sub_edges``.
        """
        sub_edges = np.asarray(sub_edges, dtype=np.int64)
        tris = self.adaptive.sub_edge_triangles[sub_edges, side]
        corners = self.adaptive.sub_edge_corners[sub_edges, side]
        if (tris < 0).any():
            raise ValueError("requested the trace of a missing side")
        return self.values[tris[:, None], corners]

    def evaluate(self, points: np.ndarray, fill: float = np.nan) -> np.ndarray:
        """Point values by triangle location; points outside the mesh get ``fill``."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        adaptive = self.adaptive
        tri = adaptive.trifinder(points[:, 0], points[:, 1])
        out = np.full((len(points), 2), fill)
        inside = tri >= 0
        if inside.any():
            t = tri[inside]
            bary = barycentric(adaptive.vertices[adaptive.triangles[t]], points[inside])
            out[inside] = np.einsum("nj,njc->nc", bary, self.values[t])
        return out

    def with_values(self, values: np.ndarray, topology: Optional[Iterable[int]] = None) -> "DiscreteField":
        return DiscreteField(self.adaptive, values, self.topology if topology is None else frozenset(topology))

    def __add__(self, other: "DiscreteField") -> "DiscreteField":
        self._check_compatible(other)
        return DiscreteField(self.adaptive, self.values + other.values, self.topology | other.topology)

    def __sub__(self, other: "DiscreteField") -> "DiscreteField":
        self._check_compatible(other)
        return DiscreteField(self.adaptive, self.values - other.values, self.topology | other.topology)

    def __mul__(self, factor: float) -> "DiscreteField":
        return DiscreteField(self.adaptive, self.values * float(factor), self.topology)

    __rmul__ = __mul__

    def _check_compatible(self, other: "DiscreteField") -> None:
        if self.adaptive is not other.adaptive and not np.array_equal(
                self.adaptive.vertices, other.adaptive.vertices):
            raise ValueError("fields live on different adaptive triangulations")


__all__ = ['DiscreteField', 'barycentric']
