"""
Degree-of-freedom structure of the discontinuous space under a crack topology.

Each subtriangle owns three corner slots. Slots are merged across every
interior sub-edge that is not in the topology; slot classes touching a
bonded Dirichlet sub-edge are pinned to the boundary field.
"""

from dataclasses import dataclass
from functools import cached_property
from typing import FrozenSet, Iterable, List, Optional

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components

from ..mesh.adaptive import AdaptiveTriangulation
from .field import DiscreteField


def _canonical_labels(labels: np.ndarray) -> np.ndarray:
    """Relabel classes by order of first occurrence."""
    _, first = np.unique(labels, return_index=True)
    order = np.argsort(first)
    remap = np.empty(len(order), dtype=np.int64)
    remap[order] = np.arange(len(order))
    return remap[labels]


@dataclass(frozen=True, eq=False)
class DofMap:
    adaptive: AdaptiveTriangulation
    topology: FrozenSet[int]
    slot_class: np.ndarray     # (3n,) class of slot T*3 + j
    class_node: np.ndarray     # (nc,) adaptive node of each class
    pinned: np.ndarray         # (nc,) bool
    free_index: np.ndarray     # (nc,) position among free classes, -1 when pinned
    triangle_component: np.ndarray  # (n,) connected component of each subtriangle

    @property
    def n_classes(self) -> int:
        return len(self.class_node)

    @property
    def n_free_classes(self) -> int:
        return int((~self.pinned).sum())

    @property
    def n_free(self) -> int:
        return 2 * self.n_free_classes

    @property
    def n_slots(self) -> int:
        return len(self.slot_class)

    @cached_property
    def prolongation(self) -> sparse.csr_matrix:
        """P with DG values (T*3 + j)*2 + c = P x + pinned values."""
        slot_free = self.free_index[self.slot_class]
        rows, cols = [], []
        for c in range(2):
            mask = slot_free >= 0
            slots = np.flatnonzero(mask)
            rows.append(slots * 2 + c)
            cols.append(slot_free[mask] * 2 + c)
        rows = np.concatenate(rows)
        cols = np.concatenate(cols)
        data = np.ones(len(rows))
        return sparse.csr_matrix((data, (rows, cols)), shape=(2 * self.n_slots, self.n_free))

    def pinned_values(self, g_nodal: Optional[np.ndarray]) -> np.ndarray:
        """DG vector with boundary values on pinned slots and zeros elsewhere."""
        out = np.zeros((self.n_slots, 2))
        if g_nodal is None:
            return out.ravel()
        pinned_slots = self.pinned[self.slot_class]
        nodes = self.class_node[self.slot_class[pinned_slots]]
        out[pinned_slots] = g_nodal[nodes]
        return out.ravel()

    def expand(self, x: np.ndarray, g_nodal: Optional[np.ndarray] = None) -> DiscreteField:
        values = self.prolongation @ x + self.pinned_values(g_nodal)
        return DiscreteField(self.adaptive, values.reshape(-1, 3, 2), self.topology)

    def restrict(self, field: DiscreteField) -> np.ndarray:
        """Free unknowns of a field compatible with this map (first slot of each class)."""
        flat = field.values.reshape(-1, 2)
        free_classes = np.flatnonzero(~self.pinned)
        first_slot = np.full(self.n_classes, -1, dtype=np.int64)
        order = np.arange(self.n_slots)[::-1]
        first_slot[self.slot_class[order]] = order
        return flat[first_slot[free_classes]].ravel()

    @cached_property
    def floating_components(self) -> List[np.ndarray]:
        """Subtriangle sets of components with no pinned slot."""
        pinned_slots = self.pinned[self.slot_class].reshape(-1, 3).any(axis=1)
        floating = []
        for comp in np.unique(self.triangle_component):
            members = np.flatnonzero(self.triangle_component == comp)
            if not pinned_slots[members].any():
                floating.append(members)
        return floating


def assemble_dofs(adaptive: AdaptiveTriangulation, topology: Iterable[int] = ()) -> DofMap:
    """Merge corner slots across uncracked interior sub-edges and pin bonded Dirichlet slots."""
    topology = frozenset(int(e) for e in topology)
    n = adaptive.n_triangles
    n_slots = 3 * n
    se_tris = adaptive.sub_edge_triangles
    corners = adaptive.sub_edge_corners

    interior = np.flatnonzero(adaptive.interior_mask)
    if topology:
        interior = interior[~np.isin(interior, list(topology))]
    left = se_tris[interior, 0][:, None] * 3 + corners[interior, 0]
    right = se_tris[interior, 1][:, None] * 3 + corners[interior, 1]
    graph = sparse.coo_matrix(
        (np.ones(left.size), (left.ravel(), right.ravel())), shape=(n_slots, n_slots)
    )
    _, labels = connected_components(graph, directed=False)
    slot_class = _canonical_labels(labels)
    n_classes = int(slot_class.max()) + 1

    slot_node = adaptive.triangles.ravel()
    class_node = np.empty(n_classes, dtype=np.int64)
    class_node[slot_class] = slot_node

    pinned = np.zeros(n_classes, dtype=bool)
    bonded = adaptive.dirichlet_ids
    if topology:
        bonded = bonded[~np.isin(bonded, list(topology))]
    if len(bonded):
        slots = se_tris[bonded, 0][:, None] * 3 + corners[bonded, 0]
        pinned[slot_class[slots.ravel()]] = True

    free_index = np.full(n_classes, -1, dtype=np.int64)
    free_index[~pinned] = np.arange(int((~pinned).sum()))

    tri_graph = sparse.coo_matrix(
        (np.ones(len(interior)), (se_tris[interior, 0], se_tris[interior, 1])), shape=(n, n)
    )
    _, components = connected_components(tri_graph, directed=False)

    return DofMap(
        adaptive=adaptive,
        topology=topology,
        slot_class=slot_class,
        class_node=class_node,
        pinned=pinned,
        free_index=free_index,
        triangle_component=_canonical_labels(components),
    )


__all__ = ['DofMap', 'assemble_dofs']
