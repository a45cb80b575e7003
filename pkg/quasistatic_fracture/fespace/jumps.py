"""
Jump sets S(u), Dirichlet mismatch sets S_D^g(u) and their union.
"""

from typing import FrozenSet

import numpy as np

from .boundary import ContinuousField
from .field import DiscreteField

JUMP_TOL = 1e-10


def jump_set(u: DiscreteField, tol: float = JUMP_TOL) -> FrozenSet[int]:
    """Interior topology sub-edges whose two traces differ at either end node."""
    adaptive = u.adaptive
    ids = np.array(sorted(u.topology), dtype=np.int64)
    if len(ids) == 0:
        return frozenset()
    ids = ids[adaptive.interior_mask[ids]]
    if len(ids) == 0:
        return frozenset()
    diff = u.trace(ids, side=0) - u.trace(ids, side=1)
    gap = np.sqrt(np.sum(diff ** 2, axis=-1)).max(axis=1)
    return frozenset(int(e) for e in ids[gap > tol * u.scale])


def dirichlet_mismatch(u: DiscreteField, g_eps: ContinuousField, tol: float = JUMP_TOL) -> FrozenSet[int]:
    """Dirichlet sub-edges where the trace of u departs from g_eps at either end node."""
    adaptive = u.adaptive
    ids = adaptive.dirichlet_ids
    if len(ids) == 0:
        return frozenset()
    g_nodal = g_eps.node_values(adaptive)
    target = g_nodal[adaptive.sub_edges[ids]]
    diff = u.trace(ids, side=0) - target
    scale = max(u.scale, float(np.sqrt(np.sum(target ** 2, axis=-1)).max()) + 1.0)
    gap = np.sqrt(np.sum(diff ** 2, axis=-1)).max(axis=1)
    return frozenset(int(e) for e in ids[gap > tol * scale])


def combined_jump(u: DiscreteField, g_eps: ContinuousField, tol: float = JUMP_TOL) -> FrozenSet[int]:
    """S^g(u) = S(u) | S_D^g(u)"""
    return jump_set(u, tol) | dirichlet_mismatch(u, g_eps, tol)


__all__ = ['JUMP_TOL', 'jump_set', 'dirichlet_mismatch', 'combined_jump']
