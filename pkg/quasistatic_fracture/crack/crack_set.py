"""
Crack sets as collections of sub-edges with provenance.

A crack edge lying on a base edge is identified by the base edge and the
parameter interval it covers (0 at the first endpoint x, 1 at y), so cracks
realised on different adaptive triangulations can be compared. Interior
adaptive edges are identified by their endpoints.
"""

from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, List, Optional, Tuple

import numpy as np

from infrastructure.utilities.error_handling import SimulationError

from ..mesh.adaptive import AdaptiveTriangulation

KEY_DIGITS = 12


class CrackOutsideBrittle(SimulationError):
    """A crack edge is not crackable (outside closure(Omega_B) or on the Neumann boundary)."""


Key = Tuple


@dataclass(frozen=True)
class CrackEdge:
    key: Key
    p0: Tuple[float, float]
    p1: Tuple[float, float]
    base_edge: int = -1
    interval: Optional[Tuple[float, float]] = None
    sub_edge_id: int = -1
    step_added: Optional[int] = None
    base_length: float = 0.0

    @property
    def length(self) -> float:
        return float(np.hypot(self.p1[0] - self.p0[0], self.p1[1] - self.p0[1]))

    @property
    def normal(self) -> np.ndarray:
        d = np.subtract(self.p1, self.p0)
        return np.array([-d[1], d[0]]) / np.hypot(*d)

    def with_step(self, step: Optional[int]) -> "CrackEdge":
        return CrackEdge(self.key, self.p0, self.p1, self.base_edge, self.interval, self.sub_edge_id, step,
                         self.base_length)


def _earlier(a: Optional[int], b: Optional[int]) -> bool:
    """Initial cracks (None) precede every step."""
    if a is None:
        return True
    if b is None:
        return False
    return a <= b


def _interval_union(intervals: Iterable[Tuple[float, float]]) -> List[Tuple[float, float]]:
    merged: List[List[float]] = []
    for s0, s1 in sorted(intervals):
        if merged and s0 <= merged[-1][1] + 10 ** -KEY_DIGITS:
            merged[-1][1] = max(merged[-1][1], s1)
        else:
            merged.append([s0, s1])
    return [(a, b) for a, b in merged]


def _measure(intervals: Iterable[Tuple[float, float]]) -> float:
    return sum(b - a for a, b in _interval_union(intervals))


def sub_edge_key(adaptive: AdaptiveTriangulation, sub_edge: int) -> Key:
    if adaptive.is_half(sub_edge):
        e, s0, s1 = adaptive.half_interval(sub_edge)
        return ("half", e, round(s0, KEY_DIGITS), round(s1, KEY_DIGITS))
    n0, n1 = adaptive.sub_edges[sub_edge]
    ends = sorted(
        tuple(round(float(c) / adaptive.eps, KEY_DIGITS - 3) for c in adaptive.vertices[n])
        for n in (n0, n1)
    )
    return ("interior",) + tuple(ends)


def make_crack_edge(adaptive: AdaptiveTriangulation, sub_edge: int, step: Optional[int]) -> CrackEdge:
    n0, n1 = adaptive.sub_edges[sub_edge]
    p0 = tuple(float(c) for c in adaptive.vertices[n0])
    p1 = tuple(float(c) for c in adaptive.vertices[n1])
    if adaptive.is_half(sub_edge):
        e, s0, s1 = adaptive.half_interval(sub_edge)
        return CrackEdge(sub_edge_key(adaptive, sub_edge), p0, p1, e, (s0, s1), int(sub_edge), step,
                         float(adaptive.base.edge_lengths[e]))
    return CrackEdge(sub_edge_key(adaptive, sub_edge), p0, p1, -1, None, int(sub_edge), step)


class CrackSet:
    """Immutable set of crack edges keyed by geometry."""

    def __init__(self, edges: Iterable[CrackEdge] = ()):
        table: Dict[Key, CrackEdge] = {}
        for edge in edges:
            known = table.get(edge.key)
            if known is None or not _earlier(known.step_added, edge.step_added):
                table[edge.key] = edge
        self._edges = dict(sorted(table.items(), key=lambda kv: repr(kv[0])))

    @classmethod
    def empty(cls) -> "CrackSet":
        return cls()

    @classmethod
    def from_sub_edges(cls, adaptive: AdaptiveTriangulation, sub_edges: Iterable[int],
                       step: Optional[int] = None, check: bool = True) -> "CrackSet":
        ids = sorted(int(s) for s in sub_edges)
        if check:
            bad = [s for s in ids if not adaptive.crackable[s]]
            if bad:
                n0, n1 = adaptive.sub_edges[bad[0]]
                raise CrackOutsideBrittle(
                    f"sub-edge {bad[0]} {tuple(adaptive.vertices[n0])} -> {tuple(adaptive.vertices[n1])} "
                    f"is not crackable"
                )
        return cls(make_crack_edge(adaptive, s, step) for s in ids)

    def __len__(self) -> int:
        return len(self._edges)

    def __iter__(self) -> Iterator[CrackEdge]:
        return iter(self._edges.values())

    def __contains__(self, key) -> bool:
        return key in self._edges

    def __eq__(self, other) -> bool:
        return isinstance(other, CrackSet) and self.keys() == other.keys()

    def __hash__(self) -> int:
        return hash(self.keys())

    def __repr__(self) -> str:
        return f"CrackSet({len(self)} edges, length={self.total_length:.6g})"

    def keys(self) -> frozenset:
        return frozenset(self._edges)

    def union(self, other: "CrackSet") -> "CrackSet":
        return CrackSet(list(self) + list(other))

    __or__ = union

    def difference(self, other: "CrackSet") -> "CrackSet":
        return CrackSet(e for e in self if e.key not in other)

    __sub__ = difference

    def intersection(self, other: "CrackSet") -> "CrackSet":
        return CrackSet(e for e in self if e.key in other)

    def issubset(self, other: "CrackSet") -> bool:
        return self.keys() <= other.keys()

    def with_step(self, step: Optional[int]) -> "CrackSet":
        return CrackSet(e.with_step(step) for e in self)

    @property
    def total_length(self) -> float:
        return _measured(self, lambda length, normal: length)

    def surface_energy(self, density) -> float:
        """Sum of length * k(normal); overlapping intervals on a base edge count once."""
        return _measured(self, lambda length, normal: float(density(normal)) * length)

    def base_intervals(self) -> Dict[int, List[Tuple[float, float]]]:
        grouped: Dict[int, List[Tuple[float, float]]] = {}
        for e in self:
            if e.interval is not None:
                grouped.setdefault(e.base_edge, []).append(e.interval)
        return grouped

    def covered_sub_edges(self, adaptive: AdaptiveTriangulation) -> frozenset:
        """Sub-edges of ``adaptive`` lying entirely inside this crack."""
        covered = set()
        intervals = {e: _interval_union(iv) for e, iv in self.base_intervals().items()}
        tol = 10 ** -KEY_DIGITS
        for e, merged in intervals.items():
            for h in (0, 1):
                sid = adaptive.half_id(e, h)
                _, s0, s1 = adaptive.half_interval(sid)
                if any(a - tol <= s0 and s1 <= b + tol for a, b in merged):
                    covered.add(sid)
        interior_keys = {e.key for e in self if e.interval is None}
        if interior_keys:
            for sid in range(2 * adaptive.base.n_edges, adaptive.n_sub_edges):
                if adaptive.crackable[sid] and sub_edge_key(adaptive, sid) in interior_keys:
                    covered.add(sid)
        return frozenset(covered)

    def end_nodes(self) -> List[Tuple[float, float]]:
        points = set()
        for e in self:
            points.add(tuple(round(c, KEY_DIGITS) for c in e.p0))
            points.add(tuple(round(c, KEY_DIGITS) for c in e.p1))
        return sorted(points)

    def polylines(self) -> List[List[Tuple[float, float]]]:
        """Chains of crack edges joined at endpoints shared by exactly two edges, for plotting."""
        def point(p) -> Tuple[float, float]:
            return tuple(round(float(c), KEY_DIGITS) for c in p)

        edges = sorted(self, key=lambda e: (point(e.p0), point(e.p1)))
        incident: Dict[Tuple[float, float], List[int]] = {}
        for i, e in enumerate(edges):
            incident.setdefault(point(e.p0), []).append(i)
            incident.setdefault(point(e.p1), []).append(i)

        used = set()
        chains = []
        # open ends and junctions first, closed loops last
        for start in sorted(incident, key=lambda p: (len(incident[p]) == 2, p)):
            for first in incident[start]:
                if first in used:
                    continue
                chain, current, i = [start], start, first
                while i is not None:
                    used.add(i)
                    a, b = point(edges[i].p0), point(edges[i].p1)
                    current = b if a == current else a
                    chain.append(current)
                    i = None
                    if len(incident[current]) == 2:
                        i = next((j for j in incident[current] if j not in used), None)
                chains.append(chain)
        return chains

    def to_records(self) -> List[dict]:
        return [
            {'p0': list(e.p0), 'p1': list(e.p1), 'step_added': e.step_added}
            for e in self
        ]


def _measured(crack: CrackSet, weight) -> float:
    total = 0.0
    by_edge: Dict[int, List[CrackEdge]] = {}
    for e in crack:
        if e.interval is None:
            total += weight(e.length, e.normal)
        else:
            by_edge.setdefault(e.base_edge, []).append(e)
    for edges in by_edge.values():
        total += weight(edges[0].base_length * _measure(e.interval for e in edges), edges[0].normal)
    return total


def surface_energy(crack: CrackSet, density) -> float:
    return crack.surface_energy(density)


def incremental_surface_energy(new: CrackSet, previous: CrackSet, density) -> float:
    """Surface energy of the part of ``new`` not already covered by ``previous``."""
    total = 0.0
    prev_intervals = previous.base_intervals()
    by_edge: Dict[int, List[CrackEdge]] = {}
    for e in new:
        if e.interval is None:
            if e.key not in previous:
                total += float(density(e.normal)) * e.length
        else:
            by_edge.setdefault(e.base_edge, []).append(e)
    for base_edge, edges in by_edge.items():
        old = prev_intervals.get(base_edge, [])
        fresh = _measure([e.interval for e in edges] + old) - _measure(old)
        if fresh <= 0.0:
            continue
        total += float(density(edges[0].normal)) * edges[0].base_length * fresh
    return total


__all__ = [
    'CrackOutsideBrittle',
    'CrackEdge',
    'CrackSet',
    'sub_edge_key',
    'make_crack_edge',
    'surface_energy',
    'incremental_surface_energy',
]
