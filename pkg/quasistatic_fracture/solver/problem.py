"""
Step problems of the discrete evolution and their solutions.

A step problem fixes the time, the boundary interpolant, the crack of the
previous step and the adaptive-parameter candidates. Its objective is the
elastic energy plus the surface energy of the realised jump not already
covered by the previous crack.
"""

import itertools
import threading
from dataclasses import dataclass, field, fields, replace
from functools import cached_property
from typing import Any, Dict, FrozenSet, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from config import get_quadrature_config, get_solver_config

from ..crack.crack_set import CrackOutsideBrittle, CrackSet, incremental_surface_energy
from ..fespace.boundary import BoundaryDeformation, ContinuousField
from ..fespace.field import DiscreteField
from ..fespace.jumps import combined_jump
from ..mesh.adaptive import AdaptiveParams, AdaptiveTriangulation, subdivide
from ..mesh.triangulation import RegularTriangulation
from ..model.energies import EnergyModel, elastic_energy

MODES = ("oracle", "heuristic", "both")
BANDS = ("brittle", "all", "none")
ADAPTIVE_MODES = ("uniform", "product")
RANKINGS = ("full", "local")
ORDERS = ("forward", "reverse")


@dataclass(frozen=True)
class SolverSettings:
    mode: str = "oracle"
    adaptive_grid: Optional[Tuple[float, ...]] = None
    adaptive_band: str = "brittle"
    adaptive_mode: str = "uniform"
    max_candidates: int = 64
    enumeration_cap: int = 20
    newton_tol: float = 1e-10
    newton_max_iter: int = 200
    dense_threshold: int = 400
    heuristic_rank: str = "full"
    threads: int = 1
    jump_tol: float = 1e-10
    enumeration_order: str = "forward"
    audit_competitors: int = 200

    def __post_init__(self):
        for name, value, choices in (("mode", self.mode, MODES),
                                     ("adaptive_band", self.adaptive_band, BANDS),
                                     ("adaptive_mode", self.adaptive_mode, ADAPTIVE_MODES),
                                     ("heuristic_rank", self.heuristic_rank, RANKINGS),
                                     ("enumeration_order", self.enumeration_order, ORDERS)):
            if value not in choices:
                raise ValueError(f"solver.{name} must be one of {', '.join(choices)}, got {value!r}")
        if self.adaptive_grid is not None:
            object.__setattr__(self, "adaptive_grid", tuple(float(v) for v in self.adaptive_grid))

    @classmethod
    def from_config(cls, overrides: Optional[Mapping[str, Any]] = None) -> "SolverSettings":
        """Application defaults from config.py, then the given overrides."""
        defaults = get_solver_config()
        values = {
            'mode': defaults['mode'],
            'adaptive_band': defaults['adaptive_band'],
            'adaptive_mode': defaults['adaptive_mode'],
            'max_candidates': defaults['max_candidates'],
            'enumeration_cap': defaults['enumeration_cap'],
            'newton_tol': defaults['newton_tolerance'],
            'newton_max_iter': defaults['newton_max_iterations'],
            'dense_threshold': defaults['dense_threshold'],
            'heuristic_rank': defaults['heuristic_rank'],
            'threads': defaults['threads'],
            'jump_tol': get_quadrature_config()['jump_tolerance'],
            'audit_competitors': defaults['audit_competitors'],
        }
        known = {f.name for f in fields(cls)}
        values.update({k: v for k, v in (overrides or {}).items() if k in known})
        return cls(**values)


@dataclass(eq=False)
class StepProblem:
    """Minimisation problem of step ``index`` at time ``t``."""
    index: int
    t: float
    mesh: RegularTriangulation
    model: EnergyModel
    boundary: BoundaryDeformation
    prev_crack: CrackSet
    base_params: AdaptiveParams
    locked_edges: FrozenSet[int] = frozenset()
    settings: SolverSettings = field(default_factory=SolverSettings)
    _adaptive_cache: Dict[bytes, AdaptiveTriangulation] = field(init=False, repr=False, default_factory=dict)
    _lock: threading.Lock = field(init=False, repr=False, default_factory=threading.Lock)
    _solver: Any = field(init=False, repr=False, default=None)

    def __post_init__(self):
        self.locked_edges = frozenset(int(e) for e in self.locked_edges)
        if len(self.prev_crack):
            adaptive = self.adaptive(self.base_params)
            bad = [s for s in self.prev_crack.covered_sub_edges(adaptive) if not adaptive.crackable[s]]
            if bad:
                raise CrackOutsideBrittle(f"previous crack covers non-crackable sub-edges {sorted(bad)[:5]}")

    @property
    def a(self) -> float:
        return self.base_params.a

    def at_time(self, t: float) -> "StepProblem":
        return replace(self, t=float(t))

    @cached_property
    def g_field(self) -> ContinuousField:
        return self.boundary.interpolant(self.mesh, self.t)

    @cached_property
    def grid(self) -> Tuple[float, ...]:
        values = self.settings.adaptive_grid or (self.a, 0.5, 1.0 - self.a)
        return tuple(sorted(set(float(v) for v in values)))

    @cached_property
    def band_edges(self) -> Tuple[int, ...]:
        """Unlocked base edges whose knot takes part in the search."""
        band = self.settings.adaptive_band
        if band == "none":
            return ()
        mask = np.ones(self.mesh.n_edges, dtype=bool) if band == "all" else self.mesh.brittle_edge_mask.copy()
        if self.locked_edges:
            mask[list(self.locked_edges)] = False
        return tuple(int(e) for e in np.flatnonzero(mask))

    @cached_property
    def candidates(self) -> List[AdaptiveParams]:
        """Candidate 0 is ``base_params``; the rest follow the grid in order."""
        found = [self.base_params]
        band = list(self.band_edges)
        if not band:
            return found
        if self.settings.adaptive_mode == "uniform":
            options = (self.base_params.with_values(band, value) for value in self.grid)
        else:
            options = (self.base_params.with_values(band, np.array(combo))
                       for combo in itertools.product(self.grid, repeat=len(band)))
        seen = {self.base_params}
        for params in options:
            if len(found) >= max(1, self.settings.max_candidates):
                break
            if params not in seen:
                seen.add(params)
                found.append(params)
        return found

    def adaptive(self, params: AdaptiveParams) -> AdaptiveTriangulation:
        key = params.key()
        with self._lock:
            cached = self._adaptive_cache.get(key)
        if cached is None:
            cached = subdivide(self.mesh, params)
            with self._lock:
                cached = self._adaptive_cache.setdefault(key, cached)
        return cached

    def g_nodal(self, adaptive: AdaptiveTriangulation) -> np.ndarray:
        return self.g_field.node_values(adaptive)

    def covered(self, adaptive: AdaptiveTriangulation) -> FrozenSet[int]:
        """Crackable sub-edges inside the previous crack; reopening them is free."""
        if not len(self.prev_crack):
            return frozenset()
        return frozenset(s for s in self.prev_crack.covered_sub_edges(adaptive) if adaptive.crackable[s])

    def evaluate(self, u: DiscreteField) -> "Evaluation":
        """Objective of a field: elastic energy plus the surface energy of new jumps."""
        adaptive = u.adaptive
        realized = combined_jump(u, self.g_field, self.settings.jump_tol)
        crack = CrackSet.from_sub_edges(adaptive, realized, step=self.index)
        elastic = elastic_energy(self.t, u, self.model)
        incremental = incremental_surface_energy(crack, self.prev_crack, self.model.surface_density)
        return Evaluation(elastic, incremental, frozenset(realized), crack)


@dataclass(frozen=True)
class Evaluation:
    elastic: float
    incremental: float
    realized: FrozenSet[int]
    crack: CrackSet

    @property
    def objective(self) -> float:
        return self.elastic + self.incremental


@dataclass(eq=False)
class StepSolution:
    field: DiscreteField
    params: AdaptiveParams
    topology: FrozenSet[int]
    realized: FrozenSet[int]
    crack: CrackSet
    elastic: float
    incremental: float
    candidate: int = 0
    diagnostics: Dict[str, Any] = field(default_factory=dict)

    @property
    def adaptive(self) -> AdaptiveTriangulation:
        return self.field.adaptive

    @property
    def objective(self) -> float:
        return self.elastic + self.incremental

    def sort_key(self) -> Tuple:
        """Total order: objective, realised crack ids, candidate index, topology ids."""
        return (self.objective, tuple(sorted(self.realized)), self.candidate, tuple(sorted(self.topology)))

    def recompute(self, problem: StepProblem) -> float:
        return problem.evaluate(self.field).objective

    @classmethod
    def from_evaluation(cls, u: DiscreteField, params: AdaptiveParams, topology, evaluation: Evaluation,
                        candidate: int = 0, **diagnostics) -> "StepSolution":
        return cls(u, params, frozenset(topology), evaluation.realized, evaluation.crack,
                   evaluation.elastic, evaluation.incremental, candidate, dict(diagnostics))


__all__ = ['SolverSettings', 'StepProblem', 'StepSolution', 'Evaluation']
