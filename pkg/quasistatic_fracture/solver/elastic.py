"""
Elastic minimisation for a fixed crack topology and fixed knot parameters.

Unknowns are the free slot classes of the topology's DofMap. The element
gradient and Hessian of the elastic energy are assembled per subtriangle in
DG slot order (6*T + 2*j + c) and pulled back by the prolongation P, so the
reduced system is K = P^T H P. Quadratic models take one direct solve;
other models take damped Newton steps with Armijo backtracking.
"""

import threading
import warnings
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, Optional, Tuple

import numpy as np
import scipy.linalg
from scipy import sparse
from scipy.sparse.linalg import spsolve

from infrastructure.monitoring.performance_monitor import MetricsCollector
from infrastructure.utilities.error_handling import SimulationError
from infrastructure.utilities.logger import get_logger

from ..crack.crack_set import CrackOutsideBrittle
from ..fespace.dofs import DofMap, assemble_dofs
from ..fespace.field import DiscreteField
from ..mesh.adaptive import AdaptiveParams, AdaptiveTriangulation
from ..model.energies import EnergyModel, elastic_energy
from ..model.quadrature import EDGE_RULE, edge_points, triangle_points
from .problem import StepProblem

logger = get_logger(__name__)

ARMIJO = 1e-4
MIN_STEP = 1e-12
NEWTON_SHIFT = 1e-8


class SolveFailure(SimulationError):
    """Newton stagnated or the reduced system is singular."""


class FloatingComponentWarning(UserWarning):
    """A crack-separated component touches no Dirichlet pin and kappa_F = 0."""


@dataclass(frozen=True, eq=False)
class ElementData:
    """Geometry and load data of one adaptive triangulation at a fixed time."""
    adaptive: AdaptiveTriangulation
    G: np.ndarray        # (n, 4, 6) slot values -> flattened gradient
    N: np.ndarray        # (nq, 2, 6) slot values -> values at quadrature points
    points: np.ndarray   # (n, nq, 2)
    weights: np.ndarray  # (n, nq)
    traction_load: np.ndarray  # (n, 6)

    @cached_property
    def stiffness(self) -> np.ndarray:
        """area * G^T G per subtriangle."""
        return self.adaptive.areas[:, None, None] * np.einsum("nki,nkj->nij", self.G, self.G)

    @cached_property
    def mass(self) -> np.ndarray:
        return np.einsum("nq,qci,qcj->nij", self.weights, self.N, self.N)


def element_data(adaptive: AdaptiveTriangulation, t: float, model: EnergyModel) -> ElementData:
    n = adaptive.n_triangles
    B = adaptive.basis_gradients
    G = np.zeros((n, 4, 6))
    for c in range(2):
        for d in range(2):
            G[:, 2 * c + d, c::2] = B[:, :, d]

    rule = model.rule
    N = np.zeros((len(rule.weights), 2, 6))
    for c in range(2):
        N[:, c, c::2] = rule.points
    points = triangle_points(adaptive.vertices, adaptive.triangles, rule)
    weights = adaptive.areas[:, None] * rule.weights[None, :]

    load = np.zeros((n, 6))
    ids = adaptive.traction_ids
    traction = model.surface_potential.traction
    if len(ids) and not traction.is_zero():
        nodes = adaptive.sub_edges[ids]
        e_points = edge_points(adaptive.vertices[nodes[:, 0]], adaptive.vertices[nodes[:, 1]], EDGE_RULE)
        e_weights = adaptive.sub_edge_lengths[ids][:, None] * EDGE_RULE.weights[None, :]
        ell = traction(t, e_points)  # (m, nq, 2)
        s = EDGE_RULE.points
        tris = adaptive.sub_edge_triangles[ids, 0]
        corners = adaptive.sub_edge_corners[ids, 0]
        for end, shape in ((0, 1.0 - s), (1, s)):
            contribution = np.einsum("mq,q,mqc->mc", e_weights, shape, ell)
            for c in range(2):
                np.add.at(load, (tris, 2 * corners[:, end] + c), contribution[:, c])
    return ElementData(adaptive, G, N, points, weights, load)


@dataclass(frozen=True, eq=False)
class ElasticResult:
    field: DiscreteField
    energy: float
    iterations: int
    dofs: DofMap

    @property
    def n_free(self) -> int:
        return self.dofs.n_free


class ElasticSolver:
    """Elastic minimiser bound to one step problem, caching element data and solves."""

    def __init__(self, problem: StepProblem, metrics: Optional[MetricsCollector] = None):
        self.problem = problem
        self.metrics = metrics
        self._elements: Dict[bytes, ElementData] = {}
        self._results: Dict[Tuple[bytes, FrozenSet[int]], ElasticResult] = {}
        self._lock = threading.Lock()

    @classmethod
    def for_problem(cls, problem: StepProblem, metrics: Optional[MetricsCollector] = None) -> "ElasticSolver":
        with problem._lock:
            if problem._solver is None:
                problem._solver = cls(problem, metrics)
            elif metrics is not None and problem._solver.metrics is None:
                problem._solver.metrics = metrics
            return problem._solver

    @property
    def model(self) -> EnergyModel:
        return self.problem.model

    def elements(self, adaptive: AdaptiveTriangulation) -> ElementData:
        key = adaptive.params.key()
        with self._lock:
            found = self._elements.get(key)
        if found is None:
            found = element_data(adaptive, self.problem.t, self.model)
            with self._lock:
                found = self._elements.setdefault(key, found)
        return found

    def solve(self, topology: Iterable[int], params: AdaptiveParams) -> ElasticResult:
        topology = frozenset(int(s) for s in topology)
        key = (params.key(), topology)
        with self._lock:
            cached = self._results.get(key)
        if cached is not None:
            return cached
        adaptive = self.problem.adaptive(params)
        bad = [s for s in topology if not adaptive.crackable[s]]
        if bad:
            raise CrackOutsideBrittle(f"topology contains non-crackable sub-edges {sorted(bad)[:5]}")
        result = self._minimise(adaptive, topology)
        if self.metrics is not None:
            self.metrics.increment("elastic_solves")
            self.metrics.increment("newton_iterations", result.iterations)
        with self._lock:
            result = self._results.setdefault(key, result)
        return result

    # -- energy terms -----------------------------------------------------

    def _terms(self, data: ElementData, y: np.ndarray, hessian: bool = True):
        """Element gradient (n, 6) and Hessian (n, 6, 6) of the elastic energy at DG values y."""
        model = self.model
        t = self.problem.t
        n = data.adaptive.n_triangles
        y = y.reshape(n, 6)
        areas = data.adaptive.areas
        xi = np.einsum("nki,ni->nk", data.G, y).reshape(n, 2, 2)
        grad = areas[:, None] * np.einsum("nki,nk->ni", data.G, model.bulk.gradient(xi).reshape(n, 4))
        u_q = np.einsum("qci,ni->nqc", data.N, y)
        dF = model.body.gradient(t, data.points, u_q)
        grad -= np.einsum("nq,qci,nqc->ni", data.weights, data.N, dF)
        grad -= data.traction_load
        if not hessian:
            return grad, None
        H = areas[:, None, None] * np.einsum("nki,nkl,nlj->nij", data.G, model.bulk.hessian(xi), data.G)
        if model.body.kappa:
            d2F = model.body.hessian(u_q)
            H -= np.einsum("nq,qci,nqcd,qdj->nij", data.weights, data.N, d2F, data.N)
        return grad, H

    def _energy(self, adaptive: AdaptiveTriangulation, y: np.ndarray, topology) -> float:
        u = DiscreteField(adaptive, y.reshape(-1, 3, 2), topology)
        return elastic_energy(self.problem.t, u, self.model)

    @staticmethod
    def _assemble(H: np.ndarray) -> sparse.csr_matrix:
        n = len(H)
        base = 6 * np.arange(n)[:, None, None]
        rows = np.broadcast_to(base + np.arange(6)[None, :, None], H.shape)
        cols = np.broadcast_to(base + np.arange(6)[None, None, :], H.shape)
        return sparse.csr_matrix((H.ravel(), (rows.ravel(), cols.ravel())), shape=(6 * n, 6 * n))

    # -- constraints ------------------------------------------------------

    def _floating_constraints(self, dofs: DofMap, data: ElementData, grad0: np.ndarray,
                              topology) -> Optional[sparse.csr_matrix]:
        if self.model.body.kappa or not dofs.floating_components:
            return None
        areas = data.adaptive.areas
        rows = []
        scale = 1.0 + float(np.abs(grad0).max())
        for members in dofs.floating_components:
            for c in range(2):
                net = float(grad0[members][:, c::2].sum())
                if abs(net) > 1e-9 * scale:
                    raise SolveFailure(
                        f"floating component of {len(members)} subtriangles carries net load {net:.3e} "
                        f"in direction {c}; the energy is unbounded below"
                    )
                row = np.zeros((data.adaptive.n_triangles, 6))
                row[members, c::2] = areas[members, None] / 3.0
                rows.append(row.ravel())
        message = (f"{len(dofs.floating_components)} floating component(s) with kappa_F = 0; "
                   f"pinned to zero mean (topology of {len(topology)} sub-edges)")
        warnings.warn(message, FloatingComponentWarning, stacklevel=3)
        logger.warning(message)
        return sparse.csr_matrix(np.array(rows)) @ dofs.prolongation

    def _linear_solve(self, K: sparse.csr_matrix, rhs: np.ndarray, C: Optional[sparse.csr_matrix],
                      c_rhs: Optional[np.ndarray]) -> np.ndarray:
        n = K.shape[0]
        if C is not None:
            A = sparse.bmat([[K, C.T], [C, None]], format="csc")
            b = np.concatenate([rhs, c_rhs])
        else:
            A, b = K.tocsc(), rhs
        try:
            if A.shape[0] <= self.problem.settings.dense_threshold:
                x = scipy.linalg.solve(A.toarray(), b, assume_a="sym")
            else:
                x = spsolve(A, b)
        except (np.linalg.LinAlgError, scipy.linalg.LinAlgError, RuntimeError) as exc:
            raise SolveFailure(f"reduced elastic system of size {n} is singular: {exc}") from exc
        if not np.all(np.isfinite(x)):
            raise SolveFailure(f"reduced elastic system of size {n} produced non-finite values")
        return x[:n]

    # -- minimisation -----------------------------------------------------

    def _minimise(self, adaptive: AdaptiveTriangulation, topology: FrozenSet[int]) -> ElasticResult:
        settings = self.problem.settings
        dofs = assemble_dofs(adaptive, topology)
        data = self.elements(adaptive)
        P = dofs.prolongation
        y0 = dofs.pinned_values(self.problem.g_nodal(adaptive))
        if dofs.n_free == 0:
            u = dofs.expand(np.zeros(0), self.problem.g_nodal(adaptive))
            return ElasticResult(u, self._energy(adaptive, u.values, topology), 0, dofs)

        grad, H = self._terms(data, y0)
        C = self._floating_constraints(dofs, data, grad, topology)

        if self.model.is_quadratic:
            K = (P.T @ self._assemble(H) @ P).tocsr()
            x = self._linear_solve(K, -(P.T @ grad.ravel()), C, None if C is None else np.zeros(C.shape[0]))
            y = P @ x + y0
            return ElasticResult(DiscreteField(adaptive, y.reshape(-1, 3, 2), topology),
                                 self._energy(adaptive, y, topology), 1, dofs)

        # quadratic surrogate start, then shifted Newton
        surrogate = 2.0 * self.model.bulk.mu * data.stiffness + 2.0 * self.model.body.kappa * data.mass
        K0 = (P.T @ self._assemble(surrogate) @ P).tocsr()
        zeros = None if C is None else np.zeros(C.shape[0])
        x = self._linear_solve(K0, -(P.T @ grad.ravel()), C, zeros)
        shift = NEWTON_SHIFT * self.model.bulk.mu * data.stiffness
        y = P @ x + y0
        energy = self._energy(adaptive, y, topology)
        for iteration in range(1, settings.newton_max_iter + 1):
            grad, H = self._terms(data, y)
            gx = P.T @ grad.ravel()
            if np.linalg.norm(gx) <= settings.newton_tol * (1.0 + abs(energy)):
                return ElasticResult(DiscreteField(adaptive, y.reshape(-1, 3, 2), topology),
                                     energy, iteration, dofs)
            K = (P.T @ self._assemble(H + shift) @ P).tocsr()
            dx = self._linear_solve(K, -gx, C, zeros)
            slope = float(gx @ dx)
            if slope >= 0.0:
                dx, slope = -gx, -float(gx @ gx)
            step = 1.0
            while step >= MIN_STEP:
                y_trial = P @ (x + step * dx) + y0
                trial = self._energy(adaptive, y_trial, topology)
                if trial <= energy + ARMIJO * step * slope:
                    break
                step *= 0.5
            else:
                raise SolveFailure(f"line search stagnated at Newton iteration {iteration} "
                                   f"(energy {energy:.6g}, gradient norm {np.linalg.norm(gx):.3e})")
            x = x + step * dx
            y, energy = y_trial, trial
        raise SolveFailure(f"Newton did not converge after {settings.newton_max_iter} iterations")

    def patch_energy(self, u: DiscreteField, topology: Iterable[int], params: AdaptiveParams,
                     patch: Iterable[int]) -> float:
        """
        Elastic energy after relaxing only the slots of ``patch`` subtriangles
        under ``topology``, starting from ``u`` (which must be admissible for it).
        """
        topology = frozenset(int(s) for s in topology)
        adaptive = self.problem.adaptive(params)
        dofs = assemble_dofs(adaptive, topology)
        data = self.elements(adaptive)
        P = dofs.prolongation
        y0 = dofs.pinned_values(self.problem.g_nodal(adaptive))
        x = dofs.restrict(u)
        patch = np.asarray(sorted(set(int(T) for T in patch)), dtype=np.int64)
        slots = (3 * patch[:, None] + np.arange(3)[None, :]).ravel()
        free = dofs.free_index[dofs.slot_class[slots]]
        free = np.unique(free[free >= 0])
        if len(free) == 0:
            return self._energy(adaptive, P @ x + y0, topology)
        local = np.concatenate([2 * free, 2 * free + 1])
        grad, H = self._terms(data, P @ x + y0)
        K = (P.T @ self._assemble(H + NEWTON_SHIFT * self.model.bulk.mu * data.stiffness) @ P).tocsr()
        K_local = K[local][:, local]
        g_local = (P.T @ grad.ravel())[local]
        try:
            dx = scipy.linalg.solve(K_local.toarray(), -g_local, assume_a="sym")
        except (np.linalg.LinAlgError, scipy.linalg.LinAlgError):
            return self._energy(adaptive, P @ x + y0, topology)
        x = x.copy()
        x[local] += dx
        return self._energy(adaptive, P @ x + y0, topology)


def elastic_solve(topology: Iterable[int], params: AdaptiveParams, problem: StepProblem) -> DiscreteField:
    """Minimiser of the elastic energy at problem.t with the given topology and knots."""
    return ElasticSolver.for_problem(problem).solve(topology, params).field


__all__ = [
    'SolveFailure',
    'FloatingComponentWarning',
    'ElementData',
    'ElasticResult',
    'ElasticSolver',
    'element_data',
    'elastic_solve',
]
