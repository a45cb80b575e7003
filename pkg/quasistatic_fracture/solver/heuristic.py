"""
Alternating minimisation: elastic solves for a fixed topology, then greedy
topology moves, with knot parameters searched over the same candidates as
the oracle.
"""

from typing import FrozenSet, List, Optional, Set, Tuple

from infrastructure.monitoring.performance_monitor import MetricsCollector
from infrastructure.utilities.logger import get_logger
from infrastructure.utilities.structured_logger import get_structured_logger

from ..crack.crack_set import CrackSet, incremental_surface_energy
from ..mesh.adaptive import AdaptiveParams, AdaptiveTriangulation
from .elastic import ElasticSolver
from .oracle import EnumerationCapExceeded, evaluate_topology, step_minimize_exact
from .problem import StepProblem, StepSolution

logger = get_logger(__name__)
structured_logger = get_structured_logger("solver")

IMPROVEMENT_TOL = 1e-12
VERIFY = 3


def _improves(new: StepSolution, current: StepSolution) -> bool:
    return new.objective < current.objective - IMPROVEMENT_TOL * (1.0 + abs(current.objective))


def frontier(adaptive: AdaptiveTriangulation, topology: FrozenSet[int], covered: FrozenSet[int]) -> List[int]:
    """Crackable sub-edges outside the topology that may be opened next."""
    closed = [s for s in adaptive.crackable_ids if s not in topology]
    if not topology and not covered:
        return closed
    nodes: Set[int] = set()
    for s in set(topology) | set(covered):
        nodes.update(int(n) for n in adaptive.sub_edges[s])
    nodes.update(int(n) for n in adaptive.sub_edges[adaptive.dirichlet_ids].ravel())
    return [s for s in closed if nodes.intersection(int(n) for n in adaptive.sub_edges[s])]


def topology_moves(adaptive: AdaptiveTriangulation, topology: FrozenSet[int],
                   covered: FrozenSet[int]) -> List[Tuple[str, FrozenSet[int]]]:
    """Single and adjacent-pair openings plus single closings of edges opened this step."""
    moves: List[Tuple[str, FrozenSet[int]]] = []
    seen = set()
    candidates = frontier(adaptive, topology, covered)
    open_ok = set(adaptive.crackable_ids) - set(topology)
    for s in candidates:
        moves.append(("open", topology | {s}))
        for s2 in adaptive.neighbours(s):
            pair = frozenset((s, s2))
            if s2 in open_ok and pair not in seen:
                seen.add(pair)
                moves.append(("open_pair", topology | pair))
    for s in sorted(topology - covered):
        moves.append(("close", topology - {s}))
    return moves


def _patch(adaptive: AdaptiveTriangulation, changed) -> List[int]:
    """Subtriangles incident to the changed sub-edges and their edge neighbours."""
    tris = {int(T) for s in changed for T in adaptive.sub_edge_triangles[s] if T >= 0}
    ring = set(tris)
    for T in tris:
        for j in range(3):
            a, b = adaptive.triangles[T, j], adaptive.triangles[T, (j + 1) % 3]
            for s in set(adaptive.node_sub_edges[int(a)]) & set(adaptive.node_sub_edges[int(b)]):
                ring.update(int(x) for x in adaptive.sub_edge_triangles[s] if x >= 0)
    return sorted(ring)


def _best_move(problem: StepProblem, solver: ElasticSolver, current: StepSolution, params: AdaptiveParams,
               candidate: int, moves) -> Optional[StepSolution]:
    if not moves:
        return None
    if problem.settings.heuristic_rank == "full":
        trials = (evaluate_topology(problem, solver, candidate, topo, params) for _, topo in moves)
        return min(trials, key=StepSolution.sort_key)

    adaptive = current.adaptive
    density = problem.model.surface_density
    estimates = []
    for _, topo in moves:
        changed = topo ^ current.topology
        elastic = solver.patch_energy(current.field, topo, params, _patch(adaptive, changed))
        opened = CrackSet.from_sub_edges(adaptive, topo - problem.covered(adaptive), step=problem.index)
        estimate = elastic + incremental_surface_energy(opened, problem.prev_crack, density)
        estimates.append((estimate, tuple(sorted(topo)), topo))
    estimates.sort(key=lambda item: item[:2])
    verified = [evaluate_topology(problem, solver, candidate, topo, params) for _, _, topo in estimates[:VERIFY]]
    return min(verified, key=StepSolution.sort_key)


def descend(problem: StepProblem, solver: ElasticSolver, params: AdaptiveParams,
            candidate: int = 0) -> StepSolution:
    """Greedy topology descent for fixed knots, starting from the previous crack."""
    adaptive = problem.adaptive(params)
    covered = problem.covered(adaptive)
    current = evaluate_topology(problem, solver, candidate, covered, params)
    rounds = 0
    while True:
        best = _best_move(problem, solver, current, params, candidate,
                          topology_moves(adaptive, current.topology, covered))
        if best is None or not _improves(best, current):
            break
        current = best
        rounds += 1
    current.diagnostics['rounds'] = rounds
    return current


def _search_knots(problem: StepProblem, solver: ElasticSolver) -> Tuple[StepSolution, int]:
    settings = problem.settings
    if settings.adaptive_mode == "uniform" or not problem.band_edges:
        results = [descend(problem, solver, params, ci) for ci, params in enumerate(problem.candidates)]
        return min(results, key=StepSolution.sort_key), len(results)

    # coordinate descent over band edges
    best = descend(problem, solver, problem.base_params, 0)
    tried = 1
    for edge in problem.band_edges:
        for value in problem.grid:
            if tried >= settings.max_candidates:
                return best, tried
            params = best.params.with_values([edge], value)
            if params == best.params:
                continue
            trial = descend(problem, solver, params, tried)
            tried += 1
            if _improves(trial, best):
                best = trial
    return best, tried


def step_minimize_heuristic(problem: StepProblem, metrics: Optional[MetricsCollector] = None) -> StepSolution:
    """Best-effort step minimiser; in mode ``both`` the oracle gap is recorded."""
    solver = ElasticSolver.for_problem(problem, metrics)
    with structured_logger.operation_context("heuristic_step", step=problem.index, t=problem.t):
        solution, tried = _search_knots(problem, solver)
    solution.diagnostics.update({'solver': 'heuristic', 'candidates': tried})

    if problem.settings.mode == "both":
        try:
            oracle = step_minimize_exact(problem, metrics)
        except EnumerationCapExceeded as exc:
            logger.info(f"Oracle skipped at step {problem.index}: {exc}")
            solution.diagnostics['gap'] = None
        else:
            gap = solution.objective - oracle.objective
            solution.diagnostics.update({'oracle_objective': oracle.objective, 'gap': gap})
            if gap < -1e-9 * (1.0 + abs(oracle.objective)):
                logger.warning(f"Heuristic beat the oracle by {-gap:.3e} at step {problem.index}")
    return solution


def solve_step(problem: StepProblem, metrics: Optional[MetricsCollector] = None) -> StepSolution:
    """Dispatch on ``settings.mode``."""
    if problem.settings.mode == "oracle":
        return step_minimize_exact(problem, metrics)
    return step_minimize_heuristic(problem, metrics)


__all__ = [
    'frontier',
    'topology_moves',
    'descend',
    'step_minimize_heuristic',
    'solve_step',
]
