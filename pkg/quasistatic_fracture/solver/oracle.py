"""
Exhaustive step minimisation over knot candidates and crack subsets.
"""

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Iterator, List, Optional, Sequence, Tuple

from infrastructure.monitoring.performance_monitor import MetricsCollector
from infrastructure.utilities.error_handling import SimulationError
from infrastructure.utilities.logger import get_logger
from infrastructure.utilities.structured_logger import get_structured_logger

from ..mesh.adaptive import AdaptiveParams
from ..model.densities import DegenerateModel
from .elastic import ElasticSolver
from .problem import StepProblem, StepSolution

logger = get_logger(__name__)
structured_logger = get_structured_logger("solver")

CHUNK = 64


class EnumerationCapExceeded(SimulationError):
    """Too many crackable sub-edges to enumerate every subset."""


def enumeration_space(problem: StepProblem) -> List[Tuple[int, frozenset, Tuple[int, ...]]]:
    """(candidate index, covered sub-edges, enumerated sub-edges) per knot candidate."""
    cap = problem.settings.enumeration_cap
    space = []
    for ci, params in enumerate(problem.candidates):
        adaptive = problem.adaptive(params)
        covered = problem.covered(adaptive)
        free = tuple(s for s in adaptive.crackable_ids if s not in covered)
        if len(free) > cap:
            raise EnumerationCapExceeded(
                f"{len(free)} crackable sub-edges exceed the enumeration cap {cap} (candidate {ci})"
            )
        space.append((ci, covered, free))
    return space


def _jobs(space, order: str) -> Iterator[Tuple[int, frozenset]]:
    jobs = (
        (ci, covered | frozenset(subset))
        for ci, covered, free in space
        for r in range(len(free) + 1)
        for subset in itertools.combinations(free, r)
    )
    if order == "reverse":
        return iter(list(jobs)[::-1])
    return jobs


def _chunks(iterable, size: int):
    it = iter(iterable)
    while True:
        chunk = list(itertools.islice(it, size))
        if not chunk:
            return
        yield chunk


def evaluate_topology(problem: StepProblem, solver: ElasticSolver, candidate: int, topology,
                      params: Optional[AdaptiveParams] = None) -> StepSolution:
    params = problem.candidates[candidate] if params is None else params
    result = solver.solve(topology, params)
    evaluation = problem.evaluate(result.field)
    return StepSolution.from_evaluation(result.field, params, topology, evaluation, candidate,
                                        iterations=result.iterations)


def _best(problem: StepProblem, solver: ElasticSolver, chunk) -> Optional[StepSolution]:
    best = None
    for candidate, topology in chunk:
        solution = evaluate_topology(problem, solver, candidate, topology)
        if best is None or solution.sort_key() < best.sort_key():
            best = solution
    return best


def step_minimize_exact(problem: StepProblem, metrics: Optional[MetricsCollector] = None) -> StepSolution:
    """Certified minimum over the knot candidates and all subsets of uncovered crackable sub-edges."""
    settings = problem.settings
    solver = ElasticSolver.for_problem(problem, metrics)
    with structured_logger.operation_context("oracle_step", step=problem.index, t=problem.t,
                                             candidates=len(problem.candidates)):
        space = enumeration_space(problem)
        total = sum(2 ** len(free) for _, _, free in space)
        jobs = _jobs(space, settings.enumeration_order)
        if settings.threads > 1:
            with ThreadPoolExecutor(max_workers=settings.threads) as pool:
                results = list(pool.map(lambda chunk: _best(problem, solver, chunk), _chunks(jobs, CHUNK)))
        else:
            results = [_best(problem, solver, chunk) for chunk in _chunks(jobs, CHUNK)]
        best = min((r for r in results if r is not None), key=StepSolution.sort_key)

    best.diagnostics.update({'solver': 'oracle', 'enumerated': total, 'candidates': len(space)})
    if metrics is not None:
        metrics.increment("oracle_topologies", total)
    logger.debug(f"Oracle step {problem.index}: {total} topologies, objective {best.objective:.12g}, "
                 f"{len(best.realized)} realised sub-edges")
    return best


def nucleation_threshold(problem: StepProblem) -> float:
    """
    Load factor at which cracking first pays off for g(t) = t g1 and zero forces.

    Every minimiser scales with t, so a topology S beats the bonded state once
    t^2 (e_bonded - e_S) > c_S; the threshold is the smallest such t.
    """
    model = problem.model
    if not model.is_quadratic or model.has_forces:
        raise DegenerateModel("the nucleation threshold needs a quadratic model without forces")
    unit = problem.at_time(1.0)
    solver = ElasticSolver.for_problem(unit)
    space = enumeration_space(unit)
    threshold = math.inf
    for ci, covered, free in space:
        bonded = evaluate_topology(unit, solver, ci, covered)
        for r in range(1, len(free) + 1):
            for subset in itertools.combinations(free, r):
                solution = evaluate_topology(unit, solver, ci, covered | frozenset(subset))
                drop = bonded.elastic - solution.elastic
                if drop > 1e-12 * (1.0 + abs(bonded.elastic)):
                    threshold = min(threshold, math.sqrt(solution.incremental / drop))
    logger.info(f"Nucleation threshold {threshold:.12g}")
    return threshold


__all__ = [
    'EnumerationCapExceeded',
    'enumeration_space',
    'evaluate_topology',
    'step_minimize_exact',
    'nucleation_threshold',
]
