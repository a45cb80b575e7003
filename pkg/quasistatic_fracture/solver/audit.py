"""
Minimality audit of step solutions against sampled competitors.
"""

from dataclasses import dataclass, field
from typing import Iterable, Iterator, List, Optional, Tuple, Union

import numpy as np

from infrastructure.utilities.logger import get_logger

from ..fespace.dofs import assemble_dofs
from ..fespace.field import DiscreteField
from .elastic import ElasticSolver
from .problem import StepProblem, StepSolution

logger = get_logger(__name__)

AUDIT_TOL = 1e-9
KINDS = ("random_topology", "perturbed", "boundary")


@dataclass
class AuditReport:
    n_competitors: int = 0
    worst_violation: float = -np.inf
    violations: int = 0
    best_competitor: float = np.inf
    by_kind: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def record(self, kind: str, solution_objective: float, competitor_objective: float) -> None:
        violation = solution_objective - competitor_objective
        self.n_competitors += 1
        self.worst_violation = max(self.worst_violation, violation)
        self.best_competitor = min(self.best_competitor, competitor_objective)
        self.by_kind[kind] = self.by_kind.get(kind, 0) + 1
        if violation > AUDIT_TOL:
            self.violations += 1


class CompetitorSampler:
    """
    Random admissible competitors for a step problem.

    Kinds cycle through: elastic minimisers of random crack topologies on
    random knot candidates, noisy perturbations of the solution on its own
    topology, and the boundary interpolant g_eps on a random candidate.
    """

    def __init__(self, problem: StepProblem, seed: int = 0, open_probability: float = 0.3,
                 noise: float = 0.1):
        self.problem = problem
        self.rng = np.random.default_rng(seed)
        self.open_probability = open_probability
        self.noise = noise

    def _params(self):
        candidates = self.problem.candidates
        return candidates[int(self.rng.integers(len(candidates)))]

    def random_topology(self) -> DiscreteField:
        params = self._params()
        adaptive = self.problem.adaptive(params)
        ids = np.asarray(adaptive.crackable_ids, dtype=np.int64)
        chosen = ids[self.rng.random(len(ids)) < self.open_probability]
        topology = frozenset(int(s) for s in chosen) | self.problem.covered(adaptive)
        return ElasticSolver.for_problem(self.problem).solve(topology, params).field

    def perturbed(self, solution: StepSolution) -> DiscreteField:
        adaptive = solution.adaptive
        dofs = assemble_dofs(adaptive, solution.topology)
        x = dofs.restrict(solution.field)
        scale = self.noise * (1.0 + float(np.abs(solution.field.values).max()))
        x = x + scale * self.rng.standard_normal(x.shape)
        return dofs.expand(x, self.problem.g_nodal(adaptive))

    def boundary(self) -> DiscreteField:
        return self.problem.g_field.to_discrete(self.problem.adaptive(self._params()))

    def sample(self, solution: StepSolution, count: int) -> Iterator[Tuple[str, DiscreteField]]:
        for i in range(count):
            kind = KINDS[i % len(KINDS)]
            if kind == "random_topology":
                yield kind, self.random_topology()
            elif kind == "perturbed":
                yield kind, self.perturbed(solution)
            else:
                yield kind, self.boundary()


Competitors = Union[CompetitorSampler, Iterable[DiscreteField]]


def minimality_audit(solution: StepSolution, problem: StepProblem, competitors: Competitors,
                     count: Optional[int] = None) -> AuditReport:
    """Worst violation of objective(solution) <= objective(v) over the competitors."""
    report = AuditReport()
    if isinstance(competitors, CompetitorSampler):
        items = competitors.sample(solution, count or problem.settings.audit_competitors)
    else:
        items = (("given", v) for v in competitors)
    for kind, v in items:
        report.record(kind, solution.objective, problem.evaluate(v).objective)
    if report.n_competitors == 0:
        report.worst_violation = 0.0
    logger.info(f"Minimality audit at step {problem.index}: {report.n_competitors} competitors, "
                f"worst violation {report.worst_violation:.3e}, {report.violations} violations")
    return report


__all__ = ['AUDIT_TOL', 'AuditReport', 'CompetitorSampler', 'minimality_audit']
