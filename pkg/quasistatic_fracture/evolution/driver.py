"""
Time-stepping driver of the discrete quasistatic evolution.
"""

import time
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

from tqdm import tqdm

from infrastructure.monitoring.performance_monitor import MetricsCollector, PerformanceTimer
from infrastructure.utilities.error_handling import SimulationError
from infrastructure.utilities.logger import get_logger
from infrastructure.utilities.structured_logger import get_structured_logger

from config import get_quadrature_config

from ..crack.crack_set import CrackSet
from ..crack.initial import InitialCrack, approximate_initial_crack
from ..crack.interpolating_curve import Polyline
from ..fespace.boundary import BoundaryDeformation
from ..fespace.field import DiscreteField
from ..mesh.triangulation import RegularTriangulation
from ..model.energies import EnergyModel, body_work, bulk_energy, lp_norms, surface_work
from ..solver.heuristic import solve_step
from ..solver.problem import SolverSettings, StepProblem, StepSolution
from .ledger import (
    EvolutionLedger,
    LedgerRow,
    WorkIntegrals,
    interval_work,
    sampled_remainder,
    step_remainders,
)
from .time_grid import TimeGrid

logger = get_logger(__name__)
structured_logger = get_structured_logger("evolution")


@dataclass
class EvolutionSetup:
    """Everything a run needs, independent of how it was configured."""
    mesh: RegularTriangulation
    model: EnergyModel
    boundary: BoundaryDeformation
    grid: TimeGrid
    a: float
    initial_crack: Sequence[Polyline] = ()
    settings: SolverSettings = field(default_factory=SolverSettings)
    theta_samples: Tuple[float, ...] = tuple(get_quadrature_config()['theta_samples'])


@dataclass
class Evolution:
    setup: EvolutionSetup
    initial: InitialCrack
    solutions: List[StepSolution] = field(default_factory=list)
    cracks: List[CrackSet] = field(default_factory=list)

    @property
    def grid(self) -> TimeGrid:
        return self.setup.grid

    @property
    def n_completed(self) -> int:
        return len(self.solutions)

    @property
    def complete(self) -> bool:
        return self.n_completed == len(self.grid)

    def field_at(self, i: int) -> DiscreteField:
        return self.solutions[i].field

    def crack_at(self, i: int) -> CrackSet:
        return self.cracks[i]

    def state_at(self, t: float) -> Tuple[DiscreteField, CrackSet]:
        """Left-continuous piecewise-constant interpolant: step i on [t_i, t_{i+1})."""
        i = self.grid.index_at(t)
        if i >= self.n_completed:
            raise IndexError(f"time {t} lies beyond the {self.n_completed} completed steps")
        return self.solutions[i].field, self.cracks[i]


class EvolutionAborted(SimulationError):
    """A step failed; ``partial`` holds the evolution and ledger of the completed steps."""

    def __init__(self, message: str, partial: Tuple[Evolution, EvolutionLedger]):
        super().__init__(message)
        self.partial = partial


def work_integrals(evolution: Evolution, s: float, t: float) -> WorkIntegrals:
    """Work integrals over [s, t] with the field frozen on each time interval."""
    model, boundary = evolution.setup.model, evolution.setup.boundary
    total = WorkIntegrals()
    for i, (t0, t1) in enumerate(evolution.grid.intervals()):
        lo, hi = max(s, t0), min(t, t1)
        if hi > lo and i < evolution.n_completed:
            total = total + interval_work(evolution.field_at(i), model, boundary, lo, hi)
    return total


def _row(problem: StepProblem, solution: StepSolution, crack: CrackSet,
         previous: Optional[Tuple[StepSolution, LedgerRow]], setup: EvolutionSetup) -> LedgerRow:
    model, boundary, mesh = setup.model, setup.boundary, setup.mesh
    t, u = problem.t, solution.field
    bulk, body, traction = bulk_energy(u, model), body_work(t, u, model), surface_work(t, u, model)
    surface = crack.surface_energy(model.surface_density)
    norms = lp_norms(u, model)
    g_competitor = problem.evaluate(problem.g_field.to_discrete(solution.adaptive)).objective
    row = LedgerRow(
        step=problem.index, t=t, bulk=bulk, body=body, traction=traction, surface=surface,
        total=bulk - body - traction + surface, crack_length=crack.total_length,
        step_objective=solution.objective, g_competitor=g_competitor,
        grad_p=norms['grad_p'], u_q=norms['u_q'],
    )
    if previous is None:
        return row

    prev_solution, prev_row = previous
    u_prev = prev_solution.field
    work = interval_work(u_prev, model, boundary, prev_row.t, t)
    increment = (boundary.interpolant(mesh, t).to_discrete(u_prev.adaptive)
                 - boundary.interpolant(mesh, prev_row.t).to_discrete(u_prev.adaptive))
    remainders = step_remainders(u_prev, increment, model, t, work)
    cumulative = prev_row.work + work
    row.W_work, row.Fdot, row.F_work, row.Gdot, row.G_work = (
        cumulative.W_work, cumulative.Fdot, cumulative.F_work, cumulative.Gdot, cumulative.G_work)
    row.e_term = float(sum(abs(r) for r in remainders))
    row.e_cumulative = prev_row.e_cumulative + row.e_term
    row.e_term_sampled = sampled_remainder(u_prev, increment, model, t, setup.theta_samples)
    row.comparison_slack = problem.evaluate(u_prev + increment).objective - solution.objective
    return row


StepHook = Callable[[StepProblem, StepSolution], None]


def run_evolution(setup: EvolutionSetup, metrics: Optional[MetricsCollector] = None,
                  progress: bool = False, on_step: Optional[StepHook] = None) -> Tuple[Evolution, EvolutionLedger]:
    """
    Solve step 0 against the initial crack, then every later step against the
    accumulated crack. ``on_step`` sees each step problem with its solution.
    """
    metrics = metrics or MetricsCollector()
    initial = approximate_initial_crack(setup.initial_crack, setup.mesh, setup.a)
    evolution = Evolution(setup, initial)
    ledger = EvolutionLedger()
    crack, params, locked = initial.crack_set, initial.params, initial.locked_edges
    previous: Optional[Tuple[StepSolution, LedgerRow]] = None

    knots = list(enumerate(setup.grid.knots))
    for i, t in tqdm(knots, desc="steps", unit="step", disable=not progress):
        problem = StepProblem(i, float(t), setup.mesh, setup.model, setup.boundary, crack, params,
                              locked, setup.settings)
        started = time.perf_counter()
        try:
            with structured_logger.operation_context("evolution_step", step=i, t=float(t)), \
                    PerformanceTimer("step", metrics, step=i):
                solution = solve_step(problem, metrics)
        except SimulationError as exc:
            logger.error(f"Step {i} at t={t:.6g} failed: {exc}")
            raise EvolutionAborted(f"step {i} at t={t:.6g} failed: {exc}", (evolution, ledger)) from exc

        crack = crack | solution.crack
        params = solution.params
        locked = locked | frozenset(e for s in solution.realized for e in solution.adaptive.knot_edges_of(s))
        row = _row(problem, solution, crack, previous, setup)
        evolution.solutions.append(solution)
        evolution.cracks.append(crack)
        ledger.append(row)
        previous = (solution, row)

        solution.diagnostics['wall_time'] = time.perf_counter() - started
        if on_step is not None:
            on_step(problem, solution)
        metrics.increment("steps")
        logger.debug(f"Step {i}: t={t:.6g} objective={solution.objective:.12g} "
                     f"crack={crack.total_length:.6g} total={row.total:.12g}")

    logger.info(f"Evolution finished: {len(ledger)} steps, final crack length {crack.total_length:.6g}")
    return evolution, ledger


__all__ = [
    'EvolutionSetup',
    'Evolution',
    'EvolutionAborted',
    'work_integrals',
    'run_evolution',
]
