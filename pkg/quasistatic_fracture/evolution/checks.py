"""
Post-run checks: irreversibility, the discrete energy inequality, the
a-priori bound and the boundary-competitor bound.
"""

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

from infrastructure.utilities.logger import get_logger

from ..crack.crack_set import CrackSet
from ..model.densities import SurfaceDensity
from ..model.energies import CoercivityConstants
from .driver import Evolution
from .ledger import EvolutionLedger

logger = get_logger(__name__)

INEQUALITY_TOL = 1e-9


def check_irreversibility(evolution: Union[Evolution, Sequence[CrackSet]]) -> bool:
    """Every crack set contains the previous one as an exact edge set."""
    cracks = evolution.cracks if isinstance(evolution, Evolution) else list(evolution)
    for i in range(len(cracks) - 1):
        if not cracks[i].issubset(cracks[i + 1]):
            logger.warning(f"Irreversibility violated between steps {i} and {i + 1}")
            return False
    return True


@dataclass
class InequalityReport:
    tol: float
    n_pairs: int = 0
    worst_margin: float = -math.inf
    worst_pair: Optional[Tuple[int, int]] = None
    failures: List[Tuple[int, int, float]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


def check_energy_inequality(ledger: EvolutionLedger, tol: float = INEQUALITY_TOL) -> InequalityReport:
    """
    For every j <= i: E(t_i) <= E(t_j) + net work on [t_j, t_i] + accumulated e-term,
    up to tol * (1 + |E(t_i)|). The margin is the left side minus the right side.
    """
    report = InequalityReport(tol)
    rows = ledger.rows
    for i, ri in enumerate(rows):
        for j in range(i + 1):
            rj = rows[j]
            rhs = rj.total + (ri.work.rhs - rj.work.rhs) + (ri.e_cumulative - rj.e_cumulative)
            margin = ri.total - rhs
            report.n_pairs += 1
            if margin > report.worst_margin:
                report.worst_margin, report.worst_pair = margin, (j, i)
            if margin > tol * (1.0 + abs(ri.total)):
                report.failures.append((j, i, margin))
    if not rows:
        report.worst_margin = 0.0
    logger.info(f"Energy inequality: {report.n_pairs} pairs, worst margin {report.worst_margin:.3e}, "
                f"{len(report.failures)} failures")
    return report


@dataclass
class AprioriReport:
    norm_bound: float
    length_bounds: List[float]
    norms: List[float]
    lengths: List[float]
    asserted: bool

    @property
    def passed(self) -> bool:
        if not self.asserted:
            return True
        return (all(n <= self.norm_bound * (1 + 1e-9) + 1e-12 for n in self.norms)
                and all(l <= b * (1 + 1e-9) + 1e-12 for l, b in zip(self.lengths, self.length_bounds)))


def check_apriori_bound(ledger: EvolutionLedger, constants: CoercivityConstants,
                        density: SurfaceDensity, initial_surface: float) -> AprioriReport:
    """
    Norms and crack length of every step against the bounds obtained by
    comparing each step with the boundary interpolant.
    """
    beta = constants.beta0
    rows = ledger.rows
    norms = [r.grad_p + (r.u_q if constants.controls_displacement else 0.0) for r in rows]
    lengths = [r.crack_length for r in rows]
    if not rows or math.isinf(beta) or constants.alpha0 <= 0:
        return AprioriReport(math.inf, [math.inf] * len(rows), norms, lengths, False)

    norm_bound = (max(r.g_competitor for r in rows) + beta) / constants.alpha0
    k1, _ = density.bounds
    length_bounds, paid = [], initial_surface
    for r in rows:
        paid += max(0.0, r.g_competitor + beta)
        length_bounds.append(paid / k1)
    return AprioriReport(norm_bound, length_bounds, norms, lengths, True)


def check_g_competitor(ledger: EvolutionLedger, tol: float = INEQUALITY_TOL) -> bool:
    """The step objective never exceeds the objective of the boundary interpolant."""
    return all(r.step_objective <= r.g_competitor + tol * (1.0 + abs(r.g_competitor)) for r in ledger)


__all__ = [
    'INEQUALITY_TOL',
    'InequalityReport',
    'AprioriReport',
    'check_irreversibility',
    'check_energy_inequality',
    'check_apriori_bound',
    'check_g_competitor',
]
