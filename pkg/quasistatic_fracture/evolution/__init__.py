"""
Discrete evolution: time grid, driver, energy ledger, checks and refinement studies.
"""

from .time_grid import TimeGrid
from .ledger import COLUMNS, EvolutionLedger, LedgerRow, WorkIntegrals, interval_work
from .driver import Evolution, EvolutionAborted, EvolutionSetup, run_evolution, work_integrals
from .checks import (
    AprioriReport,
    InequalityReport,
    check_apriori_bound,
    check_energy_inequality,
    check_g_competitor,
    check_irreversibility,
)
from .study import StudyReport, cross_mesh_gradient_difference, refinement_study

__all__ = [
    'TimeGrid',
    'COLUMNS',
    'EvolutionLedger',
    'LedgerRow',
    'WorkIntegrals',
    'interval_work',
    'Evolution',
    'EvolutionAborted',
    'EvolutionSetup',
    'run_evolution',
    'work_integrals',
    'AprioriReport',
    'InequalityReport',
    'check_apriori_bound',
    'check_energy_inequality',
    'check_g_competitor',
    'check_irreversibility',
    'StudyReport',
    'cross_mesh_gradient_difference',
    'refinement_study',
]
