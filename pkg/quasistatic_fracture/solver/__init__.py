"""
Step solvers: elastic minimisation, exhaustive oracle, heuristic and audit.
"""

from .problem import Evaluation, SolverSettings, StepProblem, StepSolution
from .elastic import ElasticResult, ElasticSolver, FloatingComponentWarning, SolveFailure, elastic_solve
from .oracle import EnumerationCapExceeded, nucleation_threshold, step_minimize_exact
from .heuristic import solve_step, step_minimize_heuristic
from .audit import AuditReport, CompetitorSampler, minimality_audit

__all__ = [
    'Evaluation',
    'SolverSettings',
    'StepProblem',
    'StepSolution',
    'ElasticResult',
    'ElasticSolver',
    'FloatingComponentWarning',
    'SolveFailure',
    'elastic_solve',
    'EnumerationCapExceeded',
    'nucleation_threshold',
    'step_minimize_exact',
    'solve_step',
    'step_minimize_heuristic',
    'AuditReport',
    'CompetitorSampler',
    'minimality_audit',
]
