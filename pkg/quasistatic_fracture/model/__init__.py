"""
Model package: formulas, densities, quadrature and energy functionals.
"""

from .expressions import Expression, FormulaError, VectorExpression
from .densities import (
    BodyPotential,
    BulkDensity,
    DegenerateModel,
    SurfaceDensity,
    SurfacePotential,
    conjugate_exponent,
    young_constant,
)
from .quadrature import EDGE_RULE, TIME_RULE, QuadratureRule, time_nodes, triangle_rule
from .energies import (
    CoercivityConstants,
    DerivativeActions,
    EnergyModel,
    body_work,
    bulk_energy,
    coercivity_constants,
    derivative_actions,
    elastic_energy,
    lp_norms,
    surface_work,
    total_energy,
    trace_constant,
)

__all__ = [
    'Expression',
    'FormulaError',
    'VectorExpression',
    'BodyPotential',
    'BulkDensity',
    'DegenerateModel',
    'SurfaceDensity',
    'SurfacePotential',
    'conjugate_exponent',
    'young_constant',
    'EDGE_RULE',
    'TIME_RULE',
    'QuadratureRule',
    'time_nodes',
    'triangle_rule',
    'CoercivityConstants',
    'DerivativeActions',
    'EnergyModel',
    'body_work',
    'bulk_energy',
    'coercivity_constants',
    'derivative_actions',
    'elastic_energy',
    'lp_norms',
    'surface_work',
    'total_energy',
    'trace_constant',
]
