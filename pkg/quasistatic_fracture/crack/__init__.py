"""
Crack package: crack sets, interpolating curves and initial-crack approximation.
"""

from .crack_set import (
    CrackEdge,
    CrackOutsideBrittle,
    CrackSet,
    incremental_surface_energy,
    surface_energy,
    sub_edge_key,
)
from .interpolating_curve import InterpolatingCurve, NonGenericPosition, interpolating_curve
from .initial import (
    InitialCrack,
    approximate_initial_crack,
    chord_anchor,
    clip_line_to_box,
    fitted_constant,
    initial_crack_study,
    interpolation_error_table,
    polyline_energy,
)

__all__ = [
    'CrackEdge',
    'CrackOutsideBrittle',
    'CrackSet',
    'incremental_surface_energy',
    'surface_energy',
    'sub_edge_key',
    'InterpolatingCurve',
    'NonGenericPosition',
    'interpolating_curve',
    'InitialCrack',
    'approximate_initial_crack',
    'chord_anchor',
    'clip_line_to_box',
    'fitted_constant',
    'initial_crack_study',
    'interpolation_error_table',
    'polyline_energy',
]
