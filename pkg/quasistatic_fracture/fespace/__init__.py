"""
Discontinuous piecewise-affine spaces on adaptive triangulations.
"""

from .field import DiscreteField, barycentric
from .boundary import BoundaryDeformation, ContinuousField, nodal_interpolant
from .dofs import DofMap, assemble_dofs
from .jumps import JUMP_TOL, combined_jump, dirichlet_mismatch, jump_set
from .interpolation import InterpolationResult, JumpTarget, interpolate_to_fespace

__all__ = [
    'DiscreteField',
    'barycentric',
    'BoundaryDeformation',
    'ContinuousField',
    'nodal_interpolant',
    'DofMap',
    'assemble_dofs',
    'JUMP_TOL',
    'combined_jump',
    'dirichlet_mismatch',
    'jump_set',
    'InterpolationResult',
    'JumpTarget',
    'interpolate_to_fespace',
]
