"""
Mesh package: domains, structured regular triangulations and adaptive subdivision.
"""

from .domain import (
    BoundaryLabel,
    BoundarySegment,
    DomainError,
    DomainSpec,
    NonConformingDomain,
    Region,
    make_domain,
    rectangle,
)
from .triangulation import (
    RegularTriangulation,
    RegularityReport,
    build_structured_mesh,
    check_regularity,
    triangle_measures,
)
from .adaptive import (
    AdaptiveParams,
    AdaptiveTriangulation,
    ParamOutOfRange,
    adaptive_regularity_constants,
    subdivide,
)

__all__ = [
    'BoundaryLabel',
    'BoundarySegment',
    'DomainError',
    'DomainSpec',
    'NonConformingDomain',
    'Region',
    'make_domain',
    'rectangle',
    'RegularTriangulation',
    'RegularityReport',
    'build_structured_mesh',
    'check_regularity',
    'triangle_measures',
    'AdaptiveParams',
    'AdaptiveTriangulation',
    'ParamOutOfRange',
    'adaptive_regularity_constants',
    'subdivide',
]
