"""
JSON output of meshes, fields, crack sets and run summaries.
"""

import json
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np

from infrastructure.utilities.logger import get_logger

from ..crack.crack_set import CrackSet
from ..fespace.field import DiscreteField
from ..mesh.adaptive import AdaptiveTriangulation
from ..mesh.domain import BoundaryLabel, Region
from ..mesh.triangulation import RegularTriangulation
from ..model.densities import SurfaceDensity

logger = get_logger(__name__)


def _default(value: Any):
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (np.ndarray, frozenset, set, tuple)):
        return sorted(value) if isinstance(value, (frozenset, set)) else list(value)
    return str(value)


def dump_json(path: Union[str, Path], payload: Dict[str, Any]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True, default=_default) + "\n")
    return path


def mesh_payload(mesh: Union[RegularTriangulation, AdaptiveTriangulation]) -> Dict[str, Any]:
    """Vertices, triangles, edges and their labels; sub-edges for an adaptive triangulation."""
    if isinstance(mesh, AdaptiveTriangulation):
        edges, labels = mesh.sub_edges, mesh.sub_edge_labels
        extra = {'a': mesh.a, 'knots': mesh.params.t.tolist(), 'crackable': mesh.crackable.tolist()}
    else:
        edges, labels = mesh.edges, mesh.edge_labels
        extra = {}
    return {
        'eps': float(mesh.eps),
        'vertices': mesh.vertices.tolist(),
        'triangles': mesh.triangles.tolist(),
        'regions': [Region(int(r)).name.lower() for r in mesh.regions],
        'edges': edges.tolist(),
        'edge_labels': [BoundaryLabel(int(v)).name.lower() for v in labels],
        **extra,
    }


def write_mesh_json(path: Union[str, Path], mesh: Union[RegularTriangulation, AdaptiveTriangulation]) -> Path:
    return dump_json(path, mesh_payload(mesh))


def field_payload(u: DiscreteField, step: Optional[int] = None, t: Optional[float] = None) -> Dict[str, Any]:
    """Corner values and constant gradients per subtriangle; corners are not shared across cracks."""
    adaptive = u.adaptive
    return {
        'step': step,
        't': t,
        'corners': adaptive.vertices[adaptive.triangles].tolist(),
        'values': u.values.tolist(),
        'gradients': u.gradients.tolist(),
    }


def write_field_json(path: Union[str, Path], u: DiscreteField, step: Optional[int] = None,
                     t: Optional[float] = None) -> Path:
    return dump_json(path, field_payload(u, step, t))


def crack_payload(step: int, t: float, crack: CrackSet, density: SurfaceDensity) -> Dict[str, Any]:
    return {
        'step': int(step),
        't': float(t),
        'length': crack.total_length,
        'surface_energy': crack.surface_energy(density),
        'edges': crack.to_records(),
        'polylines': [[list(p) for p in chain] for chain in crack.polylines()],
    }


def write_crack_json(path: Union[str, Path], step: int, t: float, crack: CrackSet,
                     density: SurfaceDensity) -> Path:
    """Crack edges with endpoints and the step that first opened them (null for the initial crack)."""
    path = dump_json(path, crack_payload(step, t, crack, density))
    logger.debug(f"Wrote {len(crack)} crack edges to {path}")
    return path


def read_json(path: Union[str, Path]) -> Dict[str, Any]:
    return json.loads(Path(path).read_text())


def write_summary(path: Union[str, Path], summary: Dict[str, Any]) -> Path:
    return dump_json(path, summary)


__all__ = [
    'dump_json',
    'mesh_payload',
    'write_mesh_json',
    'field_payload',
    'write_field_json',
    'crack_payload',
    'write_crack_json',
    'read_json',
    'write_summary',
]
