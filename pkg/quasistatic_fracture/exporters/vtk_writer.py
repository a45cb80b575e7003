"""
Legacy ASCII VTK output of triangulations and discontinuous fields.

In field files every subtriangle gets its own three points so jumps across
cracks stay visible; displacements are written as point vectors, region,
gradient components and bulk energy density as cell scalars.
"""

from pathlib import Path
from typing import Dict, List, Optional, Union

import numpy as np

from infrastructure.utilities.logger import get_logger

from ..fespace.field import DiscreteField
from ..mesh.adaptive import AdaptiveTriangulation
from ..mesh.triangulation import RegularTriangulation
from ..model.energies import EnergyModel

logger = get_logger(__name__)

FLOAT = "{:.17g}"


def _fmt(values) -> str:
    return " ".join(FLOAT.format(float(v)) for v in values)


def _header(title: str, points: np.ndarray, triangles: np.ndarray) -> List[str]:
    lines = ["# vtk DataFile Version 3.0", title.replace("\n", " ")[:255], "ASCII", "DATASET POLYDATA",
             f"POINTS {len(points)} double"]
    lines.extend(_fmt((x, y, 0.0)) for x, y in points)
    lines.append(f"POLYGONS {len(triangles)} {4 * len(triangles)}")
    lines.extend(f"3 {a} {b} {c}" for a, b, c in triangles)
    return lines


def _write(path: Path, lines: List[str]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n")
    return path


def write_mesh_vtk(path: Union[str, Path], mesh: Union[RegularTriangulation, AdaptiveTriangulation],
                   title: str = "quasistatic fracture mesh") -> Path:
    """Triangles with shared vertices and the region label of each triangle."""
    lines = _header(title, mesh.vertices, mesh.triangles)
    lines.extend([f"CELL_DATA {len(mesh.triangles)}", "SCALARS region int 1", "LOOKUP_TABLE default"])
    lines.extend(str(int(r)) for r in mesh.regions)
    path = _write(Path(path), lines)
    logger.debug(f"Wrote mesh with {len(mesh.triangles)} triangles to {path}")
    return path


def write_field_vtk(path: Union[str, Path], u: DiscreteField, model: Optional[EnergyModel] = None,
                    title: str = "quasistatic fracture field",
                    cell_scalars: Optional[Dict[str, np.ndarray]] = None) -> Path:
    """Write u as POLYDATA with one polygon per subtriangle."""
    adaptive = u.adaptive
    n = adaptive.n_triangles
    points = adaptive.vertices[adaptive.triangles].reshape(-1, 2)
    values = u.values.reshape(-1, 2)
    gradients = u.gradients

    scalars = {'region': adaptive.regions.astype(float)}
    for c, d in ((0, 0), (0, 1), (1, 0), (1, 1)):
        scalars[f"du{c + 1}_d{'xy'[d]}"] = gradients[:, c, d]
    if model is not None:
        scalars['bulk_density'] = model.bulk.energy(gradients)
    scalars.update(cell_scalars or {})

    lines = _header(title, points, np.arange(3 * n).reshape(n, 3))
    lines.append(f"POINT_DATA {len(points)}")
    lines.append("VECTORS displacement double")
    lines.extend(_fmt((a, b, 0.0)) for a, b in values)
    lines.append(f"CELL_DATA {n}")
    for name, data in scalars.items():
        lines.append(f"SCALARS {name} double 1")
        lines.append("LOOKUP_TABLE default")
        lines.extend(FLOAT.format(float(v)) for v in np.asarray(data).ravel())

    path = _write(Path(path), lines)
    logger.debug(f"Wrote {n} cells to {path}")
    return path


__all__ = ['write_mesh_vtk', 'write_field_vtk']
