"""
Discrete approximation of the initial crack and the interpolation-error experiments.
"""

import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from infrastructure.utilities.logger import get_logger, log_function_call
from infrastructure.utilities.structured_logger import get_structured_logger, with_structured_logging

from ..fespace.dofs import assemble_dofs
from ..fespace.field import DiscreteField
from ..mesh.adaptive import AdaptiveParams, AdaptiveTriangulation, subdivide
from ..mesh.domain import make_domain, rectangle
from ..mesh.triangulation import RegularTriangulation, build_structured_mesh
from ..model.densities import SurfaceDensity
from .crack_set import CrackSet
from .interpolating_curve import InterpolatingCurve, Polyline, interpolating_curve

logger = get_logger(__name__)
structured_logger = get_structured_logger("crack")

# Fraction of eps for oblique chord anchors; keeps chords off mesh vertices.
OFF_LATTICE_SHIFT = 0.37


@dataclass(frozen=True, eq=False)
class InitialCrack:
    crack_set: CrackSet
    params: AdaptiveParams
    adaptive: AdaptiveTriangulation
    witness: DiscreteField
    locked_edges: frozenset
    curve: Optional[InterpolatingCurve] = None


def polyline_energy(polylines: Sequence[Polyline], density: SurfaceDensity) -> float:
    total = 0.0
    for line in polylines:
        pts = np.asarray(line, dtype=float).reshape(-1, 2)
        total += float(np.sum(density.segment_energy(pts[:-1], pts[1:])))
    return total


def _witness(adaptive: AdaptiveTriangulation, curve: InterpolatingCurve, crack_ids: Sequence[int]) -> DiscreteField:
    """Cut-off field: e1 on the left of the curve at non-tip crack nodes, 0 elsewhere."""
    if not crack_ids:
        return DiscreteField.zero(adaptive)
    dofs = assemble_dofs(adaptive, crack_ids)
    class_value = np.zeros(dofs.n_classes)
    nv = adaptive.base.n_vertices
    slot_class = dofs.slot_class.reshape(-1, 3)
    centroids = adaptive.vertices[adaptive.triangles].mean(axis=1)

    by_node = {}
    for sid in sorted(crack_ids):
        for node in adaptive.sub_edges[sid]:
            by_node.setdefault(int(node), []).append(sid)

    for node, edges in sorted(by_node.items()):
        if node >= nv and (node - nv) in curve.tip_edges:
            continue
        incident = np.argwhere(adaptive.triangles == node)  # (k, 2): triangle, corner
        classes = {int(slot_class[T, j]) for T, j in incident}
        if len(classes) < 2:
            continue
        sid = edges[0]
        e0, e1 = curve.sub_edge_ends.get(sid, tuple(adaptive.interior_knot_edges(sid)))
        p0, p1 = adaptive.vertices[nv + e0], adaptive.vertices[nv + e1]
        d = p1 - p0
        for side in (0, 1):
            T = adaptive.sub_edge_triangles[sid, side]
            if T < 0:
                continue
            c = centroids[T] - p0
            if d[0] * c[1] - d[1] * c[0] > 0:
                j = int(np.flatnonzero(adaptive.triangles[T] == node)[0])
                class_value[slot_class[T, j]] = 1.0
    values = np.zeros((adaptive.n_triangles, 3, 2))
    values[..., 0] = class_value[slot_class]
    return DiscreteField(adaptive, values, frozenset(crack_ids))


def approximate_initial_crack(polylines: Sequence[Polyline], tri: RegularTriangulation, a: float,
                              base_params: Optional[AdaptiveParams] = None) -> InitialCrack:
    """Gamma0_{eps,a}: the interpolating curve of Gamma0 with a witness field jumping on it."""
    with structured_logger.operation_context("approximate_initial_crack", eps=tri.eps, a=a,
                                             polylines=len(polylines)):
        if not polylines:
            params = base_params or AdaptiveParams.uniform(tri, a)
            adaptive = subdivide(tri, params)
            return InitialCrack(CrackSet.empty(), params, adaptive, DiscreteField.zero(adaptive), frozenset())

        curve = interpolating_curve(polylines, tri, a)
        params = curve.params(tri.n_edges, base_params)
        adaptive = subdivide(tri, params)
        crack = CrackSet.from_sub_edges(adaptive, curve.sub_edges, step=None)
        locked = frozenset(e for sid in curve.sub_edges for e in adaptive.knot_edges_of(sid))
        witness = _witness(adaptive, curve, curve.sub_edges)

    logger.info(f"Initial crack: {len(crack)} edges, length {crack.total_length:.6g}")
    return InitialCrack(crack, params, adaptive, witness, locked, curve)


@log_function_call()
def initial_crack_study(polylines: Sequence[Polyline], mesh_for: Callable[[float], RegularTriangulation],
                        pairs: Sequence[Tuple[float, float]], density: SurfaceDensity) -> pd.DataFrame:
    """Surface-energy error of Gamma0_{eps,a} against Gamma0 along a refinement sequence."""
    reference = polyline_energy(polylines, density)
    rows = []
    for eps, a in pairs:
        approx = approximate_initial_crack(polylines, mesh_for(eps), a)
        energy = approx.crack_set.surface_energy(density)
        rows.append({
            'eps': eps,
            'a': a,
            'energy': energy,
            'reference': reference,
            'abs_error': abs(energy - reference),
            'rel_error': abs(energy - reference) / reference if reference else 0.0,
        })
    return pd.DataFrame(rows)


def clip_line_to_box(point: Sequence[float], angle_deg: float,
                     box: Tuple[float, float, float, float] = (0.0, 0.0, 1.0, 1.0)) -> np.ndarray:
    """Chord of the line through ``point`` at ``angle_deg`` inside the box."""
    p = np.asarray(point, dtype=float)
    theta = math.radians(angle_deg)
    d = np.array([math.cos(theta), math.sin(theta)])
    lo, hi = -math.inf, math.inf
    for k, (b0, b1) in enumerate(((box[0], box[2]), (box[1], box[3]))):
        if abs(d[k]) < 1e-15:
            if not (b0 <= p[k] <= b1):
                raise ValueError(f"line misses the box {box}")
            continue
        s0, s1 = (b0 - p[k]) / d[k], (b1 - p[k]) / d[k]
        lo, hi = max(lo, min(s0, s1)), min(hi, max(s0, s1))
    return np.array([p + lo * d, p + hi * d])


def chord_anchor(angle_deg: float, eps: float) -> Tuple[float, float]:
    """Mid-cell anchor for axis-aligned chords, an off-lattice one otherwise."""
    if angle_deg % 180.0 == 0.0:
        return 0.5, 0.5 + 0.5 * eps
    if angle_deg % 180.0 == 90.0:
        return 0.5 + 0.5 * eps, 0.5
    return 0.5, 0.5 + OFF_LATTICE_SHIFT * eps


@with_structured_logging("crack")
def interpolation_error_table(angles: Sequence[float], eps_list: Sequence[float], a_list: Sequence[float],
                              point: Optional[Sequence[float]] = None,
                              density: Optional[SurfaceDensity] = None) -> pd.DataFrame:
    """Relative surface-energy error of interpolating curves of straight chords of the unit square."""
    density = density or SurfaceDensity()
    domain = make_domain(rectangle(0.0, 0.0, 1.0, 1.0))
    rows: List[dict] = []
    for eps in eps_list:
        mesh = build_structured_mesh(domain, eps)
        for angle in angles:
            chord = clip_line_to_box(point if point is not None else chord_anchor(angle, eps), angle)
            reference = polyline_energy([chord], density)
            for a in a_list:
                curve = interpolating_curve([chord], mesh, a)
                approx = polyline_energy(curve.projected, density)
                rows.append({
                    'angle': angle,
                    'eps': eps,
                    'a': a,
                    'reference': reference,
                    'approx': approx,
                    'rel_error': abs(approx - reference) / reference,
                })
    return pd.DataFrame(rows)


def fitted_constant(table: pd.DataFrame) -> float:
    """Smallest C with rel_error <= C a over the table."""
    return float((table['rel_error'] / table['a']).max()) if len(table) else 0.0


__all__ = [
    'OFF_LATTICE_SHIFT',
    'InitialCrack',
    'polyline_energy',
    'approximate_initial_crack',
    'initial_crack_study',
    'clip_line_to_box',
    'chord_anchor',
    'interpolation_error_table',
    'fitted_constant',
]
