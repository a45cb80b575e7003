"""
Refinement studies: runs over a sequence of (eps, a, delta) and Cauchy-style
difference tables of energies, crack lengths and gradients.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.spatial import cKDTree

from infrastructure.utilities.logger import get_logger
from infrastructure.utilities.structured_logger import get_structured_logger

from config import get_study_config

from ..crack.initial import polyline_energy
from ..fespace.field import DiscreteField
from ..model.energies import elastic_energy
from ..model.quadrature import triangle_points, triangle_rule
from .driver import Evolution, EvolutionSetup, run_evolution

logger = get_logger(__name__)
structured_logger = get_structured_logger("study")

Triple = Tuple[float, float, float]


def locate_or_snap(adaptive, points: np.ndarray) -> np.ndarray:
    """Triangle index per point; points the trifinder misses go to the nearest centroid."""
    located = np.asarray(adaptive.trifinder(points[:, 0], points[:, 1]), dtype=np.int64)
    missed = located < 0
    if missed.any():
        centroids = adaptive.vertices[adaptive.triangles].mean(axis=1)
        _, nearest = cKDTree(centroids).query(points[missed])
        located[missed] = nearest
        logger.debug(f"Snapped {int(missed.sum())} of {len(points)} quadrature points "
                     f"to the nearest coarse triangle")
    return located


def cross_mesh_gradient_difference(fine: DiscreteField, coarse: DiscreteField, p: float = 2.0,
                                   n_points: Optional[int] = None) -> float:
    """
    ||grad fine - grad coarse||_p with quadrature on the fine subtriangles and
    the coarse gradient located pointwise.
    """
    rule = triangle_rule(n_points or get_study_config()['cross_mesh_points'])
    adaptive = fine.adaptive
    points = triangle_points(adaptive.vertices, adaptive.triangles, rule)  # (n, nq, 2)
    flat = points.reshape(-1, 2)
    located = locate_or_snap(coarse.adaptive, flat)
    weights = (adaptive.areas[:, None] * rule.weights[None, :]).ravel()
    fine_grad = np.repeat(fine.gradients, len(rule.weights), axis=0)
    diff = fine_grad - coarse.gradients[located]
    norm = np.sqrt(np.sum(diff ** 2, axis=(1, 2)))
    return float(np.sum(weights * norm ** p) ** (1.0 / p))


@dataclass
class StudyReport:
    table: pd.DataFrame
    initial_table: pd.DataFrame
    flags: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.flags


def _sample_times(horizon: float, count: int) -> np.ndarray:
    return np.linspace(0.0, horizon, count)


def _rows(triple: Triple, evolution: Evolution, times: np.ndarray) -> List[Dict]:
    eps, a, delta = triple
    model = evolution.setup.model
    rows = []
    for t in times:
        u, crack = evolution.state_at(float(t))
        elastic = elastic_energy(float(t), u, model)
        surface = crack.surface_energy(model.surface_density)
        rows.append({
            'eps': eps, 'a': a, 'delta': delta, 't': float(t),
            'elastic': elastic, 'surface': surface, 'total': elastic + surface,
            'crack_length': crack.total_length,
        })
    return rows


def refinement_study(setup_for: Callable[[float, float, float], EvolutionSetup], sequence: Sequence[Triple],
                     sample_times: Optional[int] = None, max_workers: Optional[int] = None,
                     compare_gradients: bool = True) -> StudyReport:
    """Run the evolution per (eps, a, delta) and tabulate successive differences at sampled times."""
    study = get_study_config()
    sequence = [tuple(float(v) for v in triple) for triple in sequence]
    setups = [setup_for(*triple) for triple in sequence]
    horizon = setups[0].grid.horizon
    times = _sample_times(horizon, sample_times or study['sample_times'])

    def run(setup: EvolutionSetup) -> Evolution:
        with structured_logger.operation_context("study_run", eps=setup.mesh.eps, a=setup.a,
                                                 delta=setup.grid.delta):
            return run_evolution(setup)[0]

    workers = max_workers or study['max_workers']
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            evolutions = list(pool.map(run, setups))
    else:
        evolutions = [run(s) for s in setups]

    frames = [pd.DataFrame(_rows(triple, evo, times)) for triple, evo in zip(sequence, evolutions)]
    for n in range(1, len(frames)):
        prev, cur = frames[n - 1], frames[n]
        for column in ('elastic', 'surface', 'total', 'crack_length'):
            cur[f'd_{column}'] = (cur[column] - prev[column]).abs().to_numpy()
        if compare_gradients:
            p = evolutions[n].setup.model.bulk.p
            cur['grad_diff'] = [
                cross_mesh_gradient_difference(evolutions[n].state_at(float(t))[0],
                                               evolutions[n - 1].state_at(float(t))[0], p)
                for t in times
            ]
    table = pd.concat(frames, ignore_index=True)

    initial_rows = []
    for triple, evo in zip(sequence, evolutions):
        density = evo.setup.model.surface_density
        reference = polyline_energy(evo.setup.initial_crack, density)
        energy = evo.initial.crack_set.surface_energy(density)
        initial_rows.append({'eps': triple[0], 'a': triple[1], 'delta': triple[2], 'energy': energy,
                             'reference': reference, 'abs_error': abs(energy - reference)})
    report = StudyReport(table, pd.DataFrame(initial_rows))
    report.flags.extend(monotonicity_flags(frames))
    for flag in report.flags:
        logger.warning(flag)
    return report


def monotonicity_flags(frames: Sequence[pd.DataFrame]) -> List[str]:
    """Sampled times where the last successive difference exceeds the one before."""
    flags = []
    if len(frames) < 3:
        return flags
    earlier, last = frames[-2], frames[-1]
    for column in ('d_elastic', 'd_surface'):
        for k, t in enumerate(last['t']):
            if last[column].iloc[k] > earlier[column].iloc[k] + 1e-12:
                flags.append(f"{column} increased at t={t:.6g}: "
                             f"{earlier[column].iloc[k]:.6g} -> {last[column].iloc[k]:.6g}")
    return flags


__all__ = ['locate_or_snap', 'cross_mesh_gradient_difference', 'StudyReport', 'refinement_study', 'monotonicity_flags']
