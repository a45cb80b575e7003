"""
Energy functionals on discrete fields: bulk, body work, surface work, their
derivatives and the coercivity constants of the elastic energy.
"""

import itertools
import math
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np

from infrastructure.utilities.logger import get_logger

from ..mesh.domain import BoundaryLabel
from ..mesh.triangulation import RegularTriangulation
from .densities import (
    BodyPotential,
    BulkDensity,
    DegenerateModel,
    SurfaceDensity,
    SurfacePotential,
    conjugate_exponent,
    young_constant,
)
from .quadrature import EDGE_RULE, QuadratureRule, edge_points, triangle_points, triangle_rule

logger = get_logger(__name__)

SUP_SAMPLES = 64


@dataclass(frozen=True)
class EnergyModel:
    bulk: BulkDensity = field(default_factory=BulkDensity)
    body: BodyPotential = field(default_factory=BodyPotential)
    surface_potential: SurfacePotential = field(default_factory=SurfacePotential)
    surface_density: SurfaceDensity = field(default_factory=SurfaceDensity)
    quadrature_points: int = 3
    allow_degenerate: bool = False

    def __post_init__(self):
        triangle_rule(self.quadrature_points)
        self.surface_potential.trace_exponent(self.bulk.p)

    @property
    def rule(self) -> QuadratureRule:
        return triangle_rule(self.quadrature_points)

    @property
    def is_quadratic(self) -> bool:
        """Quadratic bulk and at most quadratic confinement: elastic solves are linear."""
        return self.bulk.is_quadratic and self.body.is_quadratic

    @property
    def has_forces(self) -> bool:
        return not (self.body.force.is_zero() and self.surface_potential.traction.is_zero())


def _quadrature(field, rule: QuadratureRule):
    adaptive = field.adaptive
    points = triangle_points(adaptive.vertices, adaptive.triangles, rule)
    values = field.at_barycentric(rule.points)
    weights = adaptive.areas[:, None] * rule.weights[None, :]
    return points, values, weights


def _traction_quadrature(field):
    adaptive = field.adaptive
    ids = adaptive.traction_ids
    if len(ids) == 0:
        return None
    nodes = adaptive.sub_edges[ids]
    p0, p1 = adaptive.vertices[nodes[:, 0]], adaptive.vertices[nodes[:, 1]]
    points = edge_points(p0, p1, EDGE_RULE)
    trace = field.trace(ids, side=0)
    s = EDGE_RULE.points[None, :, None]
    values = (1.0 - s) * trace[:, None, 0, :] + s * trace[:, None, 1, :]
    weights = adaptive.sub_edge_lengths[ids][:, None] * EDGE_RULE.weights[None, :]
    return points, values, weights


def bulk_energy(field, model: EnergyModel) -> float:
    """Sum over subtriangles of area * W(grad u)."""
    return float(np.dot(field.adaptive.areas, model.bulk.energy(field.gradients)))


def body_work(t: float, field, model: EnergyModel) -> float:
    points, values, weights = _quadrature(field, model.rule)
    return float(np.sum(weights * model.body.value(t, points, values)))


def surface_work(t: float, field, model: EnergyModel) -> float:
    quad = _traction_quadrature(field)
    if quad is None:
        return 0.0
    points, values, weights = quad
    return float(np.sum(weights * model.surface_potential.value(t, points, values)))


def elastic_energy(t: float, field, model: EnergyModel) -> float:
    return bulk_energy(field, model) - body_work(t, field, model) - surface_work(t, field, model)


def total_energy(t: float, field, crack, model: EnergyModel) -> float:
    """Elastic energy plus the surface energy of ``crack``."""
    return elastic_energy(t, field, model) + crack.surface_energy(model.surface_density)


def lp_norms(field, model: EnergyModel) -> Dict[str, float]:
    """||grad u||_p^p and ||u||_q^q with the model exponents."""
    _, values, weights = _quadrature(field, model.rule)
    grad_norm = np.sqrt(np.sum(field.gradients ** 2, axis=(1, 2)))
    return {
        'grad_p': float(np.dot(field.adaptive.areas, grad_norm ** model.bulk.p)),
        'u_q': float(np.sum(weights * np.sqrt(np.sum(values ** 2, axis=-1)) ** model.body.q)),
    }


@dataclass(frozen=True)
class DerivativeActions:
    """Pairings of the energy derivatives with a direction and the force rates."""
    W_pair: float
    F_pair: float
    G_pair: float
    F_rate: float
    G_rate: float


def derivative_actions(t: float, field, direction, model: EnergyModel) -> DerivativeActions:
    """
    <dW(grad u), grad psi>, <dF(t)(u), psi>, <dG(t)(u), psi>, Fdot(t)(u) and Gdot(t)(u).
    """
    areas = field.adaptive.areas
    w_pair = float(np.sum(areas[:, None, None] * model.bulk.gradient(field.gradients) * direction.gradients))

    points, values, weights = _quadrature(field, model.rule)
    psi = direction.at_barycentric(model.rule.points)
    f_pair = float(np.sum(weights[..., None] * model.body.gradient(t, points, values) * psi))
    f_rate = float(np.sum(weights * model.body.rate(t, points, values)))

    g_pair = g_rate = 0.0
    quad = _traction_quadrature(field)
    if quad is not None:
        e_points, e_values, e_weights = quad
        ids = field.adaptive.traction_ids
        trace = direction.trace(ids, side=0)
        s = EDGE_RULE.points[None, :, None]
        psi_e = (1.0 - s) * trace[:, None, 0, :] + s * trace[:, None, 1, :]
        potential = model.surface_potential
        g_pair = float(np.sum(e_weights[..., None] * potential.gradient(t, e_points, e_values) * psi_e))
        g_rate = float(np.sum(e_weights * potential.rate(t, e_points, e_values)))
    return DerivativeActions(w_pair, f_pair, g_pair, f_rate, g_rate)


def sup_norm(expression, mesh: RegularTriangulation, horizon: float, samples: int = SUP_SAMPLES) -> float:
    """Sampled sup over [0, T] x bounding box of |expression(t, x)|."""
    if expression.is_zero():
        return 0.0
    x0, y0 = mesh.vertices.min(axis=0)
    x1, y1 = mesh.vertices.max(axis=0)
    ts = np.linspace(0.0, horizon, samples)
    xs, ys = np.meshgrid(np.linspace(x0, x1, samples), np.linspace(y0, y1, samples))
    pts = np.column_stack([xs.ravel(), ys.ravel()])
    best = 0.0
    for t in ts:
        values = expression(t, pts)
        best = max(best, float(np.sqrt(np.sum(values ** 2, axis=-1)).max()))
    return best


def trace_constant(mesh: RegularTriangulation, a: float) -> float:
    """
    Constant gamma with int_{dS}|u| <= gamma (int_{Omega_S}|u| + |grad u|) for
    piecewise-affine u on any adaptive refinement with knots in [a, 1-a].

    Per corner subtriangle T' touching the traction boundary along length L,
    |u| <= avg_T'|u| + diam(T')|grad u|, so gamma >= L / |T'| and L diam(T') / |T'|.
    Knot parameters are scanned over {a, 1-a} on the three base edges.
    """
    traction = np.flatnonzero(mesh.edge_labels == BoundaryLabel.TRACTION)
    if len(traction) == 0:
        return 1.0
    is_traction = mesh.edge_labels == BoundaryLabel.TRACTION
    tris = np.unique(mesh.edge_triangles[traction, 0])
    gamma = 1.0
    for T in tris:
        v = mesh.vertices[mesh.triangles[T]]
        edges = mesh.tri_edges[T]
        for ts in itertools.product((a, 1.0 - a), repeat=3):
            # knot on local edge k at s_k along v_k -> v_{k+1}
            knots = [v[k] + ts[k] * (v[(k + 1) % 3] - v[k]) for k in range(3)]
            for k in range(3):
                corner = np.array([v[k], knots[k], knots[(k - 1) % 3]])
                length = 0.0
                if is_traction[edges[k]]:
                    length += np.linalg.norm(knots[k] - v[k])
                if is_traction[edges[(k - 1) % 3]]:
                    length += np.linalg.norm(knots[(k - 1) % 3] - v[k])
                if length == 0.0:
                    continue
                d1, d2 = corner[1] - corner[0], corner[2] - corner[0]
                area = 0.5 * abs(d1[0] * d2[1] - d1[1] * d2[0])
                diam = max(np.linalg.norm(corner[i] - corner[j]) for i, j in ((0, 1), (1, 2), (0, 2)))
                gamma = max(gamma, length / area, length * diam / area)
    return float(gamma)


@dataclass(frozen=True)
class CoercivityConstants:
    alpha0: float
    beta0: float
    alpha1: float
    beta1: float
    controls_displacement: bool
    sup_force: float
    sup_traction: float
    trace_constant: float

    def lower_bound(self, grad_p: float, u_q: float) -> float:
        """alpha0 (||grad u||_p^p + ||u||_q^q) - beta0"""
        if not self.controls_displacement:
            return self.alpha0 * grad_p - self.beta0
        return self.alpha0 * (grad_p + u_q) - self.beta0


def coercivity_constants(model: EnergyModel, mesh: RegularTriangulation, horizon: float,
                         a: float = 0.5) -> CoercivityConstants:
    """
    Constants with alpha0 (||grad u||_p^p + ||u||_q^q) - beta0 <= E_el(t)(u)
    <= alpha1 (...) + beta1, from Young's inequality and the traction trace constant.
    """
    mu, p = model.bulk.mu, model.bulk.p
    kappa, q = model.body.kappa, model.body.q
    sup_f = sup_norm(model.body.force, mesh, horizon)
    sup_l = sup_norm(model.surface_potential.traction, mesh, horizon)
    gamma = trace_constant(mesh, a) if sup_l > 0 else 1.0
    area = mesh.total_area
    area_s = float(mesh.areas[np.unique(
        mesh.edge_triangles[mesh.edge_labels == BoundaryLabel.TRACTION, 0])].sum())

    if kappa == 0.0:
        if not model.allow_degenerate:
            raise DegenerateModel(
                "kappa_F = 0 leaves the displacement uncontrolled; set allow_degenerate to acknowledge"
            )
        beta = math.inf if (sup_f > 0 or sup_l > 0) else 0.0
        logger.debug("Degenerate confinement: coercivity controls the gradient only")
        return CoercivityConstants(mu, beta, mu, beta, False, sup_f, sup_l, gamma)

    lam_f = 0.0 if sup_f == 0 else (0.5 * kappa if sup_l == 0 else 0.25 * kappa)
    lam_g = 0.25 * kappa if sup_l > 0 else 0.0
    lam_grad = 0.5 * mu if sup_l > 0 else 0.0

    beta = 0.0
    if sup_f > 0:
        beta += area * young_constant(q, lam_f) * sup_f ** conjugate_exponent(q)
    if sup_l > 0:
        load = sup_l * gamma
        beta += area_s * (young_constant(q, lam_g) * load ** conjugate_exponent(q)
                          + young_constant(p, lam_grad) * load ** conjugate_exponent(p))
    alpha0 = min(mu - lam_grad, kappa - lam_f - lam_g)
    alpha1 = max(mu + lam_grad, kappa + lam_f + lam_g)
    return CoercivityConstants(alpha0, beta, alpha1, beta, True, sup_f, sup_l, gamma)


__all__ = [
    'EnergyModel',
    'DerivativeActions',
    'CoercivityConstants',
    'bulk_energy',
    'body_work',
    'surface_work',
    'elastic_energy',
    'total_energy',
    'lp_norms',
    'derivative_actions',
    'sup_norm',
    'trace_constant',
    'coercivity_constants',
]
