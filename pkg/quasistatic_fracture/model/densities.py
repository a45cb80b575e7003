"""
Energy densities: bulk W, body-force potential F, surface-force potential G
and the surface density k, with their growth constants.
"""

import math
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np

from infrastructure.utilities.error_handling import SimulationError

from .expressions import VectorExpression

# Regularisation of |z|^2 inside derivatives of non-smooth powers
NORM_REG = 1e-24


class DegenerateModel(SimulationError):
    """Model parameters violate positivity, growth or norm requirements."""


def conjugate_exponent(q: float) -> float:
    return q / (q - 1.0)


def young_constant(q: float, lam: float) -> float:
    """c with |a.b| <= lam |b|^q + c |a|^q' for all vectors a, b."""
    if lam <= 0:
        return math.inf
    qc = conjugate_exponent(q)
    return (q * lam) ** (-qc / q) / qc


def _power_terms(z: np.ndarray, exponent: float):
    """|z|^2 (regularised), |z|^(exponent-2) and z z^T / |z|^2 for (..., d) vectors."""
    sq = np.sum(z * z, axis=-1) + NORM_REG
    scale = sq ** (0.5 * (exponent - 2.0))
    outer = z[..., :, None] * z[..., None, :] / sq[..., None, None]
    return sq, scale, outer


@dataclass(frozen=True)
class BulkDensity:
    """W(xi) = mu |xi|^p with the Frobenius norm."""
    variant: str = "quadratic"
    mu: float = 1.0
    p: float = 2.0

    def __post_init__(self):
        if self.variant not in ("quadratic", "p_norm"):
            raise DegenerateModel(f"unknown bulk variant {self.variant!r}")
        if self.variant == "quadratic" and self.p != 2.0:
            object.__setattr__(self, "p", 2.0)
        if not self.mu > 0:
            raise DegenerateModel(f"bulk stiffness mu must be positive, got {self.mu}")
        if not self.p > 1:
            raise DegenerateModel(f"bulk exponent p must exceed 1, got {self.p}")

    @property
    def is_quadratic(self) -> bool:
        return self.p == 2.0

    @property
    def growth_constants(self) -> Dict[str, float]:
        return {'a0': self.mu, 'a1': self.mu, 'a2': self.p * self.mu, 'b0': 0.0, 'b1': 0.0, 'b2': 0.0}

    def energy(self, xi: np.ndarray) -> np.ndarray:
        """W at (..., 2, 2) gradients."""
        norm = np.sqrt(np.sum(xi * xi, axis=(-2, -1)))
        return self.mu * norm ** self.p

    def gradient(self, xi: np.ndarray) -> np.ndarray:
        flat = xi.reshape(xi.shape[:-2] + (4,))
        if self.is_quadratic:
            return 2.0 * self.mu * xi
        _, scale, _ = _power_terms(flat, self.p)
        return (self.p * self.mu * scale[..., None] * flat).reshape(xi.shape)

    def hessian(self, xi: np.ndarray) -> np.ndarray:
        """(..., 4, 4) second derivative acting on row-major flattened gradients."""
        flat = xi.reshape(xi.shape[:-2] + (4,))
        eye = np.broadcast_to(np.eye(4), flat.shape[:-1] + (4, 4))
        if self.is_quadratic:
            return 2.0 * self.mu * eye
        _, scale, outer = _power_terms(flat, self.p)
        return self.p * self.mu * scale[..., None, None] * (eye + (self.p - 2.0) * outer)


@dataclass(frozen=True)
class BodyPotential:
    """F(t, x, z) = -kappa |z|^q + f(t, x).z"""
    kappa: float = 0.0
    q: float = 2.0
    force: VectorExpression = field(default_factory=VectorExpression.zero)

    def __post_init__(self):
        if self.kappa < 0:
            raise DegenerateModel(f"confinement kappa_F must be non-negative, got {self.kappa}")
        if not self.q > 1:
            raise DegenerateModel(f"body exponent q must exceed 1, got {self.q}")

    @property
    def force_rate(self) -> VectorExpression:
        return self.force.diff("t")

    @property
    def is_quadratic(self) -> bool:
        return self.kappa == 0.0 or self.q == 2.0

    def value(self, t: float, x: np.ndarray, z: np.ndarray) -> np.ndarray:
        confinement = 0.0
        if self.kappa:
            confinement = self.kappa * np.sqrt(np.sum(z * z, axis=-1)) ** self.q
        return np.sum(self.force(t, x) * z, axis=-1) - confinement

    def gradient(self, t: float, x: np.ndarray, z: np.ndarray) -> np.ndarray:
        """dF/dz"""
        grad = self.force(t, x) * np.ones_like(z)
        if self.kappa:
            _, scale, _ = _power_terms(z, self.q)
            grad = grad - self.kappa * self.q * scale[..., None] * z
        return grad

    def hessian(self, z: np.ndarray) -> np.ndarray:
        """d2F/dz2, (..., 2, 2)."""
        eye = np.broadcast_to(np.eye(2), z.shape[:-1] + (2, 2))
        if not self.kappa:
            return np.zeros(z.shape[:-1] + (2, 2))
        _, scale, outer = _power_terms(z, self.q)
        return -self.kappa * self.q * scale[..., None, None] * (eye + (self.q - 2.0) * outer)

    def rate(self, t: float, x: np.ndarray, z: np.ndarray) -> np.ndarray:
        """dF/dt = fdot(t, x).z"""
        return np.sum(self.force_rate(t, x) * z, axis=-1)

    def growth_constants(self, sup_force: float) -> Dict[str, float]:
        """Bounds a0|z|^q - b0 <= -F <= a1|z|^q + b1 from Young's inequality."""
        qc = conjugate_exponent(self.q)
        if sup_force == 0.0:
            return {'a0': self.kappa, 'b0': 0.0, 'a1': self.kappa, 'b1': 0.0}
        lam = 0.5 * self.kappa
        b = young_constant(self.q, lam) * sup_force ** qc if lam > 0 else math.inf
        return {'a0': self.kappa - lam, 'b0': b, 'a1': self.kappa + lam, 'b1': b}


@dataclass(frozen=True)
class SurfacePotential:
    """G(t, x, z) = l(t, x).z on the traction boundary."""
    traction: VectorExpression = field(default_factory=VectorExpression.zero)
    r: Optional[float] = None

    @property
    def traction_rate(self) -> VectorExpression:
        return self.traction.diff("t")

    def value(self, t: float, x: np.ndarray, z: np.ndarray) -> np.ndarray:
        return np.sum(self.traction(t, x) * z, axis=-1)

    def gradient(self, t: float, x: np.ndarray, z: np.ndarray) -> np.ndarray:
        return self.traction(t, x) * np.ones_like(z)

    def rate(self, t: float, x: np.ndarray, z: np.ndarray) -> np.ndarray:
        return np.sum(self.traction_rate(t, x) * z, axis=-1)

    def trace_exponent(self, p: float) -> float:
        """The trace exponent r; for p < 2 it must satisfy p <= r <= p / (2 - p)."""
        r = p if self.r is None else self.r
        if p < 2.0 and not (p <= r <= p / (2.0 - p)):
            raise DegenerateModel(f"trace exponent r = {r} outside [{p}, {p / (2.0 - p)}]")
        if p >= 2.0 and r < 1.0:
            raise DegenerateModel(f"trace exponent r must be at least 1, got {r}")
        return r


@dataclass(frozen=True)
class SurfaceDensity:
    """k(nu) = toughness |nu| or toughness sqrt(nu^T M nu)."""
    variant: str = "isotropic"
    toughness: float = 1.0
    matrix: Tuple[Tuple[float, float], Tuple[float, float]] = ((1.0, 0.0), (0.0, 1.0))

    def __post_init__(self):
        if self.variant not in ("isotropic", "anisotropic_ellipse"):
            raise DegenerateModel(f"unknown surface variant {self.variant!r}")
        if not self.toughness > 0:
            raise DegenerateModel(f"toughness must be positive, got {self.toughness}")
        m = self.M
        if not np.allclose(m, m.T):
            raise DegenerateModel(f"surface matrix M must be symmetric, got {m.tolist()}")
        if np.linalg.eigvalsh(m).min() <= 0:
            raise DegenerateModel(f"surface matrix M must be positive definite, got {m.tolist()}")

    @property
    def M(self) -> np.ndarray:
        if self.variant == "isotropic":
            return np.eye(2)
        return np.asarray(self.matrix, dtype=float)

    @property
    def bounds(self) -> Tuple[float, float]:
        """(K1, K2) with K1|nu| <= k(nu) <= K2|nu|."""
        eig = np.linalg.eigvalsh(self.M)
        return self.toughness * math.sqrt(eig[0]), self.toughness * math.sqrt(eig[-1])

    def __call__(self, nu: np.ndarray) -> np.ndarray:
        nu = np.asarray(nu, dtype=float)
        if self.variant == "isotropic":
            return self.toughness * np.sqrt(np.sum(nu * nu, axis=-1))
        return self.toughness * np.sqrt(np.einsum("...i,ij,...j->...", nu, self.M, nu))

    def segment_energy(self, p0: np.ndarray, p1: np.ndarray) -> np.ndarray:
        """length * k(normal) for segments p0 -> p1; k is 1-homogeneous and even."""
        d = np.asarray(p1, dtype=float) - np.asarray(p0, dtype=float)
        normal = np.stack([-d[..., 1], d[..., 0]], axis=-1)
        return self(normal)


__all__ = [
    'DegenerateModel',
    'BulkDensity',
    'BodyPotential',
    'SurfacePotential',
    'SurfaceDensity',
    'conjugate_exponent',
    'young_constant',
]
