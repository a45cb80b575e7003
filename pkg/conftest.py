"""
Shared pytest fixtures: small structured meshes, energy models and boundary
deformations used across the unit and integration suites.
"""

import pytest

from quasistatic_fracture.fespace import BoundaryDeformation
from quasistatic_fracture.mesh import build_structured_mesh, make_domain, rectangle
from quasistatic_fracture.model import (
    BodyPotential,
    BulkDensity,
    EnergyModel,
    SurfaceDensity,
    VectorExpression,
)
from quasistatic_fracture.solver import SolverSettings

THIRD = 1.0 / 3.0


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long acceptance scenarios (deselect with -m \"not slow\")")


def strip_domain(brittle=True, traction=False):
    """[0, 1] x [0, 1/3] in three cells, the middle one brittle, clamped at both ends."""
    boundary = [
        ((0.0, 0.0), (0.0, THIRD), "dirichlet"),
        ((1.0, 0.0), (1.0, THIRD), "dirichlet"),
    ]
    if traction:
        boundary.append(((2 * THIRD, 0.0), (1.0, 0.0), "traction"))
    return make_domain(
        rectangle(0.0, 0.0, 1.0, THIRD),
        brittle=[(THIRD, 0.0, 2 * THIRD, THIRD)] if brittle else [],
        boundary=boundary,
    )


def notch_domain():
    """Unit square with a horizontal brittle band, clamped at the bottom and the top."""
    return make_domain(
        rectangle(0.0, 0.0, 1.0, 1.0),
        brittle=[(0.0, 0.375, 1.0, 0.625)],
        boundary=[((0.0, 0.0), (1.0, 0.0), "dirichlet"), ((0.0, 1.0), (1.0, 1.0), "dirichlet")],
    )


def strip_settings(**overrides):
    values = dict(mode="oracle", enumeration_cap=12, adaptive_band="none")
    values.update(overrides)
    return SolverSettings(**values)


@pytest.fixture
def strip_mesh():
    return build_structured_mesh(strip_domain(), THIRD)


@pytest.fixture
def notch_mesh():
    return build_structured_mesh(notch_domain(), 0.125)


@pytest.fixture
def stretch_model():
    """Quadratic bulk without confinement: the uniform-stretch model."""
    return EnergyModel(
        bulk=BulkDensity("quadratic", 1.0),
        body=BodyPotential(0.0),
        surface_density=SurfaceDensity("isotropic", 1.0),
        allow_degenerate=True,
    )


@pytest.fixture
def confined_model():
    return EnergyModel(
        bulk=BulkDensity("quadratic", 1.0),
        body=BodyPotential(0.1),
        surface_density=SurfaceDensity("isotropic", 0.2),
    )


@pytest.fixture
def loaded_model():
    """Confined p-norm bulk with a body force and a time-dependent traction."""
    return EnergyModel(
        bulk=BulkDensity("p_norm", 1.0, 3.0),
        body=BodyPotential(0.5, 2.0, VectorExpression(["0.1*t", "0.2*x"])),
        surface_density=SurfaceDensity("isotropic", 1.0),
    )


@pytest.fixture
def stretch():
    return BoundaryDeformation.from_formulas(["t*x", "0"])


@pytest.fixture
def output_dir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path / "out"
