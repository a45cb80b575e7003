"""
Acceptance scenarios on the three-cell strip: enumeration order independence
and the load at which cracking first pays off.
"""

import warnings

import numpy as np
import pytest

from conftest import strip_settings
from quasistatic_fracture.crack import CrackSet
from quasistatic_fracture.mesh import AdaptiveParams
from quasistatic_fracture.solver import FloatingComponentWarning, StepProblem, nucleation_threshold, solve_step

pytestmark = pytest.mark.slow


def _problem(mesh, model, boundary, t, **settings):
    return StepProblem(
        index=1,
        t=t,
        mesh=mesh,
        model=model,
        boundary=boundary,
        prev_crack=CrackSet.empty(),
        base_params=AdaptiveParams.uniform(mesh, 0.2),
        settings=strip_settings(**settings),
    )


def test_oracle_ignores_order_and_threads(strip_mesh, confined_model, stretch):
    forward = solve_step(_problem(strip_mesh, confined_model, stretch, 2.0,
                                  enumeration_order="forward", threads=1))
    reverse = solve_step(_problem(strip_mesh, confined_model, stretch, 2.0,
                                  enumeration_order="reverse", threads=3))
    assert forward.realized == reverse.realized
    assert forward.objective == pytest.approx(reverse.objective, rel=1e-12, abs=1e-14)
    assert np.allclose(forward.field.values, reverse.field.values, rtol=1e-10, atol=1e-12)


def test_nucleation_bracket(strip_mesh, stretch_model, stretch):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", FloatingComponentWarning)
        threshold = nucleation_threshold(_problem(strip_mesh, stretch_model, stretch, 1.0))
        assert 0.0 < threshold < np.inf
        below = solve_step(_problem(strip_mesh, stretch_model, stretch, threshold * (1 - 1 / 20)))
        above = solve_step(_problem(strip_mesh, stretch_model, stretch, threshold * (1 + 1 / 20)))
    assert below.realized == frozenset()
    assert above.realized
