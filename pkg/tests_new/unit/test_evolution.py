"""
Tests for the time grid, the evolution driver, the energy ledger and the
post-run checks.
"""

import numpy as np
import pandas as pd
import pytest

from conftest import THIRD, strip_settings
from quasistatic_fracture.crack import CrackSet
from quasistatic_fracture.evolution import (
    EvolutionAborted,
    EvolutionLedger,
    EvolutionSetup,
    LedgerRow,
    TimeGrid,
    check_apriori_bound,
    check_energy_inequality,
    check_g_competitor,
    check_irreversibility,
    cross_mesh_gradient_difference,
    run_evolution,
    work_integrals,
)
from quasistatic_fracture.evolution.study import locate_or_snap, monotonicity_flags
from quasistatic_fracture.fespace import DiscreteField
from quasistatic_fracture.mesh import AdaptiveParams, build_structured_mesh, make_domain, rectangle, subdivide
from quasistatic_fracture.model import coercivity_constants


@pytest.fixture
def stretch_setup(strip_mesh, stretch_model, stretch):
    return EvolutionSetup(
        mesh=strip_mesh,
        model=stretch_model,
        boundary=stretch,
        grid=TimeGrid.from_steps(4, 0.8),
        a=0.2,
        settings=strip_settings(mode="heuristic"),
    )


@pytest.fixture
def stretch_run(stretch_setup):
    return run_evolution(stretch_setup)


class TestTimeGrid:
    def test_last_knot_is_the_horizon(self):
        grid = TimeGrid(0.3, 1.0)
        assert np.allclose(grid.knots, [0.0, 0.3, 0.6, 0.9, 1.0])
        assert len(grid) == 5
        assert grid.index_at(0.95) == 3
        assert grid.index_at(1.0) == 4

    def test_exact_division(self):
        assert len(TimeGrid(0.25, 1.0)) == 5
        assert len(TimeGrid.from_steps(8, 0.8)) == 9

    def test_invalid_values(self):
        with pytest.raises(ValueError, match="time step must be positive"):
            TimeGrid(0.0, 1.0)
        with pytest.raises(ValueError, match="outside"):
            TimeGrid(0.5, 1.0).index_at(1.5)

    def test_knots_are_read_only(self):
        with pytest.raises(ValueError):
            TimeGrid(0.5, 1.0).knots[0] = 1.0


class TestUniformStretch:
    def test_stays_bonded_with_closed_form_energies(self, stretch_run):
        evolution, ledger = stretch_run
        assert evolution.complete
        assert len(ledger) == 5
        for row in ledger:
            assert row.crack_length == 0.0
            assert row.bulk == pytest.approx(row.t ** 2 / 3)
            assert row.total == pytest.approx(row.t ** 2 / 3)
            assert row.step_objective == pytest.approx(row.g_competitor)
        assert ledger.consistency_error() < 1e-12

    def test_ledger_work_and_error_terms(self, stretch_run):
        _, ledger = stretch_run
        delta = 0.2
        knots = [row.t for row in ledger]
        for i, row in enumerate(ledger):
            assert row.W_work == pytest.approx(2.0 / 3.0 * delta * sum(knots[:i]), abs=1e-12)
            assert [row.Fdot, row.F_work, row.Gdot, row.G_work] == pytest.approx([0.0] * 4, abs=1e-14)
            if i:
                assert row.e_term == pytest.approx(delta ** 2 / 3)
                assert row.comparison_slack == pytest.approx(0.0, abs=1e-10)
        assert ledger[0].e_term == 0.0
        assert np.isnan(ledger[0].comparison_slack)

    def test_energy_inequality_is_tight(self, stretch_run):
        _, ledger = stretch_run
        report = check_energy_inequality(ledger)
        assert report.passed
        assert report.n_pairs == 15
        assert report.worst_margin == pytest.approx(0.0, abs=1e-10)

    def test_bounds_and_irreversibility(self, stretch_run, stretch_setup):
        evolution, ledger = stretch_run
        assert check_irreversibility(evolution)
        assert check_g_competitor(ledger)
        constants = coercivity_constants(stretch_setup.model, stretch_setup.mesh, 0.8)
        report = check_apriori_bound(ledger, constants, stretch_setup.model.surface_density, 0.0)
        assert report.asserted
        assert report.passed
        assert report.norm_bound == pytest.approx(0.8 ** 2 / 3)

    def test_piecewise_constant_state(self, stretch_run):
        evolution, _ = stretch_run
        u, crack = evolution.state_at(0.5)
        assert u is evolution.field_at(2)
        assert len(crack) == 0
        assert np.allclose(u.gradients[:, 0, 0], 0.4)

    def test_work_integrals_match_the_ledger(self, stretch_run):
        evolution, ledger = stretch_run
        assert work_integrals(evolution, 0.0, 0.6).W_work == pytest.approx(ledger[3].W_work)

    def test_frame_round_trip(self, stretch_run):
        _, ledger = stretch_run
        frame = ledger.to_frame()
        assert list(frame['step']) == [0, 1, 2, 3, 4]
        again = EvolutionLedger.from_frame(frame)
        assert again[4].total == ledger[4].total
        assert isinstance(again[4].step, int)


class TestChecks:
    def test_lost_edge_breaks_irreversibility(self, strip_mesh):
        adaptive = subdivide(strip_mesh, AdaptiveParams.uniform(strip_mesh, 0.2))
        sid = adaptive.crackable_ids[0]
        grown = CrackSet.from_sub_edges(adaptive, [sid], step=1)
        assert check_irreversibility([CrackSet.empty(), grown, grown])
        assert not check_irreversibility([grown, CrackSet.empty()])

    def test_violated_inequality_is_reported(self):
        ledger = EvolutionLedger([
            LedgerRow(step=0, t=0.0, bulk=0.0, body=0.0, traction=0.0, surface=0.0, total=0.0),
            LedgerRow(step=1, t=1.0, bulk=1.0, body=0.0, traction=0.0, surface=0.0, total=1.0, W_work=0.5),
        ])
        report = check_energy_inequality(ledger)
        assert not report.passed
        assert report.worst_pair == (0, 1)
        assert report.worst_margin == pytest.approx(0.5)

    def test_g_competitor_violation(self):
        ledger = EvolutionLedger([
            LedgerRow(step=0, t=0.0, bulk=0.0, body=0.0, traction=0.0, surface=0.0, total=0.0,
                      step_objective=1.0, g_competitor=0.5),
        ])
        assert not check_g_competitor(ledger)


class TestAbort:
    def test_partial_result_is_kept(self, stretch_setup):
        stretch_setup.settings = strip_settings(mode="oracle", enumeration_cap=2)
        with pytest.raises(EvolutionAborted, match="step 0") as info:
            run_evolution(stretch_setup)
        evolution, ledger = info.value.partial
        assert evolution.n_completed == 0
        assert len(ledger) == 0


class TestStudyHelpers:
    def test_gradient_difference_across_meshes(self, strip_mesh):
        fine = subdivide(strip_mesh, AdaptiveParams.uniform(strip_mesh, 0.2, value=0.3))
        coarse = subdivide(strip_mesh, AdaptiveParams.uniform(strip_mesh, 0.2))
        u = DiscreteField.from_nodal(fine, np.column_stack([2.0 * fine.vertices[:, 0], np.zeros(fine.n_nodes)]))
        v = DiscreteField.from_nodal(coarse, np.column_stack([coarse.vertices[:, 0], np.zeros(coarse.n_nodes)]))
        same = DiscreteField.from_nodal(coarse, np.column_stack([2.0 * coarse.vertices[:, 0],
                                                                 np.zeros(coarse.n_nodes)]))
        assert cross_mesh_gradient_difference(u, same) == pytest.approx(0.0, abs=1e-12)
        assert cross_mesh_gradient_difference(u, v) == pytest.approx(np.sqrt(1 / 3))

    def test_points_outside_the_coarse_mesh_are_snapped(self, strip_mesh):
        fine = subdivide(strip_mesh, AdaptiveParams.uniform(strip_mesh, 0.2))
        short = build_structured_mesh(make_domain(rectangle(0.0, 0.0, 2 * THIRD, THIRD)), THIRD)
        coarse = subdivide(short, AdaptiveParams.uniform(short, 0.2))
        u = DiscreteField.from_nodal(fine, np.zeros((fine.n_nodes, 2)))
        v = DiscreteField.from_nodal(coarse, np.column_stack([coarse.vertices[:, 0], np.zeros(coarse.n_nodes)]))
        far = np.array([[0.9, 0.1], [0.1, 0.1]])
        located = locate_or_snap(coarse, far)
        assert np.all(located >= 0)
        assert coarse.vertices[coarse.triangles[located[0]]][:, 0].max() == pytest.approx(2 * THIRD)
        # unit gradient everywhere, including the uncovered third
        assert cross_mesh_gradient_difference(u, v) == pytest.approx(np.sqrt(THIRD))

    def test_monotonicity_flags(self):
        def frame(d):
            return pd.DataFrame({'t': [0.0, 1.0], 'd_elastic': d, 'd_surface': [0.0, 0.0]})

        assert monotonicity_flags([frame([0.0, 0.0]), frame([0.4, 0.2]), frame([0.2, 0.1])]) == []
        flags = monotonicity_flags([frame([0.0, 0.0]), frame([0.1, 0.2]), frame([0.2, 0.1])])
        assert len(flags) == 1
        assert flags[0].startswith("d_elastic increased at t=0")
