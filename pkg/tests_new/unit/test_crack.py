"""
Tests for crack sets, interpolating curves and the initial-crack approximation.
"""

import math

import numpy as np
import pytest

from quasistatic_fracture.cli.presets import NOTCH_Y
from quasistatic_fracture.crack import (
    CrackOutsideBrittle,
    CrackSet,
    NonGenericPosition,
    approximate_initial_crack,
    chord_anchor,
    fitted_constant,
    incremental_surface_energy,
    initial_crack_study,
    interpolating_curve,
    interpolation_error_table,
    polyline_energy,
)
from quasistatic_fracture.crack.initial import OFF_LATTICE_SHIFT
from quasistatic_fracture.fespace import jump_set
from quasistatic_fracture.mesh import AdaptiveParams, build_structured_mesh, make_domain, rectangle, subdivide
from quasistatic_fracture.model import SurfaceDensity


def _edge(mesh, p, q):
    ids = [int(np.flatnonzero(np.all(np.isclose(mesh.vertices, v), axis=1))[0]) for v in (p, q)]
    return int(np.flatnonzero(np.all(mesh.edges == sorted(ids), axis=1))[0])


def _strip_adaptive(mesh, value):
    return subdivide(mesh, AdaptiveParams.uniform(mesh, 0.2, value=value))


@pytest.fixture
def unit_square():
    return build_structured_mesh(make_domain(rectangle(0.0, 0.0, 1.0, 1.0)), 0.25)


class TestCrackSet:
    def test_non_crackable_sub_edge_is_rejected(self, strip_mesh):
        adaptive = _strip_adaptive(strip_mesh, 0.5)
        clamped = _edge(strip_mesh, (0.0, 0.0), (0.0, 1 / 3))
        with pytest.raises(CrackOutsideBrittle, match="not crackable"):
            CrackSet.from_sub_edges(adaptive, [adaptive.half_id(clamped, 0)])

    def test_full_edge_length(self, strip_mesh):
        adaptive = _strip_adaptive(strip_mesh, 0.4)
        cut = _edge(strip_mesh, (1 / 3, 0.0), (1 / 3, 1 / 3))
        crack = CrackSet.from_sub_edges(adaptive, [adaptive.half_id(cut, 0), adaptive.half_id(cut, 1)], step=1)
        assert len(crack) == 2
        assert crack.total_length == pytest.approx(1 / 3)
        assert crack.surface_energy(SurfaceDensity("isotropic", 2.0)) == pytest.approx(2 / 3)
        assert crack.covered_sub_edges(adaptive) == frozenset(
            [adaptive.half_id(cut, 0), adaptive.half_id(cut, 1)])

    def test_incremental_energy_counts_fresh_measure(self, strip_mesh):
        cut = _edge(strip_mesh, (1 / 3, 0.0), (1 / 3, 1 / 3))
        short = _strip_adaptive(strip_mesh, 0.5)
        long = _strip_adaptive(strip_mesh, 0.2)
        prev = CrackSet.from_sub_edges(short, [short.half_id(cut, 0)], step=1)
        new = CrackSet.from_sub_edges(long, [long.half_id(cut, 0)], step=2)
        density = SurfaceDensity()
        assert incremental_surface_energy(new, prev, density) == pytest.approx(0.1)
        assert incremental_surface_energy(prev, new, density) == pytest.approx(0.0)
        assert incremental_surface_energy(new, CrackSet.empty(), density) == pytest.approx(new.total_length)

    def test_union_keeps_earliest_step(self, strip_mesh):
        adaptive = _strip_adaptive(strip_mesh, 0.5)
        cut = _edge(strip_mesh, (1 / 3, 0.0), (1 / 3, 1 / 3))
        sid = adaptive.half_id(cut, 0)
        initial = CrackSet.from_sub_edges(adaptive, [sid], step=None)
        later = CrackSet.from_sub_edges(adaptive, [sid], step=3)
        assert [e.step_added for e in later.union(initial)] == [None]
        assert [e.step_added for e in CrackSet.from_sub_edges(adaptive, [sid], step=5) | later] == [3]
        assert initial == later
        assert initial.issubset(later | CrackSet.empty())

    def test_records(self, strip_mesh):
        adaptive = _strip_adaptive(strip_mesh, 0.5)
        cut = _edge(strip_mesh, (2 / 3, 0.0), (2 / 3, 1 / 3))
        crack = CrackSet.from_sub_edges(adaptive, [adaptive.half_id(cut, 1)], step=4)
        (record,) = crack.to_records()
        assert record['step_added'] == 4
        assert record['p0'][0] == pytest.approx(2 / 3)
        assert record['p1'][0] == pytest.approx(2 / 3)
        assert len(crack.end_nodes()) == 2

    def test_anisotropic_staircase_energy(self):
        domain = make_domain(
            rectangle(0.0, 0.0, 1.0, 1.0),
            brittle=[(0.0, 0.0, 1.0, 1.0)],
            boundary=[((0.0, 0.0), (1.0, 0.0), "dirichlet"), ((0.0, 1.0), (1.0, 1.0), "dirichlet")],
        )
        mesh = build_structured_mesh(domain, 0.25)
        adaptive = subdivide(mesh, AdaptiveParams.uniform(mesh, 0.2))
        corners = [(0.25, 0.25), (0.5, 0.25), (0.5, 0.5), (0.75, 0.5), (0.75, 0.75)]
        steps = [_edge(mesh, p, q) for p, q in zip(corners, corners[1:])]
        crack = CrackSet.from_sub_edges(adaptive, [adaptive.half_id(e, h) for e in steps for h in (0, 1)])
        density = SurfaceDensity("anisotropic_ellipse", 1.0, ((1.0, 0.0), (0.0, 4.0)))
        brute = sum(
            e.length * math.sqrt(e.normal @ np.array(density.matrix) @ e.normal) for e in crack
        )
        assert len(crack) == 8
        # horizontal steps cost 2 per unit length, vertical ones 1
        assert brute == pytest.approx(1.5)
        assert crack.surface_energy(density) == pytest.approx(brute)

    def test_polylines_chain_shared_endpoints(self, strip_mesh):
        adaptive = _strip_adaptive(strip_mesh, 0.5)
        left = _edge(strip_mesh, (1 / 3, 0.0), (1 / 3, 1 / 3))
        right = _edge(strip_mesh, (2 / 3, 0.0), (2 / 3, 1 / 3))
        crack = CrackSet.from_sub_edges(
            adaptive, [adaptive.half_id(left, 0), adaptive.half_id(left, 1), adaptive.half_id(right, 0)])
        chains = crack.polylines()
        assert sorted(len(c) for c in chains) == [2, 3]
        long = next(c for c in chains if len(c) == 3)
        assert [p[0] for p in long] == pytest.approx([1 / 3] * 3)
        assert sorted(p[1] for p in long) == pytest.approx([0.0, 1 / 6, 1 / 3])


class TestInterpolatingCurve:
    def test_vertex_contact(self, unit_square):
        with pytest.raises(NonGenericPosition, match="passes through mesh vertex"):
            interpolating_curve([[(0.0, 0.125), (1.0, 0.625)]], unit_square, 0.2)

    def test_edge_overlap(self, unit_square):
        with pytest.raises(NonGenericPosition, match="overlaps mesh edge"):
            interpolating_curve([[(0.1, 0.25), (0.9, 0.25)]], unit_square, 0.2)

    def test_double_crossing(self, unit_square):
        with pytest.raises(NonGenericPosition, match="more than once"):
            interpolating_curve([[(0.1, 0.1), (0.4, 0.1), (0.1, 0.12)]], unit_square, 0.2)

    def test_invalid_a(self, unit_square):
        with pytest.raises(NonGenericPosition, match="a must lie"):
            interpolating_curve([[(0.1, 0.1), (0.9, 0.2)]], unit_square, 0.5)

    def test_single_point_polyline(self, unit_square):
        with pytest.raises(NonGenericPosition, match="at least two points"):
            interpolating_curve([[(0.1, 0.1)]], unit_square, 0.2)

    def test_knots_are_clipped(self, unit_square):
        curve = interpolating_curve([[(0.0, 0.51), (1.0, 0.51)]], unit_square, 0.2)
        assert all(0.2 <= t <= 0.8 for t in curve.knots.values())
        assert not curve.zeroed_triangles
        assert curve.projected_length() >= 1.0 - 1e-12


class TestInitialCrack:
    def test_witness_jumps_on_crack(self, notch_mesh):
        init = approximate_initial_crack([[(0.0, NOTCH_Y), (0.33, NOTCH_Y)]], notch_mesh, 0.2)
        assert len(init.crack_set) > 0
        assert init.crack_set.total_length == pytest.approx(init.curve.projected_length())
        assert all(e.step_added is None for e in init.crack_set)
        jumps = jump_set(init.witness)
        assert jumps
        assert jumps <= frozenset(init.curve.sub_edges)
        assert init.locked_edges

    def test_no_polylines(self, notch_mesh):
        init = approximate_initial_crack([], notch_mesh, 0.2)
        assert len(init.crack_set) == 0
        assert init.curve is None

    def test_anisotropic_polyline_energy(self):
        density = SurfaceDensity("anisotropic_ellipse", 1.0, ((4.0, 0.0), (0.0, 1.0)))
        assert polyline_energy([[(0.0, 0.0), (1.0, 0.0)]], density) == pytest.approx(1.0)
        assert polyline_energy([[(0.0, 0.0), (0.0, 1.0)]], density) == pytest.approx(2.0)
        assert polyline_energy([[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0)]], density) == pytest.approx(3.0)

    def test_diagonal_notch_refinement(self):
        domain = make_domain(
            rectangle(0.0, 0.0, 1.0, 1.0),
            brittle=[(0.0, 0.0, 1.0, 1.0)],
            boundary=[((0.0, 0.0), (1.0, 0.0), "dirichlet"), ((0.0, 1.0), (1.0, 1.0), "dirichlet")],
        )
        notch = [[(0.0, 0.1625), (0.625, 0.7875)]]
        table = initial_crack_study(
            notch,
            lambda eps: build_structured_mesh(domain, eps),
            [(1 / 8, 0.2), (1 / 16, 0.1), (1 / 32, 0.05)],
            SurfaceDensity(),
        )
        assert list(table['eps']) == [1 / 8, 1 / 16, 1 / 32]
        assert table['reference'].iloc[0] == pytest.approx(0.625 * math.sqrt(2.0))
        assert table['rel_error'].iloc[-1] <= 0.05


class TestInterpolationError:
    def test_chord_anchor(self):
        assert chord_anchor(0.0, 0.1) == (0.5, pytest.approx(0.55))
        assert chord_anchor(90.0, 0.1) == (pytest.approx(0.55), 0.5)
        assert chord_anchor(30.0, 0.1) == (0.5, pytest.approx(0.5 + OFF_LATTICE_SHIFT * 0.1))

    def test_error_is_linear_in_a(self):
        table = interpolation_error_table([0.0, 17.0, 30.0, 45.0], [1 / 64], [0.4, 0.2, 0.1, 0.05])
        assert len(table) == 16
        axis = table[table['angle'].isin([0.0])]
        assert (axis['rel_error'] < 1e-12).all()
        diagonal = table[table['angle'] == 45.0].set_index('a')['rel_error']
        assert diagonal[0.4] > 0.0
        assert diagonal[0.05] <= 0.5 * diagonal[0.4] + 1e-12
        assert fitted_constant(table) <= 2.0
