"""
Tests for discrete fields, degrees of freedom, jump sets and interpolation.
"""

import numpy as np
import pytest

from quasistatic_fracture.cli.presets import NOTCH_Y
from quasistatic_fracture.fespace import (
    BoundaryDeformation,
    DiscreteField,
    JumpTarget,
    assemble_dofs,
    combined_jump,
    dirichlet_mismatch,
    interpolate_to_fespace,
    jump_set,
)
from quasistatic_fracture.mesh import AdaptiveParams, subdivide


def _edge(mesh, p, q):
    """Base edge joining the vertices at p and q."""
    ids = [int(np.flatnonzero(np.all(np.isclose(mesh.vertices, v), axis=1))[0]) for v in (p, q)]
    return int(np.flatnonzero(np.all(mesh.edges == sorted(ids), axis=1))[0])


def _halves(adaptive, edge):
    return [adaptive.half_id(edge, 0), adaptive.half_id(edge, 1)]


@pytest.fixture
def strip_adaptive(strip_mesh):
    return subdivide(strip_mesh, AdaptiveParams.uniform(strip_mesh, 0.2, value=0.4))


@pytest.fixture
def left_cut(strip_mesh):
    return _edge(strip_mesh, (1 / 3, 0.0), (1 / 3, 1 / 3))


@pytest.fixture
def right_cut(strip_mesh):
    return _edge(strip_mesh, (2 / 3, 0.0), (2 / 3, 1 / 3))


class TestDiscreteField:
    def test_from_nodal_reproduces_affine_field(self, strip_adaptive):
        nodal = np.column_stack([1.0 + 2.0 * strip_adaptive.vertices[:, 0], -strip_adaptive.vertices[:, 1]])
        u = DiscreteField.from_nodal(strip_adaptive, nodal)
        assert np.allclose(u.gradients, [[2.0, 0.0], [0.0, -1.0]])
        values = u.evaluate(np.array([[0.2, 0.1], [0.9, 0.3]]))
        assert np.allclose(values, [[1.4, -0.1], [2.8, -0.3]])

    def test_points_outside_get_fill(self, strip_adaptive):
        u = DiscreteField.zero(strip_adaptive)
        assert np.isnan(u.evaluate(np.array([[2.0, 2.0]]))).all()

    def test_shape_is_checked(self, strip_adaptive):
        with pytest.raises(ValueError, match="shape"):
            DiscreteField(strip_adaptive, np.zeros((3, 3, 2)))

    def test_arithmetic_merges_topology(self, strip_adaptive, left_cut):
        a = DiscreteField.zero(strip_adaptive, _halves(strip_adaptive, left_cut))
        b = DiscreteField(strip_adaptive, np.ones((strip_adaptive.n_triangles, 3, 2)))
        total = a + 2.0 * b
        assert total.topology == a.topology
        assert np.allclose(total.values, 2.0)
        assert np.allclose((total - b).values, 1.0)

    def test_trace_follows_sub_edge_node_order(self, strip_adaptive):
        nodal = strip_adaptive.vertices.copy()
        u = DiscreteField.from_nodal(strip_adaptive, nodal)
        ids = np.array(strip_adaptive.crackable_ids)
        for side in (0, 1):
            assert np.allclose(u.trace(ids, side), strip_adaptive.vertices[strip_adaptive.sub_edges[ids]])


class TestBoundaryDeformation:
    def test_rate_and_static(self):
        g = BoundaryDeformation.from_formulas(["t*x", "0"])
        assert not g.is_static()
        assert BoundaryDeformation.from_formulas(["x", "y"]).is_static()

    def test_knot_values_are_linear(self, strip_mesh, strip_adaptive, stretch):
        g = stretch.interpolant(strip_mesh, 2.0)
        nodes = g.node_values(strip_adaptive)
        assert np.allclose(nodes[:, 0], 2.0 * strip_adaptive.vertices[:, 0])
        assert np.allclose(stretch.rate_interpolant(strip_mesh, 0.0).values[:, 0], strip_mesh.vertices[:, 0])

    def test_evaluate_inside_base_mesh(self, strip_mesh):
        g = BoundaryDeformation.from_formulas(["x + y", "2*t"]).interpolant(strip_mesh, 0.5)
        assert np.allclose(g.evaluate(np.array([[0.5, 0.2]])), [[0.7, 1.0]])


class TestDofs:
    def test_bonded_space(self, strip_adaptive):
        dofs = assemble_dofs(strip_adaptive)
        assert dofs.n_classes == strip_adaptive.n_nodes
        # three pinned nodes on each clamped end
        assert dofs.pinned.sum() == 6
        assert dofs.n_free == 2 * (21 - 6)
        assert dofs.prolongation.shape == (6 * strip_adaptive.n_triangles, dofs.n_free)
        assert not dofs.floating_components

    def test_cut_splits_nodes(self, strip_adaptive, left_cut):
        dofs = assemble_dofs(strip_adaptive, _halves(strip_adaptive, left_cut))
        assert dofs.n_classes == 21 + 3
        assert len(np.unique(dofs.triangle_component)) == 2
        assert not dofs.floating_components

    def test_floating_piece(self, strip_adaptive, left_cut, right_cut):
        topology = _halves(strip_adaptive, left_cut) + _halves(strip_adaptive, right_cut)
        dofs = assemble_dofs(strip_adaptive, topology)
        assert dofs.n_classes == 21 + 6
        assert len(dofs.floating_components) == 1
        assert len(dofs.floating_components[0]) == 8

    def test_expand_restrict(self, strip_adaptive, left_cut, stretch, strip_mesh):
        dofs = assemble_dofs(strip_adaptive, _halves(strip_adaptive, left_cut))
        rng = np.random.default_rng(0)
        x = rng.standard_normal(dofs.n_free)
        g = stretch.interpolant(strip_mesh, 1.0)
        u = dofs.expand(x, g.node_values(strip_adaptive))
        assert np.allclose(dofs.restrict(u), x)
        assert dirichlet_mismatch(u, g) == frozenset()
        assert u.topology == frozenset(_halves(strip_adaptive, left_cut))


class TestJumps:
    def test_continuous_field_has_no_jump(self, strip_adaptive, left_cut):
        nodal = np.column_stack([strip_adaptive.vertices[:, 0], strip_adaptive.vertices[:, 1]])
        u = DiscreteField.from_nodal(strip_adaptive, nodal, _halves(strip_adaptive, left_cut))
        assert jump_set(u) == frozenset()

    def test_jump_on_declared_cut(self, strip_adaptive, left_cut):
        halves = _halves(strip_adaptive, left_cut)
        dofs = assemble_dofs(strip_adaptive, halves)
        rng = np.random.default_rng(1)
        u = dofs.expand(rng.standard_normal(dofs.n_free))
        assert jump_set(u) == frozenset(halves)

    def test_tiny_differences_are_not_jumps(self, strip_adaptive, left_cut):
        halves = _halves(strip_adaptive, left_cut)
        dofs = assemble_dofs(strip_adaptive, halves)
        u = dofs.expand(np.zeros(dofs.n_free))
        side = strip_adaptive.sub_edge_triangles[halves[0], 0]
        values = u.values.copy()
        values[side] += 1e-13
        assert jump_set(u.with_values(values)) == frozenset()

    def test_dirichlet_mismatch(self, strip_mesh, strip_adaptive, stretch):
        g = stretch.interpolant(strip_mesh, 1.0)
        right_end = _edge(strip_mesh, (1.0, 0.0), (1.0, 1 / 3))
        zero = DiscreteField.zero(strip_adaptive)
        assert dirichlet_mismatch(zero, g) == frozenset(_halves(strip_adaptive, right_end))
        assert combined_jump(g.to_discrete(strip_adaptive), g) == frozenset()


class TestInterpolation:
    def test_continuous_target(self, strip_mesh):
        result = interpolate_to_fespace(JumpTarget.continuous(lambda p: np.column_stack([p[:, 1], p[:, 0]])),
                                        strip_mesh, 0.2)
        assert len(result.crack) == 0
        assert result.curve is None
        assert np.allclose(result.field.evaluate(np.array([[0.3, 0.1]])), [[0.1, 0.3]])

    def test_notch_target(self, notch_mesh):
        tip = 0.33
        notch = [[(0.0, NOTCH_Y), (tip, NOTCH_Y)]]

        def opening(p):
            return np.column_stack([np.maximum(tip - p[:, 0], 0.0), np.zeros(len(p))])

        target = JumpTarget(
            branches=[lambda p: np.zeros((len(p), 2)), opening],
            selector=lambda p: (p[:, 1] > NOTCH_Y).astype(int),
            polylines=notch,
        )
        result = interpolate_to_fespace(target, notch_mesh, 0.2)
        assert len(result.zeroed_triangles) == 1
        assert result.crack.total_length > 0
        assert set(result.field.topology) <= set(result.adaptive.crackable_ids)
        far = result.field.evaluate(np.array([[0.05, 0.9], [0.05, 0.1], [0.8, 0.9]]))
        assert np.allclose(far, [[tip - 0.05, 0.0], [0.0, 0.0], [0.0, 0.0]])
        (T,) = result.zeroed_triangles
        assert np.all(result.field.values[4 * T:4 * T + 4] == 0.0)
