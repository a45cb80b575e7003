"""
Tests for formulas, energy densities, quadrature and the elastic energy.
"""

import math

import numpy as np
import pytest

from conftest import THIRD, strip_domain
from quasistatic_fracture.crack import CrackSet
from quasistatic_fracture.fespace import DiscreteField
from quasistatic_fracture.mesh import AdaptiveParams, build_structured_mesh, subdivide
from quasistatic_fracture.model import (
    TIME_RULE,
    BodyPotential,
    BulkDensity,
    DegenerateModel,
    EnergyModel,
    Expression,
    FormulaError,
    SurfaceDensity,
    SurfacePotential,
    VectorExpression,
    body_work,
    bulk_energy,
    coercivity_constants,
    conjugate_exponent,
    derivative_actions,
    elastic_energy,
    lp_norms,
    surface_work,
    time_nodes,
    total_energy,
    trace_constant,
    triangle_rule,
    young_constant,
)
from quasistatic_fracture.model.quadrature import triangle_points

H = 1e-6


def _random_field(adaptive, rng, scale=1.0):
    return DiscreteField(adaptive, scale * rng.standard_normal((adaptive.n_triangles, 3, 2)))


def _affine_field(adaptive, t):
    nodal = np.column_stack([t * adaptive.vertices[:, 0], np.zeros(adaptive.n_nodes)])
    return DiscreteField.from_nodal(adaptive, nodal)


class TestExpressions:
    def test_evaluation(self):
        expr = Expression("t*x + sin(pi*y)")
        assert expr(0.5, 2.0, 0.5) == pytest.approx(2.0)
        assert Expression("2**3 + 2^2")(0, 0, 0) == pytest.approx(12.0)
        assert Expression("-x^2")(0, 3.0, 0) == pytest.approx(-9.0)

    def test_broadcasts_over_points(self):
        values = Expression("x - y")(1.0, np.array([1.0, 2.0]), np.array([0.5, 0.5]))
        assert values.shape == (2,)
        assert np.allclose(values, [0.5, 1.5])

    def test_numbers_are_constants(self):
        expr = Expression(2.5)
        assert expr(7.0, 1.0, 1.0) == 2.5
        assert not expr.depends_on("t")
        assert Expression("0").is_zero()

    def test_symbolic_derivatives(self):
        expr = Expression("t^2*x + exp(y)")
        assert expr.diff("t")(3.0, 2.0, 0.0) == pytest.approx(12.0)
        assert expr.diff("y")(0.0, 0.0, 1.0) == pytest.approx(math.e)
        assert Expression("sqrt(x)").diff("x")(0, 4.0, 0) == pytest.approx(0.25)
        assert Expression("log(x)*cos(y)").diff("x")(0, 2.0, 0.0) == pytest.approx(0.5)
        assert Expression("x*y").diff("t").is_zero()

    def test_depends_on(self):
        expr = Expression("t*x")
        assert expr.depends_on("t") and expr.depends_on("x")
        assert not expr.depends_on("y")

    @pytest.mark.parametrize("source, message", [
        ("", "empty formula"),
        ("t +", "unexpected"),
        ("foo(x)", "unknown name"),
        ("x $ 2", "unexpected character"),
        ("(x + 1", "expected"),
    ])
    def test_malformed_formulas(self, source, message):
        with pytest.raises(FormulaError, match=message):
            Expression(source)

    def test_non_finite_values(self):
        with pytest.raises(FormulaError):
            Expression("log(x)")(0.0, 0.0, 0.0)
        with pytest.raises(FormulaError):
            Expression("1/x")(0.0, 0.0, 0.0)

    def test_vector_expression(self):
        g = VectorExpression(["t*x", "0"])
        points = np.array([[2.0, 0.0], [1.0, 5.0]])
        assert np.allclose(g(0.5, points), [[1.0, 0.0], [0.5, 0.0]])
        assert np.allclose(g.diff("t")(1.0, points), [[2.0, 0.0], [1.0, 0.0]])
        assert VectorExpression.zero().is_zero()
        assert not g.is_zero()

    def test_vector_expression_needs_two_components(self):
        with pytest.raises(FormulaError):
            VectorExpression(["x"])


class TestDensities:
    @pytest.mark.parametrize("bulk", [BulkDensity("quadratic", 1.5), BulkDensity("p_norm", 1.0, 3.0),
                                      BulkDensity("p_norm", 2.0, 1.5)])
    def test_bulk_derivatives(self, bulk):
        rng = np.random.default_rng(0)
        xi = rng.standard_normal((2, 2))
        grad = bulk.gradient(xi)
        hess = bulk.hessian(xi)
        for k in range(4):
            step = np.zeros(4)
            step[k] = H
            d = step.reshape(2, 2)
            fd = (bulk.energy(xi + d) - bulk.energy(xi - d)) / (2 * H)
            assert fd == pytest.approx(grad.reshape(4)[k], rel=1e-6, abs=1e-8)
            fd_grad = (bulk.gradient(xi + d) - bulk.gradient(xi - d)).reshape(4) / (2 * H)
            assert np.allclose(fd_grad, hess[:, k], rtol=1e-5, atol=1e-7)

    def test_bulk_energy_values(self):
        xi = np.array([[1.0, 2.0], [3.0, 4.0]])
        assert BulkDensity("quadratic", 2.0).energy(xi) == pytest.approx(60.0)
        assert BulkDensity("p_norm", 1.0, 3.0).energy(xi) == pytest.approx(30.0 ** 1.5)

    def test_quadratic_variant_forces_p(self):
        assert BulkDensity("quadratic", 1.0, 4.0).p == 2.0

    @pytest.mark.parametrize("kwargs", [dict(variant="cubic"), dict(mu=0.0), dict(variant="p_norm", p=1.0)])
    def test_degenerate_bulk(self, kwargs):
        with pytest.raises(DegenerateModel):
            BulkDensity(**kwargs)

    @pytest.mark.parametrize("q", [2.0, 3.0, 1.5])
    def test_body_derivatives(self, q):
        body = BodyPotential(0.7, q, VectorExpression(["x*t", "1 + y"]))
        rng = np.random.default_rng(1)
        x = rng.uniform(size=2)
        z = rng.standard_normal(2)
        grad = body.gradient(0.5, x, z)
        hess = body.hessian(z)
        for k in range(2):
            d = np.zeros(2)
            d[k] = H
            fd = (body.value(0.5, x, z + d) - body.value(0.5, x, z - d)) / (2 * H)
            assert fd == pytest.approx(grad[k], rel=1e-6, abs=1e-8)
            fd_grad = (body.gradient(0.5, x, z + d) - body.gradient(0.5, x, z - d)) / (2 * H)
            assert np.allclose(fd_grad, hess[:, k], rtol=1e-5, atol=1e-7)

    def test_body_rate(self):
        body = BodyPotential(0.0, 2.0, VectorExpression(["x*t^2", "0"]))
        x, z = np.array([2.0, 0.0]), np.array([1.5, 3.0])
        assert body.rate(1.0, x, z) == pytest.approx(2.0 * 1.0 * 2.0 * 1.5)

    @pytest.mark.parametrize("kwargs", [dict(kappa=-0.1), dict(q=1.0)])
    def test_degenerate_body(self, kwargs):
        with pytest.raises(DegenerateModel):
            BodyPotential(**kwargs)

    def test_surface_density_bounds(self):
        density = SurfaceDensity("anisotropic_ellipse", 0.25, ((1.0, 0.0), (0.0, 4.0)))
        assert density.bounds == pytest.approx((0.25, 0.5))
        assert density(np.array([1.0, 0.0])) == pytest.approx(0.25)
        assert density(np.array([0.0, 1.0])) == pytest.approx(0.5)
        rng = np.random.default_rng(2)
        nu = rng.standard_normal((100, 2))
        norms = np.linalg.norm(nu, axis=1)
        k = density(nu)
        assert np.all(k >= 0.25 * norms - 1e-14)
        assert np.all(k <= 0.5 * norms + 1e-14)
        assert np.allclose(density(-nu), k)

    def test_segment_energy_uses_normal(self):
        density = SurfaceDensity("anisotropic_ellipse", 1.0, ((1.0, 0.0), (0.0, 4.0)))
        # a horizontal segment has normal (0, 1)
        assert density.segment_energy(np.array([0.0, 0.0]), np.array([1.0, 0.0])) == pytest.approx(2.0)
        assert density.segment_energy(np.array([0.0, 0.0]), np.array([0.0, 1.0])) == pytest.approx(1.0)
        assert SurfaceDensity("isotropic", 3.0).bounds == (3.0, 3.0)

    @pytest.mark.parametrize("kwargs", [
        dict(toughness=0.0),
        dict(variant="anisotropic_ellipse", matrix=((1.0, 0.5), (0.0, 1.0))),
        dict(variant="anisotropic_ellipse", matrix=((1.0, 0.0), (0.0, -1.0))),
        dict(variant="spherical"),
    ])
    def test_degenerate_surface_density(self, kwargs):
        with pytest.raises(DegenerateModel):
            SurfaceDensity(**kwargs)

    def test_trace_exponent_range(self):
        assert SurfacePotential().trace_exponent(1.5) == 1.5
        assert SurfacePotential(r=3.0).trace_exponent(1.5) == 3.0
        with pytest.raises(DegenerateModel):
            SurfacePotential(r=4.0).trace_exponent(1.5)
        with pytest.raises(DegenerateModel):
            EnergyModel(bulk=BulkDensity("p_norm", 1.0, 1.5), surface_potential=SurfacePotential(r=1.2))

    def test_young_constant(self):
        assert conjugate_exponent(2.0) == 2.0
        assert conjugate_exponent(3.0) == pytest.approx(1.5)
        rng = np.random.default_rng(4)
        for q, lam in [(2.0, 0.5), (3.0, 0.2), (1.5, 2.0)]:
            c = young_constant(q, lam)
            a, b = rng.uniform(0, 3, 50), rng.uniform(0, 3, 50)
            assert np.all(a * b <= lam * b ** q + c * a ** conjugate_exponent(q) + 1e-12)
        assert young_constant(2.0, 0.5) == pytest.approx(0.5)
        assert young_constant(2.0, 0.0) == math.inf


class TestQuadrature:
    @pytest.mark.parametrize("n, exponents, exact", [
        (1, (1, 0), 1 / 6),
        (3, (2, 0), 1 / 12),
        (3, (1, 1), 1 / 24),
        (7, (2, 2), 1 / 180),
        (7, (4, 1), 4 * 3 * 2 / math.factorial(7)),
    ])
    def test_triangle_rules_exact_for_polynomials(self, n, exponents, exact):
        rule = triangle_rule(n)
        vertices = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
        pts = triangle_points(vertices, np.array([[0, 1, 2]]), rule)[0]
        value = 0.5 * np.sum(rule.weights * pts[:, 0] ** exponents[0] * pts[:, 1] ** exponents[1])
        assert value == pytest.approx(exact, rel=1e-12)

    def test_unknown_rule(self):
        with pytest.raises(ValueError, match="choose 1, 3 or 7"):
            triangle_rule(5)

    def test_time_rule(self):
        nodes, weights = time_nodes(0.5, 1.5)
        assert weights.sum() == pytest.approx(1.0)
        assert np.sum(weights * nodes ** 5) == pytest.approx((1.5 ** 6 - 0.5 ** 6) / 6)
        assert TIME_RULE.degree == 5


class TestEnergies:
    def test_affine_stretch_energy(self, strip_mesh, stretch_model):
        adaptive = subdivide(strip_mesh, AdaptiveParams.uniform(strip_mesh, 0.2, value=0.35))
        for t in (0.0, 0.4, 1.3):
            u = _affine_field(adaptive, t)
            assert bulk_energy(u, stretch_model) == pytest.approx(t * t / 3, rel=1e-12, abs=1e-15)
            assert body_work(t, u, stretch_model) == 0.0
            assert elastic_energy(t, u, stretch_model) == pytest.approx(t * t / 3, rel=1e-12, abs=1e-15)

    def test_lp_norms_of_affine_stretch(self, strip_mesh, confined_model):
        adaptive = subdivide(strip_mesh, AdaptiveParams.uniform(strip_mesh, 0.2))
        u = _affine_field(adaptive, 2.0)
        norms = lp_norms(u, confined_model)
        assert norms['grad_p'] == pytest.approx(4.0 / 3)
        # int x^2 over [0, 1] x [0, 1/3]
        assert norms['u_q'] == pytest.approx(4.0 / 9)

    def test_confinement_adds_to_energy(self, strip_mesh, confined_model):
        adaptive = subdivide(strip_mesh, AdaptiveParams.uniform(strip_mesh, 0.2))
        u = _affine_field(adaptive, 1.0)
        assert elastic_energy(1.0, u, confined_model) == pytest.approx(1.0 / 3 + 0.1 / 9)

    def test_total_energy_adds_crack_surface(self, strip_mesh, confined_model):
        adaptive = subdivide(strip_mesh, AdaptiveParams.uniform(strip_mesh, 0.2))
        u = _affine_field(adaptive, 1.0)
        ends = [int(np.flatnonzero(np.all(np.isclose(strip_mesh.vertices, p), axis=1))[0])
                for p in ((THIRD, 0.0), (THIRD, THIRD))]
        cut = int(np.flatnonzero(np.all(strip_mesh.edges == sorted(ends), axis=1))[0])
        crack = CrackSet.from_sub_edges(adaptive, [adaptive.half_id(cut, 0), adaptive.half_id(cut, 1)])
        assert total_energy(1.0, u, CrackSet.empty(), confined_model) == pytest.approx(1.0 / 3 + 0.1 / 9)
        assert total_energy(1.0, u, crack, confined_model) == pytest.approx(1.0 / 3 + 0.1 / 9 + 0.2 * THIRD)

    def test_traction_work(self):
        mesh = build_structured_mesh(strip_domain(brittle=False, traction=True), THIRD)
        adaptive = subdivide(mesh, AdaptiveParams.uniform(mesh, 0.2))
        model = EnergyModel(
            bulk=BulkDensity("quadratic", 1.0),
            body=BodyPotential(0.1),
            surface_potential=SurfacePotential(VectorExpression(["0", "t"])),
        )
        lifted = DiscreteField.from_nodal(adaptive, np.tile([0.0, 1.0], (adaptive.n_nodes, 1)))
        assert surface_work(2.0, lifted, model) == pytest.approx(2.0 * THIRD)
        unloaded = EnergyModel(bulk=BulkDensity("quadratic", 1.0), body=BodyPotential(0.1))
        assert surface_work(2.0, lifted, unloaded) == 0.0

    def test_derivative_actions_match_finite_differences(self, strip_mesh, loaded_model):
        rng = np.random.default_rng(5)
        adaptive = subdivide(strip_mesh, AdaptiveParams(0.2, rng.uniform(0.2, 0.8, strip_mesh.n_edges)))
        u = _random_field(adaptive, rng)
        psi = _random_field(adaptive, rng)
        t = 0.7
        actions = derivative_actions(t, u, psi, loaded_model)
        fd = (elastic_energy(t, u + H * psi, loaded_model) - elastic_energy(t, u - H * psi, loaded_model)) / (2 * H)
        assert fd == pytest.approx(actions.W_pair - actions.F_pair - actions.G_pair, rel=1e-6)
        fd_t = -(body_work(t + H, u, loaded_model) - body_work(t - H, u, loaded_model)) / (2 * H)
        assert -actions.F_rate == pytest.approx(fd_t, rel=1e-6, abs=1e-10)
        assert actions.G_pair == 0.0 and actions.G_rate == 0.0


class TestCoercivity:
    def test_degenerate_confinement_needs_acknowledgement(self, strip_mesh):
        model = EnergyModel(body=BodyPotential(0.0))
        with pytest.raises(DegenerateModel, match="allow_degenerate"):
            coercivity_constants(model, strip_mesh, 1.0)

    def test_degenerate_constants(self, strip_mesh, stretch_model):
        consts = coercivity_constants(stretch_model, strip_mesh, 1.0)
        assert not consts.controls_displacement
        assert consts.alpha0 == 1.0 and consts.beta0 == 0.0
        assert consts.lower_bound(2.0, 5.0) == 2.0

    def test_unloaded_confined_constants(self, strip_mesh, confined_model):
        consts = coercivity_constants(confined_model, strip_mesh, 1.0)
        assert consts.controls_displacement
        assert consts.alpha0 == pytest.approx(0.1)
        assert consts.alpha1 == pytest.approx(1.0)
        assert consts.beta0 == 0.0

    def test_bounds_hold_on_random_fields(self, strip_mesh, loaded_model):
        horizon = 1.0
        consts = coercivity_constants(loaded_model, strip_mesh, horizon)
        assert consts.sup_force > 0
        assert 0 < consts.beta0 < math.inf
        rng = np.random.default_rng(6)
        adaptive = subdivide(strip_mesh, AdaptiveParams(0.2, rng.uniform(0.2, 0.8, strip_mesh.n_edges)))
        for trial in range(200):
            u = _random_field(adaptive, rng, scale=10.0 ** rng.uniform(-2, 1))
            t = rng.uniform(0, horizon)
            norms = lp_norms(u, loaded_model)
            energy = elastic_energy(t, u, loaded_model)
            slack = 1e-10 * (1.0 + abs(energy))
            assert energy >= consts.lower_bound(norms["grad_p"], norms["u_q"]) - slack
            assert energy <= consts.alpha1 * (norms["grad_p"] + norms["u_q"]) + consts.beta1 + slack

    def test_trace_constant_without_traction(self, strip_mesh):
        assert trace_constant(strip_mesh, 0.2) == 1.0
