import numpy as np
import pytest

from src.benchmarks import (
    PHASE_FIELD_X0,
    build_kpp,
    build_logistic,
    build_named,
    build_phase_field,
    logistic_analytic,
)
from src.exceptions import InputError
from src.poly_ode import eval_rhs, jacobian


class TestLogistic:
    def test_equilibria(self, logistic):
        assert eval_rhs(logistic.ode, [0.0])[0] == 0.0
        assert eval_rhs(logistic.ode, [1.0])[0] == 0.0

    def test_default_initial_state(self, logistic):
        np.testing.assert_array_equal(logistic.default_x0, [0.1])

    def test_analytic_solution_solves_the_ode(self):
        t = np.linspace(0.0, 5.0, 11)
        h = 1e-5
        x = logistic_analytic(0.1, t)
        derivative = (logistic_analytic(0.1, t + h) - logistic_analytic(0.1, t - h)) / (2 * h)
        np.testing.assert_allclose(derivative, x - x**2, atol=1e-8)

    def test_analytic_solution_values(self):
        assert logistic_analytic(0.1, 0.0) == pytest.approx(0.1)
        assert logistic_analytic(0.1, 50.0) == pytest.approx(1.0)

    def test_analytic_solution_rejects_x0_outside_unit_interval(self):
        with pytest.raises(InputError):
            logistic_analytic(1.5, 1.0)


class TestKPP:
    def test_uniform_states_are_equilibria(self, kpp):
        np.testing.assert_array_equal(eval_rhs(kpp.ode, np.ones(8)), np.zeros(8))
        np.testing.assert_array_equal(eval_rhs(kpp.ode, np.zeros(8)), np.zeros(8))

    def test_default_initial_state(self, kpp):
        np.testing.assert_array_equal(kpp.default_x0, [0.1, 0.1, 0.1, 0.9, 0.9, 0.1, 0.1, 0.1])

    def test_rhs_at_initial_state(self, kpp):
        rhs = eval_rhs(kpp.ode, kpp.default_x0)
        assert rhs[3] == pytest.approx(-0.71)
        assert rhs[0] == pytest.approx(0.09)

    def test_ring_wraps_around(self, kpp):
        jac = jacobian(kpp.ode, np.zeros(8))
        assert jac[0, 7] == 1.0
        assert jac[7, 0] == 1.0
        assert jac[0, 0] == -1.0

    def test_translation_equivariance(self, kpp, rng):
        u = rng.uniform(0, 1, 8)
        np.testing.assert_allclose(eval_rhs(kpp.ode, np.roll(u, 1)), np.roll(eval_rhs(kpp.ode, u), 1), atol=1e-15)

    def test_small_ring_is_rejected(self):
        with pytest.raises(InputError):
            build_kpp(n=2)


class TestPhaseField:
    @pytest.mark.parametrize("value", [-1.0, 0.2, 1.0])
    def test_uniform_roots_are_equilibria(self, phase_field, value):
        np.testing.assert_allclose(eval_rhs(phase_field.ode, np.full(8, value)), np.zeros(8), atol=1e-15)

    def test_default_reaction_relaxes_towards_minus_one(self, phase_field):
        jac = jacobian(phase_field.ode, np.full(8, -1.0))
        assert np.max(np.linalg.eigvalsh(jac)) < 0

    def test_printed_sign_flips_the_reaction(self):
        relaxing = build_phase_field()
        printed = build_phase_field(printed_sign=True)
        x = np.full(8, 0.5)
        np.testing.assert_allclose(eval_rhs(printed.ode, x), -eval_rhs(relaxing.ode, x), atol=1e-15)

    def test_default_initial_state(self, phase_field):
        np.testing.assert_array_equal(phase_field.default_x0, PHASE_FIELD_X0)

    def test_coefficients(self, phase_field):
        content = phase_field.ode.term_content()
        assert content[(0, 0, ())] == pytest.approx(-0.2)
        assert content[(1, 0, (0,))] == -1.0
        assert content[(2, 0, (0, 0))] == pytest.approx(0.2)
        assert content[(3, 0, (0, 0, 0))] == -1.0

    def test_custom_size_needs_an_initial_state(self):
        with pytest.raises(InputError):
            build_phase_field(n=6)
        assert build_phase_field(n=6, x0=np.zeros(6)).ode.n == 6


class TestBuildNamed:
    def test_dispatch(self):
        assert build_named("logistic").ode.n == 1
        assert build_named("kpp", n=5).ode.n == 5
        assert build_named("phase-field", beta=-0.1).label == "phase-field"

    def test_logistic_with_custom_x0(self):
        assert build_named("logistic", x0=(0.3,)).default_x0[0] == 0.3

    def test_unknown_model(self):
        with pytest.raises(InputError):
            build_named("lorenz")

    def test_logistic_is_scalar(self):
        with pytest.raises(InputError):
            build_named("logistic", n=3)

    def test_kpp_uses_default_when_unspecified(self):
        assert build_kpp().ode.n == 8
        assert build_logistic(0.3).default_x0[0] == 0.3


def test_logistic_analytic_hits_nine_tenths():
    assert logistic_analytic(0.1, np.log(81.0)) == pytest.approx(0.9)


def test_logistic_rhs_at_default_state(logistic):
    assert eval_rhs(logistic.ode, logistic.default_x0)[0] == pytest.approx(0.09)
