import math

import numpy as np
import pytest
from scipy.integrate import quad

from neuronlab.activations import make_identity, make_relu
from neuronlab.distributions import adversarial_instance, gaussian, uniform_ball
from neuronlab.errors import (
    DimensionMismatchError,
    UndefinedAngleError,
    UnsupportedDistributionError,
)
from neuronlab.objective import (
    Problem,
    angle_between,
    batch_gradient_and_loss,
    closed_form_gradient,
    closed_form_loss,
    directional_gradient_mc,
    finite_difference_gradient,
    gradient_closed_form_gaussian_relu,
    loss_closed_form_gaussian_relu,
    population_gradient_exact_discrete,
    population_gradient_mc,
    population_loss_exact_discrete,
    population_loss_mc,
    stochastic_gradient,
)


def _unit(v):
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)


def _gauss_relu_problem(d=5, seed=0):
    rng = np.random.default_rng(seed)
    v = _unit(rng.standard_normal(d))
    return Problem(gaussian(d), make_relu(), v)


class TestAngle:
    def test_right_angle(self):
        assert angle_between([1, 0], [0, 1]) == pytest.approx(np.pi / 2, rel=1e-12)

    def test_stability_near_zero_and_pi(self):
        v = np.array([1.0, 0.0])
        w = np.array([1.0, 1e-9])
        assert angle_between(w, v) == pytest.approx(1e-9, rel=1e-6)
        w = np.array([-1.0, 1e-9])
        assert angle_between(w, v) == pytest.approx(np.pi - 1e-9, rel=1e-9)

    def test_zero_vector_rejected(self):
        with pytest.raises(UndefinedAngleError):
            angle_between([0.0, 0.0], [1.0, 0.0])


class TestPopulationLossMC:
    def test_global_minimum_is_exact_zero(self):
        p = _gauss_relu_problem()
        loss, se = population_loss_mc(p, p.target, 10_000, seed=1)
        assert loss == 0.0 and se == 0.0

    def test_relu_loss_at_origin_quadrature_oracle(self):
        # E[max(0,z)^2]/2 for z ~ N(0,1), via quadrature
        oracle, _ = quad(
            lambda z: 0.5 * z**2 * np.exp(-z * z / 2) / np.sqrt(2 * np.pi), 0, 12
        )
        assert oracle == pytest.approx(0.25, abs=1e-10)
        p = _gauss_relu_problem(d=5, seed=2)
        n = 10**6
        loss, se = population_loss_mc(p, np.zeros(5), n, seed=3)
        assert abs(loss - oracle) < 4 * se

    def test_adversarial_flat_side_exact_sixteenth(self):
        ds = adversarial_instance(8, [0.5] * 8)
        p = Problem(ds.distribution(), make_relu(0.0), ds.target)
        w = np.abs(np.random.default_rng(4).standard_normal(8))  # signs are -1: w.x_i <= 0
        loss, se = population_loss_mc(p, w, 20_000, seed=5)
        assert loss == pytest.approx(1.0 / 16.0, abs=1e-15)
        assert se < 1e-9  # identical atom values; tiny cancellation residue only


class TestExactDiscreteLoss:
    def test_minimum(self):
        ds = adversarial_instance(4, [0.5] * 4)
        p = Problem(ds.distribution(), make_relu(0.0), ds.target)
        assert population_loss_exact_discrete(p, ds.target) == 0.0

    def test_origin_hand_enumeration(self):
        # each term sigma(b_i^2 / sqrt(d))^2 = 1/d; F = (1/2d) * d * (1/d)
        ds = adversarial_instance(4, [0.5] * 4)
        p = Problem(ds.distribution(), make_relu(0.0), ds.target)
        assert population_loss_exact_discrete(p, np.zeros(4)) == pytest.approx(1 / 8)

    def test_single_stuck_coordinate_floor(self):
        ds = adversarial_instance(4, [0.5] * 4)
        p = Problem(ds.distribution(), make_relu(0.0), ds.target)
        w = ds.target.copy()
        w[0] = 0.1  # sign is -1, so w.x_0 = -0.1 <= 0: coordinate 0 stuck
        assert population_loss_exact_discrete(p, w) >= 1.0 / 32.0 - 1e-15

    def test_non_discrete_rejected(self):
        p = _gauss_relu_problem()
        with pytest.raises(UnsupportedDistributionError):
            population_loss_exact_discrete(p, p.target)


class TestPopulationGradientMC:
    def test_zero_at_minimum(self):
        p = _gauss_relu_problem(seed=6)
        est = population_gradient_mc(p, p.target, 10**5, seed=7)
        assert np.all(np.abs(est.mean) <= 4 * est.std_err)

    def test_matches_closed_form(self):
        p = _gauss_relu_problem(d=4, seed=8)
        w = np.array([0.8, -0.2, 0.5, 0.1])
        est = population_gradient_mc(p, w, 10**6, seed=9)
        exact = gradient_closed_form_gaussian_relu(w, p.target)
        assert np.all(np.abs(est.mean - exact) <= 4 * est.std_err)

    def test_identity_gradient_is_w_minus_v(self):
        d = 4
        rng = np.random.default_rng(10)
        p = Problem(gaussian(d), make_identity(), _unit(rng.standard_normal(d)))
        w = rng.standard_normal(d)
        est = population_gradient_mc(p, w, 10**6, seed=11)
        assert np.all(np.abs(est.mean - (w - p.target)) <= 4 * est.std_err)

    def test_std_err_halves_when_n_quadruples(self):
        p = _gauss_relu_problem(d=3, seed=12)
        w = np.array([0.5, 0.5, -0.5])
        se_n = population_gradient_mc(p, w, 50_000, seed=13).std_err
        se_4n = population_gradient_mc(p, w, 200_000, seed=13).std_err
        ratio = se_4n / se_n
        assert np.all(ratio > 0.4) and np.all(ratio < 0.6)


class TestStochasticGradient:
    def test_flat_side_gives_zero(self):
        p = _gauss_relu_problem(d=3, seed=14)
        w = np.array([1.0, 0.0, 0.0])
        x = np.array([-2.0, 0.3, 0.4])  # w.x < 0
        np.testing.assert_array_equal(stochastic_gradient(p, w, x), np.zeros(3))

    def test_average_equals_population_estimator(self):
        p = _gauss_relu_problem(d=3, seed=15)
        w = np.array([0.2, -0.7, 0.4])
        rng = np.random.default_rng(16)
        xs = p.dist.sample(rng, 500)
        avg = np.mean([stochastic_gradient(p, w, x) for x in xs], axis=0)
        grad, _ = batch_gradient_and_loss(p, w, xs)
        np.testing.assert_allclose(avg, grad, atol=1e-12)

    def test_norm_bound_on_bounded_support(self):
        # ||g||^2 <= c1^2 c2^4 ||w - v||^2 with c1 the support bound on ||x||^2
        d = 3
        rng = np.random.default_rng(17)
        p = Problem(uniform_ball(d, 1.0), make_relu(), _unit(rng.standard_normal(d)))
        w = rng.standard_normal(d)
        bound = 1.0**2 * 1.0**4 * np.sum((w - p.target) ** 2)
        for x in p.dist.sample(rng, 2000):
            g = stochastic_gradient(p, w, x)
            assert g @ g <= bound + 1e-12

    def test_shape_mismatch(self):
        p = _gauss_relu_problem(d=3)
        with pytest.raises(DimensionMismatchError):
            stochastic_gradient(p, np.zeros(3), np.zeros(4))


class TestClosedForms:
    def test_gradient_zero_at_target(self):
        v = _unit([2.0, -1.0, 0.5])
        np.testing.assert_allclose(
            gradient_closed_form_gaussian_relu(v, v), np.zeros(3), atol=1e-15
        )

    def test_gradient_worked_example(self):
        grad = gradient_closed_form_gaussian_relu(np.array([0.0, 1.0]), np.array([1.0, 0.0]))
        np.testing.assert_allclose(grad, [-0.25, 0.5 - 1 / (2 * np.pi)], atol=1e-12)
        assert grad[1] == pytest.approx(0.34085, abs=1e-5)

    def test_gradient_at_antipode(self):
        v = _unit([1.0, 2.0])
        w = -v
        np.testing.assert_allclose(
            gradient_closed_form_gaussian_relu(w, v), 0.5 * w, atol=1e-12
        )

    def test_gradient_undefined_at_origin(self):
        with pytest.raises(UndefinedAngleError):
            gradient_closed_form_gaussian_relu(np.zeros(2), np.array([1.0, 0.0]))

    def test_loss_at_target_and_origin(self):
        v = _unit([1.0, 1.0, 0.0])
        assert loss_closed_form_gaussian_relu(v, v) == pytest.approx(0.0, abs=1e-15)
        assert loss_closed_form_gaussian_relu(np.zeros(3), v) == pytest.approx(0.25, rel=1e-12)

    def test_loss_gradient_consistency_by_finite_differences(self):
        rng = np.random.default_rng(18)
        v = _unit(rng.standard_normal(3))
        for _ in range(5):
            w = rng.standard_normal(3)
            w *= rng.uniform(0.3, 1.8) / np.linalg.norm(w)
            if angle_between(w, v) < 0.1 or angle_between(w, v) > np.pi - 0.1:
                continue
            fd = finite_difference_gradient(
                lambda u: loss_closed_form_gaussian_relu(u, v), w
            )
            exact = gradient_closed_form_gaussian_relu(w, v)
            np.testing.assert_allclose(fd, exact, atol=1e-6)

    def test_resolver_covers_relu_and_identity(self):
        p = _gauss_relu_problem(d=3, seed=19)
        assert closed_form_gradient(p) is not None
        assert closed_form_loss(p) is not None
        pi = Problem(gaussian(3), make_identity(), p.target)
        w = np.array([0.3, 0.4, -0.1])
        np.testing.assert_allclose(closed_form_gradient(pi)(w), w - p.target)
        shifted = Problem(gaussian(2, mean=(0, 1)), make_relu(), np.array([1.0, 0.0]))
        assert closed_form_gradient(shifted) is None


class TestFiniteDifferences:
    def test_quadratic(self):
        w = np.array([1.0, -2.0, 0.5])
        fd = finite_difference_gradient(lambda u: 0.5 * float(u @ u), w)
        np.testing.assert_allclose(fd, w, atol=1e-8)

    def test_constant(self):
        fd = finite_difference_gradient(lambda u: 3.0, np.ones(4))
        np.testing.assert_array_equal(fd, np.zeros(4))

    def test_step_validation(self):
        with pytest.raises(ValueError):
            finite_difference_gradient(lambda u: 0.0, np.ones(2), h=0.0)


class TestCorrelationProperty:
    def test_monotone_activation_gives_nonnegative_correlation(self):
        # <grad F(w), w - v> >= 0 pointwise in expectation for monotone sigma
        rng = np.random.default_rng(20)
        p = _gauss_relu_problem(d=4, seed=21)
        for _ in range(5):
            w = rng.standard_normal(4)
            mean, se = directional_gradient_mc(p, w, w - p.target, 10**5, seed=22)
            assert mean >= -4 * se

    def test_gradient_nonvanishing_off_target(self):
        # closed form vanishes only at w = v away from the origin ray
        v = np.array([1.0, 0.0])
        for r in (0.5, 1.0, 2.0):
            for ang in np.linspace(0.1, np.pi - 0.3, 12):
                w = r * np.array([np.cos(ang), np.sin(ang)])
                if np.allclose(w, v):
                    continue
                g = gradient_closed_form_gaussian_relu(w, v)
                assert np.linalg.norm(g) > 1e-4


class TestDeterminism:
    def test_mc_estimates_reproducible(self):
        p = _gauss_relu_problem(d=3, seed=23)
        w = np.array([0.1, 0.2, 0.3])
        a = population_gradient_mc(p, w, 10_000, seed=99)
        b = population_gradient_mc(p, w, 10_000, seed=99)
        np.testing.assert_array_equal(a.mean, b.mean)
        np.testing.assert_array_equal(a.std_err, b.std_err)
