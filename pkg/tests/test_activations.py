import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from neuronlab.activations import (
    make_absolute,
    make_identity,
    make_leaky_relu,
    make_periodic,
    make_relu,
    make_sigmoid,
    make_softplus,
    parse_activation,
)
from neuronlab.errors import ConfigError, InvalidConventionError

LIBRARY = [
    make_relu(),
    make_relu(0.5),
    make_leaky_relu(0.01),
    make_leaky_relu(0.5),
    make_softplus(),
    make_sigmoid(),
    make_identity(),
    make_absolute(),
    make_periodic(2.0),
]


class TestRelu:
    def test_value_negative(self):
        assert make_relu(1.0).value(-2.0) == 0.0

    def test_kink_convention_default(self):
        # Appendix-style convention sigma'(z) = 1(z >= 0)
        assert make_relu(1.0).derivative(0.0) == 1.0

    def test_kink_convention_half(self):
        assert make_relu(0.5).derivative(0.0) == 0.5

    def test_kink_zero_convention(self):
        assert make_relu(0.0).derivative(0.0) == 0.0

    def test_invalid_convention_rejected(self):
        with pytest.raises(InvalidConventionError):
            make_relu(1.5)
        with pytest.raises(InvalidConventionError):
            make_relu(-0.1)

    def test_vectorized_derivative_matches_scalar(self):
        act = make_relu(0.25)
        z = np.array([-1.0, 0.0, 2.0])
        np.testing.assert_array_equal(act.derivative(z), [0.0, 0.25, 1.0])


class TestStandardLibrary:
    def test_identity_derivative(self):
        assert make_identity().derivative(3.7) == 1.0

    def test_softplus_at_zero(self):
        assert make_softplus().value(0.0) == pytest.approx(np.log(2.0), rel=1e-12)

    def test_sigmoid_derivative_at_zero(self):
        assert make_sigmoid().derivative(0.0) == pytest.approx(0.25, rel=1e-12)

    def test_leaky_relu_slope_validation(self):
        with pytest.raises(ValueError):
            make_leaky_relu(0.0)
        with pytest.raises(ValueError):
            make_leaky_relu(1.0)

    def test_sigmoid_gamma_is_value_at_interval_end(self):
        act = make_sigmoid()
        alpha = 0.7
        assert act.derivative_floor(alpha) == pytest.approx(
            float(act.derivative(2 * alpha)), rel=1e-12
        )


class TestPeriodic:
    def test_periodicity(self):
        act = make_periodic(2.0)
        assert act.value(0.0) == act.value(2.0)
        z = np.linspace(-3, 3, 101)
        np.testing.assert_allclose(act.value(z), act.value(z + 2.0), atol=1e-12)

    def test_rising_segment(self):
        assert make_periodic(2.0).value(0.5) == 0.5

    def test_lipschitz_on_random_pairs(self):
        act = make_periodic(2.0)
        rng = np.random.default_rng(0)
        z1 = rng.uniform(-50, 50, 10_000)
        z2 = rng.uniform(-50, 50, 10_000)
        assert np.all(np.abs(act.value(z1) - act.value(z2)) <= np.abs(z1 - z2) + 1e-12)

    def test_not_monotone(self):
        act = make_periodic(2.0)
        assert not act.is_monotone
        assert act.derivative_floor(1.0) == 0.0

    def test_period_validation(self):
        with pytest.raises(ValueError):
            make_periodic(0.0)


class TestInvariants:
    @pytest.mark.parametrize("act", LIBRARY, ids=lambda a: a.name)
    def test_weak_monotonicity_by_sampling(self, act):
        if not act.is_monotone:
            pytest.skip("non-monotone member")
        rng = np.random.default_rng(1)
        z = np.sort(rng.uniform(-20, 20, 2000))
        vals = act.value(z)
        assert np.all(np.diff(vals) >= -1e-12)

    @pytest.mark.parametrize("act", LIBRARY, ids=lambda a: a.name)
    def test_lipschitz_with_c2(self, act):
        rng = np.random.default_rng(2)
        z1 = rng.uniform(-20, 20, 5000)
        z2 = rng.uniform(-20, 20, 5000)
        lhs = np.abs(act.value(z1) - act.value(z2))
        assert np.all(lhs <= act.derivative_upper_bound * np.abs(z1 - z2) + 1e-12)

    @pytest.mark.parametrize("act", LIBRARY, ids=lambda a: a.name)
    def test_derivative_matches_finite_differences(self, act):
        # central differences, points kept 1e-4 away from kinks
        rng = np.random.default_rng(3)
        z = rng.uniform(-10, 10, 500)
        for kink in act.kink_points:
            z = z[np.abs(z - kink) > 1e-4]
        if act.name.startswith("periodic"):
            period = 2.0
            s = np.mod(z, period)
            for kink in (0.0, period / 2, period):
                z = z[np.abs(np.mod(z, period) - kink) > 1e-4]
        h = 1e-6
        fd = (act.value(z + h) - act.value(z - h)) / (2 * h)
        exact = act.derivative(z)
        scale = np.maximum(np.abs(exact), 1e-3)
        assert np.all(np.abs(fd - exact) / scale < 1e-5)

    @pytest.mark.parametrize("act", LIBRARY, ids=lambda a: a.name)
    def test_kink_convention_between_one_sided_derivatives(self, act):
        eps = 1e-9
        for kink, chosen in zip(act.kink_points, act.kink_convention):
            left = float(act.derivative(kink - eps))
            right = float(act.derivative(kink + eps))
            lo, hi = min(left, right), max(left, right)
            assert lo - 1e-12 <= chosen <= hi + 1e-12

    @pytest.mark.parametrize("act", LIBRARY, ids=lambda a: a.name)
    def test_derivative_bounds_hold_on_samples(self, act):
        rng = np.random.default_rng(4)
        z = rng.uniform(-20, 20, 5000)
        d = act.derivative(z)
        assert np.all(d <= act.derivative_upper_bound + 1e-12)
        assert np.all(d >= act.derivative_lower_bound - 1e-12)


@given(z1=st.floats(-100, 100), z2=st.floats(-100, 100))
@settings(max_examples=200, deadline=None)
def test_relu_monotone_and_lipschitz_property(z1, z2):
    act = make_relu()
    assert (act.value(z2) - act.value(z1)) * (z2 - z1) >= 0
    assert abs(act.value(z1) - act.value(z2)) <= abs(z1 - z2) + 1e-12


@given(
    period=st.floats(0.1, 10.0),
    z1=st.floats(-50, 50),
    z2=st.floats(-50, 50),
)
@settings(max_examples=200, deadline=None)
def test_periodic_lipschitz_property(period, z1, z2):
    act = make_periodic(period)
    assert abs(act.value(z1) - act.value(z2)) <= abs(z1 - z2) + 1e-9


class TestParsing:
    @pytest.mark.parametrize(
        "key,name",
        [
            ("relu", "relu"),
            ("relu@0.5", "relu@0.5"),
            ("leaky_relu:0.01", "leaky_relu:0.01"),
            ("softplus", "softplus"),
            ("sigmoid", "sigmoid"),
            ("identity", "identity"),
            ("abs", "abs"),
            ("periodic:2.0", "periodic:2"),
        ],
    )
    def test_roundtrip(self, key, name):
        assert parse_activation(key).name == name

    def test_unknown_key_names_the_key(self):
        with pytest.raises(ConfigError, match="rleu"):
            parse_activation("rleu")

    def test_bad_convention_via_key(self):
        with pytest.raises(InvalidConventionError):
            parse_activation("relu@1.5")
