import numpy as np
import pytest

from neuronlab.distributions import (
    adversarial_instance,
    gaussian,
    marginal_2d,
    parse_distribution,
    spread_params_for_gaussian,
    uniform_ball,
    uniform_sphere,
)
from neuronlab.errors import (
    ConfigError,
    DegenerateSubspaceError,
    DimensionMismatchError,
)


def _rng(seed=0):
    return np.random.default_rng(seed)


class TestGaussian:
    def test_standard_moments(self):
        dist = gaussian(2)
        x = dist.sample(_rng(), 10**6)
        se = 1.0 / np.sqrt(10**6)
        assert np.all(np.abs(x.mean(axis=0)) < 4 * se)

    def test_shifted_mean(self):
        dist = gaussian(2, mean=(0.0, 1.0), variance=1.0)
        x = dist.sample(_rng(), 10**6)
        se = 1.0 / np.sqrt(10**6)
        assert np.all(np.abs(x.mean(axis=0) - [0.0, 1.0]) < 4 * se)
        assert not dist.is_spherically_symmetric
        assert dist.spread_params is None

    def test_orthogonal_invariance_of_moments(self):
        dist = gaussian(3)
        assert dist.is_spherically_symmetric
        n = 10**5
        x = dist.sample(_rng(1), n)
        a, _ = np.linalg.qr(_rng(2).standard_normal((3, 3)))
        y = dist.sample(_rng(3), n) @ a.T
        se_mean = np.sqrt(x.var(axis=0) / n + y.var(axis=0) / n)
        assert np.all(np.abs(x.mean(axis=0) - y.mean(axis=0)) < 4 * se_mean)
        mx = x[:, :, None] * x[:, None, :]
        my = y[:, :, None] * y[:, None, :]
        se_sec = np.sqrt(mx.var(axis=0) / n + my.var(axis=0) / n)
        assert np.all(np.abs(mx.mean(axis=0) - my.mean(axis=0)) < 4 * se_sec)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            gaussian(3, mean=(0.0, 1.0))

    def test_variance_validation(self):
        with pytest.raises(ValueError):
            gaussian(2, variance=0.0)


class TestBallAndSphere:
    def test_sphere_norms(self):
        dist = uniform_sphere(5, 1.0)
        x = dist.sample(_rng(), 20_000)
        np.testing.assert_allclose(np.linalg.norm(x, axis=1), 1.0, atol=1e-12)

    def test_ball_radial_mass(self):
        # area scaling: P(|x| <= r/2) = 1/4 in 2D
        dist = uniform_ball(2, 1.0)
        n = 10**5
        x = dist.sample(_rng(), n)
        frac = float((np.linalg.norm(x, axis=1) <= 0.5).mean())
        se = np.sqrt(0.25 * 0.75 / n)
        assert abs(frac - 0.25) < 4 * se

    def test_ball_support_bound(self):
        dist = uniform_ball(3, 2.0)
        assert dist.support_bound_sq == 4.0
        x = dist.sample(_rng(), 10**5)
        assert np.all((x**2).sum(axis=1) <= 4.0 + 1e-12)

    def test_sphere_metadata(self):
        dist = uniform_sphere(4, 1.5)
        assert dist.is_spherically_symmetric
        assert dist.support_bound_sq == pytest.approx(2.25)


class TestSpreadParams:
    def test_alpha_one_matches_grid_minimum(self):
        # oracle: minimize the 2D standard normal density over the disk
        alpha, beta = spread_params_for_gaussian(1.0)
        assert alpha == 1.0
        assert beta == pytest.approx(0.09653, abs=5e-6)
        g = np.linspace(-1.0, 1.0, 401)
        xx, yy = np.meshgrid(g, g)
        mask = xx**2 + yy**2 <= 1.0
        dens = np.exp(-(xx**2 + yy**2) / 2) / (2 * np.pi)
        assert dens[mask].min() == pytest.approx(beta, rel=1e-3)

    def test_alpha_to_zero_limit(self):
        _, beta = spread_params_for_gaussian(1e-9)
        assert beta == pytest.approx(1.0 / (2 * np.pi), rel=1e-9)

    def test_alpha_two(self):
        _, beta = spread_params_for_gaussian(2.0)
        assert beta == pytest.approx(np.exp(-2.0) / (2 * np.pi), rel=1e-12)
        assert beta == pytest.approx(0.021539, abs=1e-6)

    def test_validation(self):
        with pytest.raises(ValueError):
            spread_params_for_gaussian(0.0)


class TestAdversarialInstance:
    def test_all_half_probs_give_negative_signs(self):
        ds = adversarial_instance(4, [0.5] * 4)
        np.testing.assert_array_equal(ds.signs, [-1.0, -1.0, -1.0, -1.0])
        np.testing.assert_allclose(ds.target, [-0.5] * 4)
        assert np.linalg.norm(ds.target) == pytest.approx(1.0, abs=1e-15)

    def test_sign_rule(self):
        ds = adversarial_instance(2, [0.1, 0.9])
        np.testing.assert_array_equal(ds.signs, [1.0, -1.0])

    def test_points_are_orthonormal_signed_basis(self):
        ds = adversarial_instance(6, [0.3] * 6)
        gram = ds.points @ ds.points.T
        np.testing.assert_allclose(gram, np.eye(6), atol=1e-15)
        assert np.all(np.abs(ds.points).sum(axis=1) == 1.0)

    def test_distribution_view(self):
        ds = adversarial_instance(4, [0.5] * 4)
        dist = ds.distribution()
        assert dist.is_discrete
        assert dist.support_bound_sq == 1.0
        np.testing.assert_allclose(dist.weights, 0.25)
        x = dist.sample(_rng(), 1000)
        norms = np.linalg.norm(x, axis=1)
        np.testing.assert_allclose(norms, 1.0, atol=1e-15)

    def test_length_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            adversarial_instance(3, [0.5, 0.5])


class TestMarginal2d:
    def test_gaussian_marginal_is_standard_2d(self):
        dist = gaussian(5)
        w = np.array([1.0, 0.0, 0.2, 0.0, 0.0])
        v = np.array([0.0, 1.0, 0.0, -0.3, 0.0])
        n = 10**6
        y = marginal_2d(dist, w, v, n, _rng(4))
        se = 1.0 / np.sqrt(n)
        assert np.all(np.abs(y.mean(axis=0)) < 4 * se)
        cov = np.cov(y.T)
        assert np.all(np.abs(cov - np.eye(2)) < 4 * np.sqrt(2.0 / n) + 4 * se)

    def test_projection_contracts_norm(self):
        dist = uniform_sphere(3, 1.0)
        y = marginal_2d(dist, np.array([1.0, 0, 0]), np.array([0, 1.0, 0]), 10_000, _rng(5))
        assert np.all(np.linalg.norm(y, axis=1) <= 1.0 + 1e-12)

    def test_histogram_density_floor(self):
        # every fully inside-disk bin has density >= 0.9 * beta(alpha=1)
        dist = gaussian(4)
        w = np.eye(4)[0]
        v = np.eye(4)[1]
        n = 10**6
        y = marginal_2d(dist, w, v, n, _rng(6))
        edges = np.linspace(-1.0, 1.0, 11)
        hist, _, _ = np.histogram2d(y[:, 0], y[:, 1], bins=[edges, edges])
        width = edges[1] - edges[0]
        centers = (edges[:-1] + edges[1:]) / 2
        cx, cy = np.meshgrid(centers, centers, indexing="ij")
        inside = np.sqrt(cx**2 + cy**2) + width * np.sqrt(2) / 2 <= 1.0
        density = hist / (n * width**2)
        _, beta = spread_params_for_gaussian(1.0)
        assert np.all(density[inside] >= 0.9 * beta)

    def test_parallel_vectors_rejected(self):
        dist = gaussian(3)
        w = np.array([1.0, 1.0, 0.0])
        with pytest.raises(DegenerateSubspaceError):
            marginal_2d(dist, w, 2.0 * w, 10, _rng())

    def test_spherical_invariance_across_spans(self):
        dist = gaussian(4)
        n = 10**5
        y1 = marginal_2d(dist, np.eye(4)[0], np.eye(4)[1], n, _rng(7))
        y2 = marginal_2d(dist, np.ones(4), np.array([1.0, -1.0, 2.0, 0.0]), n, _rng(8))
        se = np.sqrt(y1.var(axis=0) / n + y2.var(axis=0) / n)
        assert np.all(np.abs(y1.mean(axis=0) - y2.mean(axis=0)) < 4 * se)
        r1 = (y1**2).sum(axis=1)
        r2 = (y2**2).sum(axis=1)
        se_r = np.sqrt(r1.var() / n + r2.var() / n)
        assert abs(r1.mean() - r2.mean()) < 4 * se_r


class TestDeterminism:
    @pytest.mark.parametrize(
        "factory",
        [
            lambda: gaussian(3),
            lambda: uniform_ball(3, 1.0),
            lambda: uniform_sphere(3, 1.0),
            lambda: adversarial_instance(4, [0.5] * 4).distribution(),
        ],
    )
    def test_same_seed_same_stream(self, factory):
        dist = factory()
        x1 = dist.sample(_rng(42), 1000)
        x2 = dist.sample(_rng(42), 1000)
        np.testing.assert_array_equal(x1, x2)


class TestParsing:
    def test_gaussian_keys(self):
        d1 = parse_distribution("gaussian:mean=0,var=1", 3)
        assert d1.is_spherically_symmetric
        d2 = parse_distribution("gaussian:mean=(0,1),var=1", 2)
        np.testing.assert_array_equal(d2.params["mean"], [0.0, 1.0])

    def test_ball_sphere_keys(self):
        assert parse_distribution("ball:r=1", 4).kind == "ball"
        assert parse_distribution("sphere:r=2", 4).support_bound_sq == 4.0

    def test_unknown_key(self):
        with pytest.raises(ConfigError, match="blob"):
            parse_distribution("blob:r=1", 2)
