import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from agma.channel import (
    ChannelModel,
    ChannelRealization,
    Constant,
    Rayleigh,
    Uniform,
    fdm_aggregate,
    mac_aggregate,
    moment_check,
    sample_realization,
)
from agma.exceptions import DimensionError


class TestGainLaws:
    def test_rayleigh_moments(self):
        g = Rayleigh(2.0)
        assert g.mean == pytest.approx(2.0 * math.sqrt(math.pi / 2))
        assert g.variance == pytest.approx((4 - math.pi) / 2 * 4.0)

    def test_uniform_moments(self):
        g = Uniform(1.0, 3.0)
        assert g.mean == 2.0
        assert g.variance == pytest.approx(4.0 / 12.0)

    def test_invalid_parameters(self):
        with pytest.raises(ValueError):
            Rayleigh(0.0)
        with pytest.raises(ValueError):
            Uniform(-0.1, 1.0)
        with pytest.raises(ValueError):
            Uniform(1.0, 1.0)
        with pytest.raises(ValueError):
            Constant(0.0)


class TestChannelModel:
    def test_moments_validated_against_law(self):
        with pytest.raises(ValueError):
            ChannelModel(Constant(1.0), mu_h=1.1, sigma_h_sq=0.0)
        with pytest.raises(ValueError):
            ChannelModel(Uniform(0.0, 2.0), mu_h=1.0, sigma_h_sq=0.5)

    def test_rayleigh_constructor_matches_mean(self):
        model = ChannelModel.rayleigh(1.0)
        assert model.mu_h == pytest.approx(1.0, abs=1e-12)
        assert model.cv_h ** 2 == pytest.approx((4 - math.pi) / math.pi)

    def test_rayleigh_rejects_inconsistent_variance(self):
        with pytest.raises(ValueError, match="uniform"):
            ChannelModel.rayleigh(1.0, sigma_h_sq=0.5)
        ok = ChannelModel.rayleigh(1.0, sigma_h_sq=(4 - math.pi) / math.pi)
        assert ok.sigma_h_sq == pytest.approx((4 - math.pi) / math.pi)

    def test_uniform_constructor(self):
        model = ChannelModel.uniform(1.5, 0.5)
        assert model.gain.lo == pytest.approx(1.5 - math.sqrt(1.5))
        assert model.sigma_h_sq == pytest.approx(0.5)
        with pytest.raises(ValueError, match="negative"):
            ChannelModel.uniform(1.0, 0.5)
        assert isinstance(ChannelModel.uniform(2.0, 0.0).gain, Constant)

    def test_invalid_scalars(self):
        with pytest.raises(ValueError):
            ChannelModel.constant(1.0, E_N=0.0)
        with pytest.raises(ValueError):
            ChannelModel.constant(1.0, sigma_w_sq=-1.0)

    def test_replace(self):
        model = ChannelModel.rayleigh(1.0).replace(E_N=10.0)
        assert model.E_N == 10.0


class TestSampleRealization:
    def test_degenerate_channel(self):
        r = sample_realization(ChannelModel.constant(1.0, sigma_w_sq=0.0), 4, 3, np.random.default_rng(0))
        np.testing.assert_array_equal(r.gains, np.ones(4))
        np.testing.assert_array_equal(r.noise, np.zeros(3))

    def test_rayleigh_mean_within_four_standard_errors(self):
        model = ChannelModel.rayleigh(1.0)
        gains = sample_realization(model, 1_000_000, 1, np.random.default_rng(1)).gains
        se = gains.std() / math.sqrt(gains.size)
        assert abs(gains.mean() - 1.0) < 4 * se
        assert gains.min() >= 0.0

    def test_noise_variance(self):
        model = ChannelModel.constant(1.0, sigma_w_sq=1.0, E_N=1.0)
        rng = np.random.default_rng(2)
        noise = np.array([sample_realization(model, 10, 3, rng).noise for _ in range(100_000)])
        # per-coordinate variance 1/100; relative SE of a variance estimate is sqrt(2/n)
        np.testing.assert_allclose(noise.var(axis=0), 0.01, rtol=5 * math.sqrt(2 / noise.shape[0]))

    def test_same_seed_same_realization(self):
        model = ChannelModel.uniform(1.5, 0.5)
        a = sample_realization(model, 7, 4, np.random.default_rng(3))
        b = sample_realization(model, 7, 4, np.random.default_rng(3))
        assert a.gains.tobytes() == b.gains.tobytes()
        assert a.noise.tobytes() == b.noise.tobytes()

    def test_invalid_sizes(self):
        with pytest.raises(ValueError):
            sample_realization(ChannelModel.rayleigh(), 0, 3, np.random.default_rng())


class TestMacAggregate:
    def test_unit_channel_is_average(self):
        g = np.array([1.0, -2.0, 3.0])
        out = mac_aggregate(np.tile(g, (5, 1)), ChannelRealization(np.ones(5), np.zeros(3)))
        np.testing.assert_allclose(out, g)

    def test_erased_node(self):
        a, b = np.array([1.0, 2.0]), np.array([5.0, -7.0])
        out = mac_aggregate(np.vstack([a, b]), ChannelRealization(np.array([2.0, 0.0]), np.zeros(2)))
        np.testing.assert_allclose(out, a)

    @given(seed=st.integers(0, 2**32 - 1), N=st.integers(1, 12), d=st.integers(1, 6))
    def test_matches_direct_summation(self, seed, N, d):
        r = np.random.default_rng(seed)
        grads = r.standard_normal((N, d))
        gains = r.rayleigh(1.0, N)
        noise = r.standard_normal(d)
        expected = noise.copy()
        for n in range(N):
            for i in range(d):
                expected[i] += gains[n] * grads[n, i] / N
        out = mac_aggregate(grads, ChannelRealization(gains, noise))
        np.testing.assert_allclose(out, expected, rtol=1e-12, atol=1e-12)

    def test_constant_gain_scales_mean(self):
        r = np.random.default_rng(4)
        grads = r.standard_normal((6, 3))
        out = mac_aggregate(grads, ChannelRealization(np.full(6, 2.5), np.zeros(3)))
        np.testing.assert_allclose(out, 2.5 * grads.mean(axis=0), rtol=1e-14)

    def test_shape_errors(self):
        with pytest.raises(DimensionError):
            mac_aggregate(np.zeros((3, 2)), ChannelRealization(np.ones(4), np.zeros(2)))
        with pytest.raises(DimensionError):
            mac_aggregate(np.zeros((3, 2)), ChannelRealization(np.ones(3), np.zeros(5)))
        with pytest.raises(DimensionError):
            mac_aggregate(np.zeros(3), ChannelRealization(np.ones(3), np.zeros(1)))


class TestFdmAggregate:
    def test_noiseless_unit_channel_is_average(self):
        grads = np.random.default_rng(5).standard_normal((4, 3))
        out = fdm_aggregate(grads, ChannelModel.constant(1.0, sigma_w_sq=0.0), np.random.default_rng(0))
        np.testing.assert_allclose(out, grads.mean(axis=0), rtol=1e-14)

    def test_noise_averages_over_nodes(self):
        model = ChannelModel.constant(1.0, sigma_w_sq=1.0, E_N=1.0)
        rng = np.random.default_rng(6)
        grads = np.zeros((100, 2))
        out = np.array([fdm_aggregate(grads, model, rng) for _ in range(50_000)])
        np.testing.assert_allclose(out.var(axis=0), 0.01, rtol=5 * math.sqrt(2 / out.shape[0]))

    def test_single_node_matches_mac_in_distribution(self):
        model = ChannelModel.rayleigh(1.0, sigma_w_sq=0.5)
        g = np.array([[1.0, -1.0]])
        rng_a, rng_b = np.random.default_rng(7), np.random.default_rng(8)
        mac = np.array([mac_aggregate(g, sample_realization(model, 1, 2, rng_a)) for _ in range(40_000)])
        fdm = np.array([fdm_aggregate(g, model, rng_b) for _ in range(40_000)])
        # two-sample comparison of means and variances per coordinate
        se_mean = np.sqrt(mac.var(axis=0) / 40_000 + fdm.var(axis=0) / 40_000)
        assert np.all(np.abs(mac.mean(axis=0) - fdm.mean(axis=0)) < 5 * se_mean)
        np.testing.assert_allclose(mac.var(axis=0), fdm.var(axis=0), rtol=0.05)


class TestMomentCheck:
    def test_deterministic_channel_has_no_mean_error(self, small_logistic):
        model = ChannelModel.constant(1.7, sigma_w_sq=0.0)
        res = moment_check(model, small_logistic, np.ones(4), 1000, rng=0)
        assert res.mean_error < 1e-14
        assert res.second_moment_error < 1e-14

    def test_uniform_gains_within_five_standard_errors(self, small_logistic):
        model = ChannelModel.uniform(1.5, 0.5, sigma_w_sq=1.0)
        z = np.random.default_rng(9).standard_normal(4)
        res = moment_check(model, small_logistic, z, 100_000, rng=10)
        assert res.mean_z < 5 and res.second_moment_z < 5

    def test_at_optimum_mean_is_noise_only(self, small_logistic):
        model = ChannelModel.rayleigh(1.0, sigma_w_sq=1.0)
        res = moment_check(model, small_logistic, small_logistic.constants.theta_star, 20_000, rng=11)
        # grad F(theta*) = 0, so the reported mean error is absolute
        assert res.mean_error < 0.01
        assert res.mean_z < 5

    def test_needs_enough_replications(self, small_logistic):
        with pytest.raises(ValueError):
            moment_check(ChannelModel.rayleigh(), small_logistic, np.zeros(4), 999)
