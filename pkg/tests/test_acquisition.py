"""Acquisition formulas, the beta schedule, and spectral sample paths."""

import numpy as np
import pytest

from mobo.acquisition import (
    AcquisitionSpec,
    BetaSchedule,
    beta_t,
    cheap_objective,
    draw_prior_path,
    draw_sample_path,
    ei,
    lcb,
    log_ei,
    make_cheap_objectives,
    ucb,
)
from mobo.gp import SeKernelParams, fit, se_kernel


class TestBetaSchedule:
    def test_lemma_value(self):
        sched = BetaSchedule(cardinality_proxy=1000, delta=0.05)
        assert beta_t(sched, 2) == pytest.approx(
            2 * np.log(1000 * np.pi**2 * 4 / 0.3), rel=1e-12
        )
        assert beta_t(sched, 2) == pytest.approx(23.57, abs=0.01)

    def test_monotone_in_t(self):
        sched = BetaSchedule()
        assert beta_t(sched, 2) > beta_t(sched, 1)

    def test_positive_near_delta_one(self):
        sched = BetaSchedule(cardinality_proxy=10.0, delta=0.999)
        assert beta_t(sched, 1) > 0

    def test_validation(self):
        with pytest.raises(ValueError):
            BetaSchedule(delta=1.5)
        with pytest.raises(ValueError):
            BetaSchedule(cardinality_proxy=0.5)


class TestConfidenceBounds:
    def test_direct_formula(self):
        assert ucb(1.0, 2.0, 4.0) == 5.0
        assert lcb(1.0, 2.0, 4.0) == -3.0

    def test_degenerate_variance(self):
        assert ucb(1.0, 0.0, 4.0) == lcb(1.0, 0.0, 4.0) == 1.0

    def test_beta_zero(self):
        assert ucb(1.0, 2.0, 0.0) == lcb(1.0, 2.0, 0.0) == 1.0

    def test_ordering(self):
        rng = np.random.default_rng(0)
        mu = rng.standard_normal(100)
        sd = rng.random(100)
        for beta in (0.0, 1.0, 9.0):
            assert np.all(lcb(mu, sd, beta) <= mu)
            assert np.all(mu <= ucb(mu, sd, beta))


class TestExpectedImprovement:
    def test_at_incumbent(self):
        # alpha = 0: EI equals the standard normal density at zero
        assert ei(0.0, 1.0, 0.0) == pytest.approx(1 / np.sqrt(2 * np.pi))

    def test_zero_spread_above_incumbent(self):
        assert ei(2.0, 0.0, 1.0) == 0.0

    def test_nonnegative(self):
        rng = np.random.default_rng(1)
        vals = ei(rng.standard_normal(500), rng.random(500), 0.3)
        assert np.all(vals >= 0)

    def test_monotone_in_mean_and_spread(self):
        mus = np.linspace(-2, 2, 41)
        vals = ei(mus, np.ones_like(mus), 0.0)
        assert np.all(np.diff(vals) <= 1e-12)
        sds = np.linspace(0.1, 3, 30)
        vals = ei(np.full_like(sds, -0.5), sds, 0.0)
        assert np.all(np.diff(vals) >= -1e-12)


class TestLogEi:
    def test_agrees_with_plain_ei(self):
        rng = np.random.default_rng(3)
        mu = rng.standard_normal(500) * 3
        sd = rng.random(500) * 2 + 0.01
        plain = ei(mu, sd, 0.2)
        logv = log_ei(mu, sd, 0.2)
        mask = plain > 1e-280
        np.testing.assert_allclose(logv[mask], np.log(plain[mask]), rtol=1e-6, atol=1e-8)

    def test_deep_tail_values(self):
        # frozen from a 60-digit evaluation of log(a Phi(a) + phi(a))
        oracle = {
            -5.0: -16.74430116266099,
            -25.0: -319.86146358149597,
            -40.0: -808.29856835662,
            -120.0: -7210.494130301488,
        }
        for a, expected in oracle.items():
            got = log_ei(-a, 1.0, 0.0)  # mean = -a, sigma = 1, tau = 0
            assert got == pytest.approx(expected, rel=1e-9, abs=1e-6)

    def test_keeps_underflowed_candidates_ordered(self):
        # plain EI flattens both to 0.0; the log form still ranks them
        strong, weak = log_ei(60.0, 1.0, 0.0), log_ei(80.0, 1.0, 0.0)
        assert ei(60.0, 1.0, 0.0) == ei(80.0, 1.0, 0.0) == 0.0
        assert strong > weak

    def test_zero_spread_is_minus_inf(self):
        assert log_ei(1.0, 0.0, 0.5) == float("-inf")


def toy_model(seed=0, n=6, noise=1e-6):
    rng = np.random.default_rng(seed)
    p = SeKernelParams(1.0, np.array([0.4]), noise_variance=noise)
    X = rng.random((n, 1))
    y = np.sin(4 * X[:, 0])
    return fit(X, y, p)


class TestSamplePaths:
    def test_prior_covariance_matches_kernel(self):
        # Monte-Carlo covariance oracle against the exact kernel: with unit
        # normal weights each path's covariance given its features is
        # phi(x) . phi(x'); average that over 200 independent feature draws
        p = SeKernelParams(1.0, np.array([0.5]), noise_variance=0.0)
        pts = np.array([[0.0], [0.2], [0.5], [1.0]])
        emp = np.zeros((len(pts), len(pts)))
        for seed in range(200):
            path = draw_prior_path(p, 1, 500, seed)
            phi = path.amplitude * np.cos(pts @ path.feature_weights.T + path.feature_phases)
            emp += phi @ phi.T
        emp /= 200
        for i in range(len(pts)):
            for j in range(len(pts)):
                expected = se_kernel(pts[i], pts[j], p)
                assert emp[i, j] == pytest.approx(expected, abs=0.05)

    def test_posterior_mean_hits_training_data(self):
        model = toy_model()
        pts = model.train_inputs
        draws = np.stack(
            [draw_sample_path(model, 500, seed)(pts) for seed in range(200)]
        )
        np.testing.assert_allclose(draws.mean(axis=0), model.train_targets, atol=0.1)

    def test_deterministic_given_seed(self):
        model = toy_model()
        q = np.linspace(0, 1, 7)[:, None]
        a = draw_sample_path(model, 200, 42)(q)
        b = draw_sample_path(model, 200, 42)(q)
        np.testing.assert_array_equal(a, b)

    def test_rejects_zero_features(self):
        with pytest.raises(ValueError):
            draw_sample_path(toy_model(), 0, 1)


class TestCheapObjective:
    def test_lcb_passthrough(self):
        model = toy_model()
        spec = AcquisitionSpec(kind="lcb")
        x = np.array([0.3])
        from mobo.gp import predict

        mean, std = predict(model, x)
        expected = lcb(mean[0], std[0], beta_t(spec.beta, 3))
        assert cheap_objective(spec, model, None, 0.0, 3, x) == pytest.approx(expected)

    def test_ei_enters_as_negated_log(self):
        # monotone in ei(), so the inner Pareto set is the one ei() induces
        model = toy_model()
        spec = AcquisitionSpec(kind="ei")
        from mobo.gp import predict

        grid = np.linspace(0, 1, 101)[:, None]
        mean, std = predict(model, grid)
        i = int(np.argmax(std))  # far from data, where plain EI is representable
        tau = float(np.min(model.train_targets))
        got = cheap_objective(spec, model, None, tau, 1, grid[i])
        assert got == pytest.approx(-np.log(ei(mean[i], std[i], tau)))

    def test_ucb_negated(self):
        model = toy_model()
        spec = AcquisitionSpec(kind="ucb")
        x = np.array([0.7])
        from mobo.gp import predict

        mean, std = predict(model, x)
        expected = -ucb(mean[0], std[0], beta_t(spec.beta, 2))
        assert cheap_objective(spec, model, None, 0.0, 2, x) == pytest.approx(expected)

    def test_ts_passthrough(self):
        model = toy_model()
        path = draw_sample_path(model, 100, 7)
        spec = AcquisitionSpec(kind="ts")
        x = np.array([0.6])
        assert cheap_objective(spec, model, path, 0.0, 1, x) == pytest.approx(
            float(path(x)[0])
        )

    def test_batched_objectives_match_scalar(self):
        models = [toy_model(0), toy_model(1)]
        for kind in ("ei", "ucb", "lcb"):
            spec = AcquisitionSpec(kind=kind)
            objs = make_cheap_objectives(spec, models, 4, np.random.default_rng(0))
            X = np.linspace(0, 1, 5)[:, None]
            for model, obj in zip(models, objs):
                tau = float(np.min(model.train_targets))
                batch = obj(X)
                for i, x in enumerate(X):
                    assert batch[i] == pytest.approx(
                        cheap_objective(spec, model, None, tau, 4, x)
                    )

    def test_kind_validation(self):
        with pytest.raises(ValueError):
            AcquisitionSpec(kind="entropy")
