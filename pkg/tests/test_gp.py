import math

import numpy as np
import pytest

from paretolab.domain import Box
from paretolab.errors import FitError, InputError
from paretolab.gp import (
    Dataset,
    FitOptions,
    GPPosterior,
    condition_gp,
    fit_gp,
    log_marginal_likelihood,
    posterior_mean,
    posterior_var,
)
from paretolab.kernels import ALL_KERNELS, KernelKind, KernelSpec
from paretolab import testbed

import oracles

UNIT_SPEC = KernelSpec(KernelKind.SQUARED_EXPONENTIAL, lengthscale=1.0, amplitude=1.0)


def _dataset(X, y, lo=(-5, -5), hi=(5, 5)):
    return Dataset(np.asarray(X, float), np.asarray(y, float), Box(lo, hi))


class TestDataset:
    def test_requires_matching_lengths(self, unit_box):
        with pytest.raises(InputError):
            Dataset(np.zeros((3, 2)), np.zeros(2), unit_box)

    def test_requires_at_least_one_point(self, unit_box):
        with pytest.raises(InputError):
            Dataset(np.zeros((0, 2)), np.zeros(0), unit_box)

    def test_rejects_out_of_domain_points(self, unit_box):
        with pytest.raises(InputError):
            Dataset(np.array([[2.0, 0.5]]), np.array([1.0]), unit_box)


class TestLogMarginalLikelihood:
    def test_single_zero_observation(self):
        gp = condition_gp(_dataset([[0.0, 0.0]], [0.0]), UNIT_SPEC, noise=0.0,
                          standardize=False)
        assert log_marginal_likelihood(gp) == pytest.approx(-0.5 * math.log(2 * math.pi), abs=1e-9)

    def test_single_unit_observation(self):
        gp = condition_gp(_dataset([[0.0, 0.0]], [1.0]), UNIT_SPEC, noise=0.0,
                          standardize=False)
        expected = -0.5 - 0.5 * math.log(2 * math.pi)
        assert log_marginal_likelihood(gp) == pytest.approx(expected, abs=1e-9)

    def test_matches_dense_oracle_n3(self, rng):
        X = rng.uniform(-1, 1, (3, 1))
        y = rng.normal(size=3)
        spec = KernelSpec(KernelKind.MATERN32, lengthscale=0.8, amplitude=1.3)
        gp = condition_gp(Dataset(X, y, Box((-1,), (1,))), spec, noise=1e-4,
                          standardize=False)
        expected = oracles.dense_lml("Matern32", X, y, 0.8, 1.3, 1e-4 + gp.jitter)
        assert log_marginal_likelihood(gp) == pytest.approx(expected, abs=1e-10)

    def test_prior_has_no_lml(self):
        with pytest.raises(InputError):
            log_marginal_likelihood(GPPosterior.prior(UNIT_SPEC))


class TestPosteriorVsDenseOracle:
    @pytest.mark.parametrize("kind", ALL_KERNELS)
    def test_mean_and_var_match(self, kind, rng):
        X = rng.uniform(-2, 2, (8, 2))
        y = rng.normal(size=8)
        spec = KernelSpec(kind, lengthscale=0.9, amplitude=1.5)
        gp = condition_gp(_dataset(X, y), spec, noise=1e-4, standardize=False)
        Xq = rng.uniform(-2, 2, (6, 2))
        mu_o, var_o = oracles.dense_predict(kind.value, X, y, 0.9, 1.5,
                                            1e-4 + gp.jitter, Xq)
        assert np.max(np.abs(posterior_mean(gp, Xq) - mu_o)) < 1e-10
        assert np.max(np.abs(posterior_var(gp, Xq) - var_o)) < 1e-9

    def test_midpoint_query_1d(self, rng):
        X = np.array([[0.0], [1.0], [2.0]])
        y = np.array([0.3, -0.2, 0.9])
        spec = KernelSpec(KernelKind.SQUARED_EXPONENTIAL, lengthscale=1.0, amplitude=1.0)
        gp = condition_gp(Dataset(X, y, Box((0,), (2,))), spec, noise=1e-6,
                          standardize=False)
        mu_o, var_o = oracles.dense_predict("SquaredExponential", X, y, 1.0, 1.0,
                                            1e-6 + gp.jitter, [[0.5]])
        assert posterior_mean(gp, np.array([0.5])) == pytest.approx(mu_o[0], abs=1e-10)
        assert posterior_var(gp, np.array([0.5])) == pytest.approx(var_o[0], abs=1e-10)


class TestPosteriorBehaviour:
    def test_interpolates_training_points_noiseless(self, rng):
        X = rng.uniform(-2, 2, (5, 2))
        y = np.sin(X[:, 0]) + X[:, 1]
        gp = condition_gp(_dataset(X, y), KernelSpec(KernelKind.MATERN52, 1.0, 1.0),
                          noise=0.0)
        assert np.max(np.abs(posterior_mean(gp, X) - y)) < 1e-5
        assert np.max(np.sqrt(posterior_var(gp, X))) < 1e-4

    def test_far_query_reverts_to_data_mean(self, rng):
        X = rng.uniform(-0.5, 0.5, (4, 2))
        y = np.array([1.0, 2.0, 3.0, 4.0])
        spec = KernelSpec(KernelKind.SQUARED_EXPONENTIAL, lengthscale=0.2, amplitude=1.0)
        gp = condition_gp(_dataset(X, y), spec, noise=1e-6)
        far = np.array([4.9, 4.9])
        # standardized prior mean is 0, i.e. the data mean in outcome units
        assert posterior_mean(gp, far) == pytest.approx(float(np.mean(y)), abs=1e-6)

    def test_prior_gp(self):
        spec = KernelSpec(KernelKind.EXPONENTIAL, lengthscale=1.0, amplitude=2.25)
        prior = GPPosterior.prior(spec)
        assert posterior_mean(prior, np.array([1.0, 2.0])) == 0.0
        assert posterior_var(prior, np.array([1.0, 2.0])) == 2.25

    def test_variance_nonnegative_and_clamped(self, rng):
        X = rng.uniform(-2, 2, (10, 2))
        y = rng.normal(size=10)
        for kind in ALL_KERNELS:
            gp = condition_gp(_dataset(X, y), KernelSpec(kind, 0.6, 1.2), noise=1e-6)
            var = posterior_var(gp, rng.uniform(-2, 2, (50, 2)))
            assert np.all(var >= 0.0)
            assert np.all(var <= 1.2 * gp.y_std**2 + 1e-12)

    def test_sigma_monotone_along_ray_single_point(self):
        X = np.array([[0.0, 0.0]])
        y = np.array([1.0])
        gp = condition_gp(_dataset(X, y), KernelSpec(KernelKind.MATERN32, 1.0, 1.0),
                          noise=1e-6, standardize=False)
        radii = np.linspace(0.0, 4.0, 60)
        direction = np.array([0.6, 0.8])
        sig = np.sqrt(posterior_var(gp, radii[:, None] * direction[None, :]))
        assert np.all(np.diff(sig) >= -1e-12)

    def test_query_dimension_mismatch(self, small_dataset):
        gp = condition_gp(small_dataset, UNIT_SPEC, noise=1e-6)
        with pytest.raises(InputError):
            posterior_mean(gp, np.array([0.5]))


class TestFit:
    def test_interpolation_after_fitting(self, rng):
        prob = testbed.get_problem("branin")
        X = rng.uniform(prob.domain.lo, prob.domain.hi, (5, 2))
        y_raw = np.array([prob.score(x) for x in X])
        y = (y_raw - y_raw.mean()) / y_raw.std()
        gp = fit_gp(Dataset(X, y, prob.domain), KernelKind.SQUARED_EXPONENTIAL,
                    FitOptions(noise=0.0))
        assert np.max(np.abs(posterior_mean(gp, X) - y)) < 1e-5

    def test_constant_targets(self, unit_box, rng):
        X = rng.uniform(0.1, 0.9, (3, 2))
        y = np.full(3, 7.5)
        gp = fit_gp(Dataset(X, y, unit_box), KernelKind.SQUARED_EXPONENTIAL)
        queries = rng.uniform(min(X.min(0)), max(X.max(0)), (20, 2)).clip(0, 1)
        assert np.max(np.abs(posterior_mean(gp, queries) - 7.5)) < 1e-4

    def test_fixed_hyperparameters_reduce_to_conditioning(self, small_dataset):
        opts = FitOptions(fit_lengthscale=False, fit_amplitude=False,
                          lengthscale=0.5, amplitude=1.1, noise=1e-5,
                          standardize=False)
        gp = fit_gp(small_dataset, KernelKind.MATERN52, opts)
        assert gp.kernel.lengthscale == 0.5 and gp.kernel.amplitude == 1.1
        expected = oracles.dense_lml("Matern52", small_dataset.X, small_dataset.y,
                                     0.5, 1.1, 1e-5 + gp.jitter)
        assert log_marginal_likelihood(gp) == pytest.approx(expected, abs=1e-10)

    def test_deterministic_given_seed(self, small_dataset):
        a = fit_gp(small_dataset, KernelKind.MATERN32, FitOptions(seed=3))
        b = fit_gp(small_dataset, KernelKind.MATERN32, FitOptions(seed=3))
        assert a.kernel == b.kernel and a.lml == b.lml

    def test_seed_changes_start_points_not_quality(self, small_dataset):
        a = fit_gp(small_dataset, KernelKind.MATERN32, FitOptions(seed=0))
        b = fit_gp(small_dataset, KernelKind.MATERN32, FitOptions(seed=99))
        assert abs(a.lml - b.lml) < 1e-3 or a.lml != b.lml  # both are valid optima

    def test_all_restart_failure_raises_fit_error(self, small_dataset, monkeypatch):
        import paretolab.gp as gpmod

        def boom(*args, **kwargs):
            raise np.linalg.LinAlgError("forced")

        monkeypatch.setattr(gpmod, "minimize", boom)
        with pytest.raises(FitError):
            fit_gp(small_dataset, KernelKind.SQUARED_EXPONENTIAL)

    def test_fit_noise_free_noise(self, small_dataset):
        gp = fit_gp(small_dataset, KernelKind.SQUARED_EXPONENTIAL,
                    FitOptions(fit_noise=True))
        lo, hi = FitOptions().noise_bounds
        assert lo * 0.99 <= gp.noise <= hi * 1.01
