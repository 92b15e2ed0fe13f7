#
# Copyright Elasticsearch B.V. and/or licensed to Elasticsearch B.V. under one
# or more contributor license agreements. Licensed under the Elastic License 2.0;
# you may not use this file except in compliance with the Elastic License 2.0.
#
import unittest
from unittest import mock

import numpy as np
import pytest
from numpy.testing import assert_allclose

from bagged_gp import dataset, ensemble
from bagged_gp.dataset import Dataset
from bagged_gp.ensemble import (EnsembleConfig, EnsembleFitError, EnsembleModel, combine, combine_average, combine_poe,
                                draw_subset, fit_ensemble, member_predictions)
from bagged_gp.gp_core import NoiseSpec
from bagged_gp.hyperopt import OptimizerConfig
from bagged_gp.kernels import RBF, KernelDimensionError

FAST = OptimizerConfig(restarts=1, max_iterations=30)


def small_sinc(n=200, seed=41):
    return dataset.generate_sinc(n, noise_sd=0.05, seed=seed).standardized()


class TestCombinationRules(unittest.TestCase):
    def test_average(self):
        prediction = combine_average([0.0, 4.0], [1.0, 3.0])
        assert prediction.mean == 2.0
        assert prediction.variance == 1.0

    def test_product_of_experts(self):
        prediction = combine_poe([0.0, 4.0], [1.0, 1.0 / 3.0])
        assert abs(prediction.mean - 3.0) < 1e-12
        assert abs(prediction.variance - 0.25) < 1e-12

    def test_single_member_is_unchanged(self):
        for rule in (combine_average, combine_poe):
            prediction = rule([[1.5, -2.0]], [[0.3, 0.7]])
            assert_allclose(prediction.mean, [1.5, -2.0])
            assert_allclose(prediction.variance, [0.3, 0.7])

    def test_equal_variances_make_the_rules_agree_on_the_mean(self):
        means = [[1.0], [2.0], [6.0]]
        variances = [[0.5], [0.5], [0.5]]
        assert_allclose(combine_poe(means, variances).mean, combine_average(means, variances).mean, rtol=1e-12)

    def test_variance_bounds(self):
        rng = np.random.default_rng(42)
        for _ in range(100):
            K = int(rng.integers(1, 12))
            means, variances = rng.normal(size=(K, 4)), rng.uniform(0.01, 3.0, size=(K, 4))
            assert np.all(combine_poe(means, variances).variance <= variances.min(axis=0) + 1e-15)
            assert np.all(combine_average(means, variances).variance <= variances.max(axis=0) / K + 1e-15)

    def test_zero_variance_is_floored(self):
        prediction = combine_poe([1.0, 5.0], [0.0, 1.0])
        assert np.isfinite(prediction.mean)
        assert abs(prediction.mean - 1.0) < 1e-9

    def test_unknown_rule(self):
        with pytest.raises(ValueError):
            combine([0.0], [1.0], "median")


class TestEnsembleConfig(unittest.TestCase):
    def test_defaults(self):
        config = EnsembleConfig(Ns=10)
        assert config.K == 30
        assert config.with_replacement
        assert config.combination == ensemble.AVERAGE

    def test_invalid_values(self):
        for arguments in ({"Ns": 0}, {"Ns": 5, "K": 0}, {"Ns": 5, "combination": "vote"}):
            with pytest.raises(ValueError):
                EnsembleConfig(**arguments)


class TestDrawSubset(unittest.TestCase):
    def test_streams_are_per_member(self):
        config = EnsembleConfig(Ns=20, K=3, seed=7)
        first = draw_subset(100, config, 1)
        assert np.array_equal(first, draw_subset(100, config, 1))
        assert not np.array_equal(first, draw_subset(100, config, 2))
        assert first.min() >= 0 and first.max() < 100

    def test_without_replacement(self):
        config = EnsembleConfig(Ns=50, K=1, with_replacement=False)
        rows = draw_subset(50, config, 0)
        assert sorted(rows) == list(range(50))
        with pytest.raises(ValueError):
            draw_subset(49, config, 0)


class TestFitEnsemble(unittest.TestCase):
    def test_members_and_mixture(self):
        data = small_sinc()
        model = fit_ensemble(data, RBF(), EnsembleConfig(Ns=40, K=3, seed=1), FAST)
        assert len(model.members) == 3
        assert all(member.n_rows == 40 for member in model.members)
        assert len(model.member_lml()) == 3
        X = data.X[:6]
        expected = sum(member.kernel.gram(X) for member in model.members) / 3
        assert_allclose(model.mixture_gram(X), expected, rtol=1e-14)

    def test_worker_count_does_not_change_results(self):
        data = small_sinc()
        Xstar = np.linspace(-15, 15, 25)[:, None]
        serial = fit_ensemble(data, RBF(), EnsembleConfig(Ns=30, K=4, seed=2, workers=1), FAST).predict(Xstar)
        threaded = fit_ensemble(data, RBF(), EnsembleConfig(Ns=30, K=4, seed=2, workers=4), FAST).predict(Xstar)
        assert np.array_equal(serial.mean, threaded.mean)
        assert np.array_equal(serial.variance, threaded.variance)

    def test_member_order_does_not_change_the_combination(self):
        model = fit_ensemble(small_sinc(), RBF(), EnsembleConfig(Ns=30, K=4, seed=3), FAST)
        Xstar = np.linspace(-10, 10, 9)[:, None]
        shuffled = EnsembleModel(members=model.members[::-1], config=model.config, template=model.template,
                                 standardization=model.standardization)
        for rule in ensemble.COMBINATIONS:
            assert_allclose(model.predict(Xstar, combination=rule).mean,
                            shuffled.predict(Xstar, combination=rule).mean, rtol=1e-12, atol=1e-14)

    def test_predictions_are_in_raw_units(self):
        data = small_sinc(n=300)
        model = fit_ensemble(data, RBF(), EnsembleConfig(Ns=60, K=3, seed=4), FAST)
        Xstar = np.linspace(-12, 12, 40)[:, None]
        prediction = model.predict(Xstar)
        assert np.sqrt(np.mean((prediction.mean - dataset.sinc(Xstar[:, 0])) ** 2)) < 0.2
        assert np.all(prediction.variance > 0)

    def test_beats_the_standard_deviation_baseline(self):
        train = small_sinc(n=200, seed=43)
        test = dataset.generate_sinc(100, noise_sd=0.05, seed=44)
        model = fit_ensemble(train, RBF(), EnsembleConfig(Ns=50, K=10, seed=5), FAST)
        rmse = np.sqrt(np.mean((model.predict(test.X).mean - test.y) ** 2))
        assert rmse < np.std(test.y)

    def test_observation_variance(self):
        model = fit_ensemble(small_sinc(), RBF(), EnsembleConfig(Ns=30, K=2, seed=6), FAST)
        Xstar = np.array([[0.5]])
        assert model.predict(Xstar, observation_variance=True).variance[0] > model.predict(Xstar).variance[0]

    def test_fixed_noise_is_shared(self):
        noise = NoiseSpec(0.01, fixed=True)
        model = fit_ensemble(small_sinc(), RBF(), EnsembleConfig(Ns=30, K=2, seed=7), FAST, noise)
        assert all(member.noise == noise for member in model.members)

    def test_dimension_mismatch(self):
        model = fit_ensemble(small_sinc(), RBF(), EnsembleConfig(Ns=20, K=2, seed=8), FAST)
        with pytest.raises(KernelDimensionError):
            member_predictions(model, np.zeros((3, 2)))

    def test_subset_larger_than_data(self):
        with pytest.raises(ValueError):
            fit_ensemble(small_sinc(n=20), RBF(), EnsembleConfig(Ns=21, K=1), FAST)

    def test_member_failure_names_the_member(self):
        with mock.patch.object(ensemble, "fit_gp", side_effect=ArithmeticError("no factorization")):
            with pytest.raises(EnsembleFitError) as info:
                fit_ensemble(small_sinc(), RBF(), EnsembleConfig(Ns=20, K=2, seed=9), FAST)
        assert info.value.member_index == 0
        assert isinstance(info.value.cause, ArithmeticError)

    def test_members_must_agree_on_width(self):
        one = fit_ensemble(Dataset(X=np.arange(10.0), y=np.sin(np.arange(10.0))), RBF(),
                           EnsembleConfig(Ns=5, K=1), FAST).members[0]
        X2 = np.column_stack([np.arange(10.0), np.cos(np.arange(10.0))])
        two = fit_ensemble(Dataset(X=X2, y=np.arange(10.0)), RBF(), EnsembleConfig(Ns=5, K=1), FAST).members[0]
        with pytest.raises(ValueError):
            EnsembleModel(members=[one, two], config=EnsembleConfig(Ns=5, K=2), template=RBF())
        with pytest.raises(ValueError):
            EnsembleModel(members=[one], config=EnsembleConfig(Ns=5, K=2), template=RBF())
