#
# Copyright Elasticsearch B.V. and/or licensed to Elasticsearch B.V. under one
# or more contributor license agreements. Licensed under the Elastic License 2.0;
# you may not use this file except in compliance with the Elastic License 2.0.
#
import math
import unittest

import numpy as np
import pytest

from bagged_gp import dataset, subset_sizing
from bagged_gp.hyperopt import OptimizerConfig
from bagged_gp.kernels import RBF
from bagged_gp.subset_sizing import ProbeConfig, SizingPlan, infer_delta, size_by_formula, size_explicit

FAST_PROBE = ProbeConfig(sample_size=300, optimizer=OptimizerConfig(restarts=1, max_iterations=30))


class TestSizeByFormula(unittest.TestCase):
    def test_known_point(self):
        plan = size_by_formula(10 ** 6, 1.0, 1.0)
        assert plan.Ns == 193
        assert plan.method == subset_sizing.METHOD_FORMULA
        assert math.isclose(plan.delta, 1.0 / math.log(math.log(1e6)))

    def test_epsilon_times_1024_halves_the_size(self):
        # epsilon^(1/10) doubles when epsilon grows by 2^10
        base = size_by_formula(10 ** 6, 1.0).Ns
        assert size_by_formula(10 ** 6, 2.0 ** 10).Ns == math.ceil(1e6 ** (1 / math.log(math.log(1e6))) / 2)
        assert size_by_formula(10 ** 6, 2.0 ** 10).Ns < base

    def test_smaller_constant_gives_larger_subsets(self):
        assert size_by_formula(10 ** 6, 1.0, C=0.5).Ns == math.ceil(1e6 ** (1 / math.log(math.log(1e6))) * 2)

    def test_clamped_to_minimum_and_to_n(self):
        assert size_by_formula(10 ** 6, 1e30).Ns == subset_sizing.MIN_SUBSET_SIZE
        assert size_by_formula(20, 1e-30).Ns == 20

    def test_small_datasets_use_every_row(self):
        with self.assertLogs("bagged_gp.subset_sizing", level="WARNING"):
            plan = size_by_formula(10, 0.1)
        assert plan.Ns == 10
        assert plan.delta == 1.0

    def test_invalid_arguments(self):
        for arguments in ((1000, 0.0), (1000, -1.0), (1000, 1.0, 0.0), (0, 1.0)):
            with pytest.raises(ValueError):
                size_by_formula(*arguments)

    def test_effective_delta_is_a_proportion(self):
        for N in (16, 100, 10 ** 4, 10 ** 6, 10 ** 8):
            plan = size_by_formula(N, 0.05)
            assert 0 < plan.effective_delta <= 1
            assert plan.delta < 1

    def test_formula_delta_shrinks_with_n(self):
        sizes = np.unique(np.concatenate([np.arange(16, 5000), np.logspace(4, 12, 200).astype(np.int64)]))
        deltas = [subset_sizing.formula_delta(int(N)) for N in sizes]
        assert all(later < earlier for earlier, later in zip(deltas, deltas[1:]))
        assert all(0 < delta < 1 for delta in deltas)


class TestSizeExplicit(unittest.TestCase):
    def test_power_of_n(self):
        plan = size_explicit(70000, 0.5)
        assert plan.Ns == 265
        assert plan.method == subset_sizing.METHOD_EXPLICIT

    def test_whole_dataset(self):
        assert size_explicit(123, 1.0).Ns == 123

    def test_invalid_delta(self):
        for delta in (0.0, -0.5, 1.5):
            with pytest.raises(ValueError):
                size_explicit(100, delta)


class TestSizingPlan(unittest.TestCase):
    def test_size_must_fit_the_dataset(self):
        with pytest.raises(ValueError):
            SizingPlan(N=10, method=subset_sizing.METHOD_EXPLICIT, Ns=11)

    def test_single_row(self):
        assert SizingPlan(N=1, method=subset_sizing.METHOD_EXPLICIT, Ns=1).effective_delta == 1.0

    def test_to_dict(self):
        values = size_by_formula(10 ** 6, math.inf).to_dict()
        assert values["epsilon"] == "inf"
        assert values["Ns"] == subset_sizing.MIN_SUBSET_SIZE
        assert values["trace"] == []
        assert "effective_delta" in values


class TestProbeConfig(unittest.TestCase):
    def test_default_grid(self):
        grid = ProbeConfig().grid()
        assert grid[0] == 0.1
        assert grid[-1] == 1.0
        assert len(grid) == 19

    def test_custom_grid(self):
        assert ProbeConfig(delta_start=0.5, delta_step=0.25).grid() == [0.5, 0.75, 1.0]


class TestInferDelta(unittest.TestCase):
    def setUp(self):
        self.data = dataset.generate_sinc(3000, noise_sd=0.05, seed=31).standardized()

    def test_loose_target_stops_at_the_first_delta(self):
        plan = infer_delta(self.data, 1e9, RBF(), FAST_PROBE)
        assert plan.delta == 0.1
        assert plan.Ns == math.ceil(3000 ** 0.1)
        assert plan.target_met
        assert len(plan.trace) == 1
        assert plan.method == subset_sizing.METHOD_INFERENCE

    def test_unreachable_target(self):
        probe = ProbeConfig(sample_size=200, delta_start=0.5, delta_step=0.25,
                            optimizer=OptimizerConfig(restarts=1, max_iterations=20))
        with self.assertLogs("bagged_gp.subset_sizing", level="WARNING"):
            plan = infer_delta(self.data, 1e-12, RBF(), probe)
        assert not plan.target_met
        assert plan.delta == 1.0
        assert plan.Ns == 3000
        assert [step.delta for step in plan.trace] == [0.5, 0.75, 1.0]

    def test_first_qualifying_delta_is_returned(self):
        plan = infer_delta(self.data, 0.1, RBF(), FAST_PROBE)
        assert plan.target_met
        assert plan.trace[-1].rmse <= 0.1
        assert all(step.rmse > 0.1 for step in plan.trace[:-1])
        assert plan.trace[-1].delta == plan.delta

    def test_reproducible(self):
        first = infer_delta(self.data, 0.1, RBF(), FAST_PROBE)
        second = infer_delta(self.data, 0.1, RBF(), FAST_PROBE)
        assert first.to_dict() == second.to_dict()
        assert np.isfinite([step.rmse for step in first.trace]).all()

    def test_invalid_epsilon(self):
        with pytest.raises(ValueError):
            infer_delta(self.data, 0.0, RBF(), FAST_PROBE)

    def test_noise_free_sinc_needs_at_most_delta_0_6(self):
        config = ProbeConfig(optimizer=OptimizerConfig(restarts=1, max_iterations=100))
        for seed in (32, 33, 34):
            data = dataset.generate_sinc(3000, seed=seed).standardized()
            plan = infer_delta(data, 0.05, RBF(), config)
            assert plan.target_met, seed
            assert plan.delta <= 0.6, seed
