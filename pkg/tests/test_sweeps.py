#
# Copyright Elasticsearch B.V. and/or licensed to Elasticsearch B.V. under one
# or more contributor license agreements. Licensed under the Elastic License 2.0;
# you may not use this file except in compliance with the Elastic License 2.0.
#
import math
import unittest

import numpy as np

from bagged_gp import sweeps
from bagged_gp.experiment import RunConfig

SWEEP_SINC = {
    "data.source": "sinc",
    "generator.n": 2000,
    "sizing.method": "explicit",
    "sizing.delta": 0.6,
    "ensemble.K": 3,
    "optimizer.restarts": 1,
    "optimizer.max_iterations": 30,
    "sweep.rows": 100,
    "seed": 5,
}


class TestSweepRows(unittest.TestCase):
    def test_training_rows_are_cut_to_sweep_rows(self):
        train, test = sweeps.sweep_rows(RunConfig.from_values(SWEEP_SINC))
        assert train.n_rows == 100
        assert test.n_rows == 600
        assert train.standardization is not None

    def test_small_training_splits_are_kept_whole(self):
        train, _ = sweeps.sweep_rows(RunConfig.from_values({**SWEEP_SINC, "sweep.rows": 5000}))
        assert train.n_rows == 1400

    def test_delta_sweep_sizes_from_sweep_rows(self):
        rows = sweeps.sweep_delta(RunConfig.from_values(SWEEP_SINC), deltas=(0.5, 1.0))
        assert [row["Ns"] for row in rows] == [10, 100]
        assert all(row["rmse"] >= 0 for row in rows)

    def test_estimators_sweep_sizes_from_sweep_rows(self):
        rows = sweeps.sweep_estimators(RunConfig.from_values(SWEEP_SINC), estimators=(1, 2))
        assert [row["value"] for row in rows] == [1, 2]
        assert {row["Ns"] for row in rows} == {math.ceil(100 ** 0.6)}


class TestEstimatorCount(unittest.TestCase):
    def test_more_members_average_out_noisy_fits(self):
        by_k = {2: [], 30: []}
        for seed in (11, 12, 13):
            config = RunConfig.from_values({
                **SWEEP_SINC, "generator.noise_sd": 0.2, "sweep.rows": 400, "seed": seed,
            })
            for row in sweeps.sweep_estimators(config, estimators=(2, 30), Ns=40):
                by_k[row["value"]].append(row["rmse"])
        assert np.median(by_k[30]) <= np.median(by_k[2])
