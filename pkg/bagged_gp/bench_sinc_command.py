#
# Copyright Elasticsearch B.V. and/or licensed to Elasticsearch B.V. under one
# or more contributor license agreements. Licensed under the Elastic License 2.0;
# you may not use this file except in compliance with the Elastic License 2.0.
#
"""This module allows to run the sinc benchmark.

Noise-free sinc data (100,000 rows on [-15, 15]) is split 70/30 and an
ensemble of 30 RBF members, each on ceil(N_train^0.5) rows, is fitted and
scored. With --repeats R the run is repeated for seeds seed ... seed+R-1
and the medians are reported. A configuration file may override any of
these settings."""

import numpy as np

from .base_command import BaseCommand
from .experiment import RunReport, run_experiment

BENCH_DEFAULTS = {
    "data.source": "sinc",
    "generator.n": 100000,
    "generator.x_min": -15.0,
    "generator.x_max": 15.0,
    "kernel": "rbf",
    "sizing.method": "explicit",
    "sizing.delta": 0.5,
    "ensemble.K": 30,
    "ensemble.combination": "average",
}


class BenchSincCommand(BaseCommand):
    """This class runs the sinc benchmark for one or more seeds."""

    def flag_values(self):
        flags = {key: value for key, value in super().flag_values().items() if value is not None}
        return {**BENCH_DEFAULTS, **flags}

    def execute(self):
        self.logger.debug("Starting the sinc benchmark..")
        config = self.run_config
        seeds = [config.seed + offset for offset in range(self.args.repeats)]
        report = RunReport(command="bench-sinc", config=config.values, repeats=[])
        with self.reporting(report):
            for seed in seeds:
                run = run_experiment(config.with_values({"seed": seed}), command="bench-sinc", write=False)
                report.repeats.append({
                    "seed": seed,
                    "rmse_average": run.rmse_average,
                    "rmse_poe": run.rmse_poe,
                    "sd_baseline": run.sd_baseline,
                    "Ns": run.sizing.Ns,
                })
                for stage, seconds in run.timings.items():
                    report.timings[stage] = report.timings.get(stage, 0.0) + seconds
                if report.sizing is None:
                    report.sizing = run.sizing
                    report.n_train = run.n_train
                    report.n_test = run.n_test
                self.logger.info(
                    f"Seed {seed}: RMSE average {run.rmse_average:.6g}, poe {run.rmse_poe:.6g}, "
                    f"SD baseline {run.sd_baseline:.6g}"
                )
            report.rmse_average = float(np.median([row["rmse_average"] for row in report.repeats]))
            report.rmse_poe = float(np.median([row["rmse_poe"] for row in report.repeats]))
            report.sd_baseline = float(np.median([row["sd_baseline"] for row in report.repeats]))
            report.rmse = report.rmse_poe if config.get("ensemble.combination") == "poe" else report.rmse_average
        self.logger.info(
            f"Median RMSE over {len(seeds)} seeds: {report.rmse:.6g} (SD baseline {report.sd_baseline:.6g})"
        )
