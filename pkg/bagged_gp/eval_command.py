#
# Copyright Elasticsearch B.V. and/or licensed to Elasticsearch B.V. under one
# or more contributor license agreements. Licensed under the Elastic License 2.0;
# you may not use this file except in compliance with the Elastic License 2.0.
#
"""This module allows to evaluate the bagged estimator on held-out data.

Without --model it runs the full protocol: split, size, fit and test.
With --model it scores a saved ensemble on a delimited file without
refitting; the target column defaults to the one the ensemble was trained
on."""

from .base_command import BaseCommand
from .dataset import read_delimited
from .experiment import RunReport, run_experiment, score, timed
from .model_archive import load_model


class EvalCommand(BaseCommand):
    """This class evaluates an ensemble and reports its test RMSE."""

    def evaluate_saved_model(self):
        config = self.run_config
        report = RunReport(command="eval-model", config=config.values)
        with self.reporting(report):
            model = load_model(self.args.model)
            first = model.members[0].data
            dataset, _ = read_delimited(
                config.get("data.path"),
                self.args.target or first.target_name,
                first.feature_names,
                config.get("data.delimiter"),
            )
            with timed(report.timings, "predict"):
                score(model, dataset, report, model.config.combination)
        return report

    def execute(self):
        self.logger.debug("Starting evaluation..")
        if self.args.model:
            report = self.evaluate_saved_model()
        else:
            report = run_experiment(self.run_config, command="eval")
        self.logger.info(
            f"Test RMSE {report.rmse:.6g} (average {report.rmse_average:.6g}, poe {report.rmse_poe:.6g}); "
            f"SD baseline {report.sd_baseline:.6g}"
        )
