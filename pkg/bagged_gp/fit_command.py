#
# Copyright Elasticsearch B.V. and/or licensed to Elasticsearch B.V. under one
# or more contributor license agreements. Licensed under the Elastic License 2.0;
# you may not use this file except in compliance with the Elastic License 2.0.
#
"""This module allows to fit an ensemble on every row of a dataset and save it.

Unlike eval, no rows are held out; the archive can later be used by the
predict and eval commands."""

from .base_command import BaseCommand
from .configuration import ConfigurationInvalidException
from .ensemble import fit_ensemble
from .experiment import RunReport, load_dataset, plan_subset_size, timed
from .model_archive import save_model


class FitCommand(BaseCommand):
    """This class fits and saves an ensemble."""

    def execute(self):
        self.logger.debug("Starting to fit the ensemble..")
        config = self.run_config
        model_path = config.get("output.model")
        if not model_path:
            raise ConfigurationInvalidException({"output.model": ["required by the fit command"]})

        report = RunReport(command="fit", config=config.values)
        with self.reporting(report):
            dataset = load_dataset(config)
            train = dataset.standardized() if config.get("data.standardize") else dataset
            report.n_train = train.n_rows
            with timed(report.timings, "sizing"):
                report.sizing = plan_subset_size(train, config)
            with timed(report.timings, "fit"):
                model = fit_ensemble(
                    train,
                    config.kernel_template(),
                    config.ensemble(report.sizing.Ns),
                    config.optimizer(),
                    config.noise(),
                )
            report.member_lml = model.member_lml()
            save_model(model, model_path)
        self.logger.info(f"Fitted {model.config.K} members on subsets of {model.config.Ns} rows")
