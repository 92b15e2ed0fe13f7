#
# Copyright Elasticsearch B.V. and/or licensed to Elasticsearch B.V. under one
# or more contributor license agreements. Licensed under the Elastic License 2.0;
# you may not use this file except in compliance with the Elastic License 2.0.
#
"""This module allows to compute the subset size of a run without fitting.

It reads or generates the data, performs the same train/test split as
eval and reports the sizing plan for the training part."""
import json

from .base_command import BaseCommand
from .experiment import RunReport, plan_subset_size, prepare, timed


class SizeCommand(BaseCommand):
    """This class runs subset sizing only."""

    def execute(self):
        """Prints the sizing plan as JSON and writes the report when configured."""
        self.logger.debug("Starting subset sizing..")
        config = self.run_config
        report = RunReport(command="size", config=config.values)
        with self.reporting(report):
            train, _ = prepare(config)
            report.n_train = train.n_rows
            with timed(report.timings, "sizing"):
                report.sizing = plan_subset_size(train, config)
        self.logger.info(f"Subset size {report.sizing.Ns} of {report.sizing.N} rows ({report.sizing.method})")
        print(json.dumps(report.sizing.to_dict(), indent=2))
