#
# Copyright Elasticsearch B.V. and/or licensed to Elasticsearch B.V. under one
# or more contributor license agreements. Licensed under the Elastic License 2.0;
# you may not use this file except in compliance with the Elastic License 2.0.
#
"""This module allows to run a parameter sweep and write a CSV table."""
import sys

from .base_command import BaseCommand
from .report import write_table
from .sweeps import SWEEPS


class SweepCommand(BaseCommand):
    """This class runs one of the delta, estimators or dataset-size sweeps."""

    def execute(self):
        self.logger.debug(f"Starting the {self.args.kind} sweep..")
        config = self.run_config
        kwargs = {}
        if self.args.values:
            name = {"delta": "deltas", "estimators": "estimators", "dataset-size": "fractions"}[self.args.kind]
            values = self.args.values
            kwargs[name] = [int(value) for value in values] if self.args.kind == "estimators" else values
        if self.args.kind == "estimators" and self.args.ns:
            kwargs["Ns"] = self.args.ns
        try:
            rows = SWEEPS[self.args.kind](config, **kwargs)
        except Exception as exception:
            self.logger.exception(f"Error while running the {self.args.kind} sweep. Error: {exception}")
            raise
        write_table(self.args.table or sys.stdout, rows)
