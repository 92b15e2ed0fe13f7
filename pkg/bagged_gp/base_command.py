#
# Copyright Elasticsearch B.V. and/or licensed to Elasticsearch B.V. under one
# or more contributor license agreements. Licensed under the Elastic License 2.0;
# you may not use this file except in compliance with the Elastic License 2.0.
#
"""Module contains a base command interface.

The tool can run multiple commands such as size, fit, eval, etc. This
module provides convenience interface defining the shared objects and
methods that can be used by commands."""
import logging
from contextlib import contextmanager

# For Python>=3.8 cached_property should be imported from functools,
# and for the prior versions it should be imported from cached_property
try:
    from functools import cached_property
except ImportError:
    from cached_property import cached_property

import ecs_logging

from .configuration import Configuration
from .experiment import RunConfig
from .report import write_report

LOGGER_NAME = "bagged_gp"
PLAIN_FORMAT = "%(asctime)s %(levelname)s %(name)s %(message)s"

# argparse destination -> configuration key
FLAG_KEYS = {
    "data": "data.path",
    "target": "data.target_column",
    "delimiter": "data.delimiter",
    "kernel": "kernel",
    "method": "sizing.method",
    "epsilon": "sizing.epsilon",
    "C": "sizing.C",
    "noisy": "sizing.noisy",
    "delta": "sizing.delta",
    "K": "ensemble.K",
    "combination": "ensemble.combination",
    "workers": "ensemble.workers",
    "restarts": "optimizer.restarts",
    "split_fraction": "split_fraction",
    "seed": "seed",
    "n": "generator.n",
    "rows": "sweep.rows",
    "report": "output.report",
    "model": "output.model",
    "output": "output.predictions",
    "observation_variance": "predict.observation_variance",
    "log_level": "log_level",
}


class BaseCommand:
    """Base interface for all module commands.

    Inherit from it and implement 'execute' method, then add
    code to cli.py to register this command."""

    def __init__(self, args):
        self.args = args

    def execute(self):
        """Run the command.

        This method is overridden by actual commands with logic
        that is specific to each command implementing it."""
        raise NotImplementedError

    @cached_property
    def logger(self):
        """Get the logger instance for the running command.

        log level will be determined by the configuration
        setting log_level, the output format by log_format.
        """
        log_level = self.config.get_value("log_level")
        logger = logging.getLogger(LOGGER_NAME)
        logger.propagate = False
        logger.setLevel(log_level)
        for handler in list(logger.handlers):
            logger.removeHandler(handler)

        handler = logging.StreamHandler()
        if self.config.get_value("log_format") == "ecs":
            handler.setFormatter(ecs_logging.StdlibFormatter())
        else:
            handler.setFormatter(logging.Formatter(PLAIN_FORMAT))
        handler.setLevel(log_level)
        logger.addHandler(handler)

        return logger

    def flag_values(self):
        """Configuration values given on the command line; unset flags are None."""
        values = {key: getattr(self.args, dest, None) for dest, key in FLAG_KEYS.items()}
        if getattr(self.args, "data", None):
            values["data.source"] = "file"
        return values

    @cached_property
    def config(self):
        """Get the configuration for the running command."""
        return Configuration(getattr(self.args, "config_file", None), flag_values=self.flag_values())

    @cached_property
    def run_config(self):
        return RunConfig.from_configuration(self.config)

    def write_report(self, report):
        path = self.config.get_value("output.report")
        if path:
            write_report(report.to_dict(), path)

    @contextmanager
    def reporting(self, report):
        """Writes the report when the block completes, or a failure report when it raises."""
        try:
            yield report
        except Exception as exception:
            self.logger.exception(f"Command {report.command} failed. Error: {exception}")
            report.status = "failed"
            report.error = f"{type(exception).__name__}: {exception}"
            self.write_report(report)
            raise
        self.write_report(report)
