#
# Copyright Elasticsearch B.V. and/or licensed to Elasticsearch B.V. under one
# or more contributor license agreements. Licensed under the Elastic License 2.0;
# you may not use this file except in compliance with the Elastic License 2.0.
#
"""This module allows to predict with a saved ensemble.

Feature columns are looked up by the names the ensemble was trained with;
any other column of the input file is ignored."""
import sys

from .base_command import BaseCommand
from .dataset import read_feature_matrix
from .model_archive import load_model
from .report import write_predictions


class PredictCommand(BaseCommand):
    """This class writes predictive means and variances for every input row."""

    def execute(self):
        self.logger.debug("Starting prediction..")
        config = self.run_config
        try:
            model = load_model(self.args.model)
            features = model.members[0].data.feature_names
            X = read_feature_matrix(config.get("data.path"), features, config.get("data.delimiter"))
            prediction = model.predict(X, observation_variance=config.get("predict.observation_variance"))
        except Exception as exception:
            self.logger.exception(f"Error while predicting. Error: {exception}")
            raise
        write_predictions(config.get("output.predictions") or sys.stdout, prediction)
