#
# Copyright Elasticsearch B.V. and/or licensed to Elasticsearch B.V. under one
# or more contributor license agreements. Licensed under the Elastic License 2.0;
# you may not use this file except in compliance with the Elastic License 2.0.
#
"""Configuration module allows manipulations with run configuration.

This module can be used to read and validate the configuration file that
defines a run: data source, kernel, subset sizing, ensemble and optimizer
settings. Values come from, in increasing precedence, the schema defaults,
command-line flags and the configuration file. Keys left empty in the file
fall back to the flag or the default."""

import yaml
from yaml.error import YAMLError
from cerberus import Validator

from .schema import schema


class ConfigurationInvalidException(Exception):
    """Exception raised when configuration was invalid.

    Attributes:
        errors - errors found in the configuration
        message -- explanation of the error
    """

    def __init__(self, errors):
        super().__init__(f"Provided configuration was invalid. Errors: {errors}.")

        self.errors = errors


class ConfigurationParsingException(Exception):
    """Exception raised when configuration could not be parsed.

    Attributes:
        file_name - name of the file that could not be parsed
    """

    def __init__(self, file_name, inner_exception):
        super().__init__(f"Failed to parse configuration file {file_name}: {inner_exception}")

        self.file_name = file_name
        self.inner_exception = inner_exception


class Configuration:
    """Configuration class is responsible for parsing, validating and accessing
    configuration options of a run."""

    __configurations = {}

    def __init__(self, file_name=None, flag_values=None):
        self.file_name = file_name

        document = {key: value for key, value in (flag_values or {}).items() if value is not None}
        if file_name:
            try:
                with open(file_name, encoding="utf-8") as stream:
                    from_file = yaml.safe_load(stream) or {}
            except (OSError, YAMLError) as exception:
                raise ConfigurationParsingException(file_name, exception)
            if not isinstance(from_file, dict):
                raise ConfigurationInvalidException({"document": ["must be a mapping of keys to values"]})
            document.update({key: value for key, value in from_file.items() if value is not None})
        self.__configurations = document
        self.__configurations = self.validate()
        self.__check_consistency()

    def validate(self):
        """Validates each property defined in the yaml configuration file"""

        validator = Validator(schema)
        validator.validate(self.__configurations, schema)
        if validator.errors:
            raise ConfigurationInvalidException(validator.errors)
        return validator.document

    def __check_consistency(self):
        errors = {}
        values = self.__configurations
        if values["data.source"] == "file" and not values["data.path"]:
            errors["data.path"] = ["required when data.source is 'file'"]
        if values["sizing.method"] == "explicit" and values["sizing.delta"] is None:
            errors["sizing.delta"] = ["required when sizing.method is 'explicit'"]
        if values["sizing.delta"] is not None and not values["sizing.delta"] > 0:
            errors["sizing.delta"] = ["must be greater than 0"]
        if not 0 < values["split_fraction"] < 1:
            errors["split_fraction"] = ["must lie strictly between 0 and 1"]
        for key in ("sizing.epsilon", "sizing.C", "sizing.delta_step", "optimizer.tolerance"):
            if not values[key] > 0:
                errors[key] = ["must be greater than 0"]
        if not values["optimizer.log_bound_low"] < values["optimizer.log_bound_high"]:
            errors["optimizer.log_bound_low"] = ["must be below optimizer.log_bound_high"]
        if not values["generator.x_min"] < values["generator.x_max"]:
            errors["generator.x_min"] = ["must be below generator.x_max"]
        if errors:
            raise ConfigurationInvalidException(errors)

    def get_value(self, key):
        """Returns a configuration value that matches the key argument"""

        return self.__configurations.get(key)

    def as_dict(self):
        """Returns a copy of the normalized configuration document"""

        return dict(self.__configurations)
