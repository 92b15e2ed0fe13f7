#
# Copyright Elasticsearch B.V. and/or licensed to Elasticsearch B.V. under one
# or more contributor license agreements. Licensed under the Elastic License 2.0;
# you may not use this file except in compliance with the Elastic License 2.0.
#
"""This module allows to check that the installation computes correctly.

It runs the oracle suite shipped inside the package with pytest."""
import os

import pytest

from .base_command import BaseCommand

ORACLE_SUITE = os.path.join(os.path.dirname(os.path.abspath(__file__)), "oracle_suite.py")


class SelftestCommand(BaseCommand):
    """This class runs the oracle suite and returns pytest's exit status."""

    def execute(self):
        return int(pytest.main([ORACLE_SUITE, "-p", "no:cacheprovider", *self.args.pytest_args]))
