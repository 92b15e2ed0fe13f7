#
# Copyright Elasticsearch B.V. and/or licensed to Elasticsearch B.V. under one
# or more contributor license agreements. Licensed under the Elastic License 2.0;
# you may not use this file except in compliance with the Elastic License 2.0.
#
"""This module provides Gaussian Process regression for large datasets
by fitting exact GPs on small bootstrap subsets and combining them."""
__version__ = "0.1.0"
