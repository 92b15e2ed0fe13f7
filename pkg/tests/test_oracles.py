#
# Copyright Elasticsearch B.V. and/or licensed to Elasticsearch B.V. under one
# or more contributor license agreements. Licensed under the Elastic License 2.0;
# you may not use this file except in compliance with the Elastic License 2.0.
#
"""Runs the oracle suite shipped with the package as part of the test run."""

from bagged_gp.oracle_suite import (fixture_rng, test_combination_rules_match_closed_form,  # noqa: F401
                                    test_composed_kernels_are_positive_semidefinite,
                                    test_kernel_mixtures_are_positive_semidefinite,
                                    test_lml_gradient_matches_finite_differences,
                                    test_single_member_ensemble_matches_dense_gp,
                                    test_sizing_formula_is_monotone_and_reproduces_known_point)
