#
# Copyright Elasticsearch B.V. and/or licensed to Elasticsearch B.V. under one
# or more contributor license agreements. Licensed under the Elastic License 2.0;
# you may not use this file except in compliance with the Elastic License 2.0.
#
import unittest

import numpy as np
import pytest
from numpy.testing import assert_allclose

from bagged_gp.kernel_grammar import KernelGrammarError, format_kernel, parse_kernel
from bagged_gp.kernels import RBF, BrownianMotion, Linear, PeriodicMatern32, Product, Sum, WhiteNoise


class TestParseKernel(unittest.TestCase):
    def test_single_leaf(self):
        assert parse_kernel("rbf") == RBF()
        assert parse_kernel("  SE ") == RBF()
        assert parse_kernel("whitenoise") == WhiteNoise()

    def test_product_binds_tighter_than_sum(self):
        kernel = parse_kernel("linear + rbf * cosine")
        assert isinstance(kernel, Sum)
        assert isinstance(kernel.children[1], Product)

    def test_parentheses(self):
        kernel = parse_kernel("(linear + rbf) * cosine")
        assert isinstance(kernel, Product)
        assert isinstance(kernel.children[0], Sum)

    def test_leaf_options(self):
        kernel = parse_kernel("rbf[cols=0,2; lengthscale=0.5,2; variance=3; fixed=variance]")
        assert kernel == RBF(
            variance=3.0, lengthscales=(0.5, 2.0), active_dims=(0, 2), fixed=frozenset({"variance"})
        )
        assert parse_kernel("brownian[cols=1;origin=-2]") == BrownianMotion(active_dims=(1,), origin=-2.0)
        assert parse_kernel("periodicmatern32[period=12]").period == 12.0

    def test_group_options_reach_leaves_without_their_own(self):
        kernel = parse_kernel("(linear + rbf[cols=1])[cols=3; fixed=variance]")
        linear, rbf = kernel.children
        assert linear.active_dims == (3,)
        assert rbf.active_dims == (1,)
        assert linear.fixed == frozenset({"variance"})
        assert rbf.fixed == frozenset({"variance"})

    def test_dataset_compositions_parse(self):
        specs = [
            "linear + rbf",
            "periodicmatern32 + linear + rbf + (linear * rbf)[cols=7]",
            "rbf + linear + white",
            "bias + cosine + rbf + linear + brownian[cols=0]",
        ]
        X = np.random.default_rng(0).normal(size=(5, 8))
        for spec in specs:
            K = parse_kernel(spec).gram(X)
            assert K.shape == (5, 5)

    def test_errors_carry_position(self):
        cases = ["", "rbf +", "rbf * (linear", "unknown", "rbf[period=2]", "linear[lengthscale=1]",
                 "rbf[colour=1]", "(rbf + linear)[variance=2]", "rbf $ linear", "rbf[variance=-1]"]
        for text in cases:
            with pytest.raises(KernelGrammarError) as info:
                parse_kernel(text)
            assert info.value.text == text
            assert 0 <= info.value.position <= len(text)


class TestFormatKernel(unittest.TestCase):
    def test_structure_round_trip(self):
        for text in ["rbf", "linear + rbf * cosine", "(linear + rbf) * cosine", "brownian[cols=2;origin=0.5]"]:
            kernel = parse_kernel(text)
            assert parse_kernel(format_kernel(kernel)) == kernel

    def test_values_round_trip(self):
        kernel = (RBF(variance=0.123456789, lengthscales=(1.0 / 3.0, 7.0)) + Linear(variance=2.0)) * PeriodicMatern32(
            period=np.pi, fixed=frozenset({"period"})
        )
        restored = parse_kernel(format_kernel(kernel, include_values=True))
        assert restored == kernel
        assert_allclose(restored.log_params(), kernel.log_params(), rtol=0, atol=0)
