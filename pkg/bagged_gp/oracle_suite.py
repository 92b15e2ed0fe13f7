#
# Copyright Elasticsearch B.V. and/or licensed to Elasticsearch B.V. under one
# or more contributor license agreements. Licensed under the Elastic License 2.0;
# you may not use this file except in compliance with the Elastic License 2.0.
#
"""oracle_suite module allows to check that the numerical core is correct.

It is run by the selftest command and by the test suite. Each check compares
the library against an independent computation: dense matrix inversion for
exact GP predictions, central finite differences for marginal-likelihood
gradients, explicit loops for the combination rules, and direct evaluation
of the sizing formula. Random kernel compositions are checked for a
non-negative spectrum."""

import math

import numpy as np
import pytest

from .dataset import Dataset
from .ensemble import EnsembleConfig, combine_average, combine_poe, fit_ensemble
from .gp_core import NoiseSpec, fit_exact, lml_gradient, log_marginal_likelihood
from .kernels import RBF, Bias, BrownianMotion, Cosine, Linear, PeriodicMatern32, WhiteNoise, mixture_gram
from .subset_sizing import size_by_formula

FD_STEP = 1e-5
LEAF_KINDS = ("rbf", "linear", "bias", "cosine", "periodicmatern32", "brownian", "white")


@pytest.fixture(name="rng")
def fixture_rng():
    """Seeded generator so every run of the suite checks the same cases."""
    return np.random.default_rng(20240917)


def random_leaf(rng, n_features, kind=None):
    if kind is None:
        kind = LEAF_KINDS[int(rng.integers(len(LEAF_KINDS)))]
    variance = float(rng.uniform(0.5, 1.5))
    width = n_features if rng.random() < 0.5 else 1
    if kind == "rbf":
        return RBF(variance=variance, lengthscales=tuple(rng.uniform(0.5, 2.0, size=width)))
    if kind == "linear":
        return Linear(variance=variance)
    if kind == "bias":
        return Bias(variance=variance)
    if kind == "cosine":
        return Cosine(variance=variance, lengthscales=tuple(rng.uniform(1.0, 3.0, size=width)))
    if kind == "periodicmatern32":
        return PeriodicMatern32(
            variance=variance,
            lengthscales=tuple(rng.uniform(0.5, 2.0, size=width)),
            period=float(rng.uniform(1.0, 3.0)),
        )
    if kind == "brownian":
        return BrownianMotion(variance=variance, active_dims=(int(rng.integers(n_features)),), origin=-1.5)
    return WhiteNoise(variance=float(rng.uniform(0.05, 0.5)))


def random_kernel(rng, n_features):
    """A sum or product of one to three random leaves, possibly nested once."""
    kernel = random_leaf(rng, n_features)
    for _ in range(int(rng.integers(0, 3))):
        other = random_leaf(rng, n_features)
        kernel = kernel + other if rng.random() < 0.5 else kernel * other
    return kernel


def random_tree(rng, n_features, depth):
    """A random sum/product tree with at most `depth` operator levels."""
    if depth == 0 or rng.random() < 0.3:
        return random_leaf(rng, n_features)
    left = random_tree(rng, n_features, depth - 1)
    right = random_tree(rng, n_features, depth - 1)
    return left + right if rng.random() < 0.5 else left * right


def assert_positive_semidefinite(K, context):
    scale = max(np.abs(K).max(), np.finfo(float).tiny)
    assert np.abs(K - K.T).max() <= 1e-12 * scale, context
    eigenvalues = np.linalg.eigvalsh(K)
    assert eigenvalues.min() >= -1e-8 * max(np.abs(eigenvalues).max(), np.finfo(float).tiny), context


def dense_oracle(kernel, X, y, Xstar, total_noise):
    """Exact GP posterior by explicit inversion of K + total_noise I."""
    inverse = np.linalg.inv(kernel.gram(X) + total_noise * np.eye(X.shape[0]))
    cross = kernel.gram(X, Xstar)
    mean = cross.T @ inverse @ y
    variance = kernel.diag(Xstar) - np.einsum("ij,ik,kj->j", cross, inverse, cross)
    return mean, variance


@pytest.mark.oracle
def test_single_member_ensemble_matches_dense_gp(rng):
    """K=1, Ns=n without replacement and fixed hyperparameters is the exact GP."""
    for trial in range(20):
        n = int(rng.integers(10, 201))
        d = int(rng.integers(1, 6))
        X = rng.uniform(-2.0, 2.0, size=(n, d))
        y = np.sin(X.sum(axis=1)) + 0.1 * rng.normal(size=n)
        kernel = RBF(
            variance=float(rng.uniform(0.5, 2.0)),
            lengthscales=tuple(rng.uniform(0.5, 2.0, size=d)),
            fixed=frozenset({"variance", "lengthscales"}),
        )
        noise = NoiseSpec(sigma_n_sq=float(rng.uniform(0.05, 0.5)), fixed=True)
        config = EnsembleConfig(Ns=n, K=1, with_replacement=False, seed=trial)
        model = fit_ensemble(Dataset(X=X, y=y), kernel, config, noise=noise)
        Xstar = rng.uniform(-2.5, 2.5, size=(25, d))

        prediction = model.predict(Xstar)
        member = model.members[0]
        mean, variance = dense_oracle(kernel, X, y, Xstar, noise.sigma_n_sq + member.jitter)

        assert np.linalg.norm(prediction.mean - mean) <= 1e-8 * max(np.linalg.norm(mean), 1e-12)
        assert np.max(np.abs(prediction.variance - np.maximum(variance, 0.0))) <= 1e-6


@pytest.mark.oracle
def test_lml_gradient_matches_finite_differences(rng):
    for _ in range(50):
        n = int(rng.integers(5, 31))
        d = int(rng.integers(1, 4))
        X = rng.uniform(-1.0, 1.0, size=(n, d))
        data = Dataset(X=X, y=np.cos(2.0 * X[:, 0]) + 0.2 * rng.normal(size=n))
        kernel = random_kernel(rng, d)
        noise = NoiseSpec(sigma_n_sq=float(rng.uniform(0.1, 0.5)))
        count = int(kernel.free_mask().sum())
        theta = np.append(kernel.free_log_params(), math.log(noise.sigma_n_sq))

        def lml_at(values):
            model = fit_exact(
                data,
                kernel.with_free_log_params(values[:count]),
                NoiseSpec(sigma_n_sq=float(np.exp(values[count]))),
            )
            return log_marginal_likelihood(model)

        analytic = lml_gradient(fit_exact(data, kernel, noise))
        assert analytic.shape == theta.shape
        for index in range(theta.size):
            step = np.zeros_like(theta)
            step[index] = FD_STEP
            numeric = (lml_at(theta + step) - lml_at(theta - step)) / (2.0 * FD_STEP)
            scale = max(abs(analytic[index]), abs(numeric))
            assert abs(analytic[index] - numeric) <= 1e-4 * scale + 1e-6, (kernel, index)


@pytest.mark.oracle
def test_composed_kernels_are_positive_semidefinite(rng):
    """Every leaf kind under random sum/product trees up to three levels deep."""
    for kind in LEAF_KINDS:
        for _ in range(20):
            d = int(rng.integers(1, 4))
            X = rng.uniform(-2.0, 2.0, size=(int(rng.integers(5, 41)), d))
            leaf = random_leaf(rng, d, kind)
            depth = int(rng.integers(0, 3))
            if rng.random() < 0.2:
                kernel = leaf
            elif rng.random() < 0.5:
                kernel = leaf + random_tree(rng, d, depth)
            else:
                kernel = leaf * random_tree(rng, d, depth)
            assert_positive_semidefinite(kernel.gram(X), kernel)


@pytest.mark.oracle
def test_kernel_mixtures_are_positive_semidefinite(rng):
    for K in (2, 3, 5):
        for _ in range(20):
            d = int(rng.integers(1, 4))
            X = rng.uniform(-2.0, 2.0, size=(30, d))
            specs = [random_tree(rng, d, 3) for _ in range(K)]
            assert_positive_semidefinite(mixture_gram(specs, X), specs)


@pytest.mark.oracle
def test_combination_rules_match_closed_form(rng):
    for _ in range(1000):
        K = int(rng.integers(1, 11))
        means = rng.normal(0.0, 3.0, size=K)
        variances = rng.uniform(0.01, 5.0, size=K)

        average = combine_average(means, variances)
        expected_mean = sum(float(mean) for mean in means) / K
        expected_variance = sum(float(variance) for variance in variances) / K ** 2
        assert abs(float(average.mean) - expected_mean) <= 1e-12 * max(1.0, abs(expected_mean))
        assert abs(float(average.variance) - expected_variance) <= 1e-12 * max(1.0, expected_variance)

        poe = combine_poe(means, variances)
        precision = sum(1.0 / float(variance) for variance in variances)
        poe_variance = 1.0 / precision
        poe_mean = poe_variance * sum(float(mean) / float(variance) for mean, variance in zip(means, variances))
        assert abs(float(poe.variance) - poe_variance) <= 1e-12 * max(1.0, poe_variance)
        assert abs(float(poe.mean) - poe_mean) <= 1e-12 * max(1.0, abs(poe_mean))

        shared = np.full(K, variances[0])
        assert abs(float(combine_poe(means, shared).mean) - float(combine_average(means, shared).mean)) <= 1e-12 * max(
            1.0, abs(expected_mean)
        )


@pytest.mark.oracle
def test_sizing_formula_is_monotone_and_reproduces_known_point():
    sizes = [int(value) for value in np.logspace(2, 7, 10)]
    epsilons = list(np.logspace(-3, 1, 10))
    constants = [0.5, 1.0, 2.0]
    grid = np.array([
        [[size_by_formula(N, epsilon, C).Ns for C in constants] for epsilon in epsilons] for N in sizes
    ])
    assert np.all(np.diff(grid, axis=0) >= 0)
    assert np.all(np.diff(grid, axis=1) <= 0)
    assert np.all(np.diff(grid, axis=2) <= 0)
    assert np.all(grid >= 8)
    assert np.all(grid <= np.array(sizes)[:, None, None])

    expected = math.ceil(1e6 ** (1.0 / math.log(math.log(1e6))))
    assert expected == 193
    assert size_by_formula(10 ** 6, 1.0, 1.0).Ns == 193
