#
# Copyright Elasticsearch B.V. and/or licensed to Elasticsearch B.V. under one
# or more contributor license agreements. Licensed under the Elastic License 2.0;
# you may not use this file except in compliance with the Elastic License 2.0.
#
"""gp_core module performs exact Gaussian Process regression on one dataset.

Fitting factorizes K(X, X) + sigma_n^2 I with a Cholesky decomposition and
precomputes alpha = (K + sigma_n^2 I)^-1 y. A diagonal jitter, escalated by
powers of ten when the factorization fails, keeps matrices with duplicated
rows factorizable.

Models work in the units of their dataset. When the dataset carries a
standardization, predict() accepts raw inputs and reports raw responses."""

import logging
import math
from dataclasses import dataclass
from typing import List

import numpy as np
from scipy.linalg import LinAlgError, cho_solve, cholesky, solve_triangular

from .dataset import Dataset
from .kernels import Kernel, KernelDimensionError, as_inputs
from .utils import split_rows_into_chunks

logger = logging.getLogger(__name__)

JITTER_START = 1e-8
JITTER_GROWTH = 10.0
JITTER_STEPS = 7  # 1e-8 ... 1e-2 times the mean diagonal
PREDICT_BATCH_SIZE = 512
NOISE_PARAMETER = "noise.sigma_n_sq"


class NumericalError(ArithmeticError):
    """Exception raised when a covariance matrix cannot be factorized.

    Attributes:
        jitter_ladder -- the jitter values tried, in order
    """

    def __init__(self, message, jitter_ladder=None):
        super().__init__(message)
        self.jitter_ladder = list(jitter_ladder or [])


@dataclass(frozen=True)
class NoiseSpec:
    """Observation-noise variance sigma_n^2 in squared response units."""

    sigma_n_sq: float = 0.1
    fixed: bool = False

    def __post_init__(self):
        object.__setattr__(self, "sigma_n_sq", float(self.sigma_n_sq))
        if not (math.isfinite(self.sigma_n_sq) and self.sigma_n_sq >= 0):
            raise ValueError(f"Noise variance must be finite and non-negative, got {self.sigma_n_sq}")


@dataclass(frozen=True, eq=False)
class Prediction:
    """Predictive means and variances, one entry per query point."""

    mean: np.ndarray
    variance: np.ndarray

    def __len__(self):
        return len(self.mean)

    def __getitem__(self, index):
        return Prediction(mean=float(self.mean[index]), variance=float(self.variance[index]))

    def __iter__(self):
        for index in range(len(self)):
            yield self[index]


@dataclass(frozen=True, eq=False)
class GPModel:
    """A fitted exact GP.

    chol is the lower Cholesky factor of K + (sigma_n^2 + jitter) I and
    alpha the corresponding solve of the training responses."""

    data: Dataset
    kernel: Kernel
    noise: NoiseSpec
    chol: np.ndarray
    alpha: np.ndarray
    jitter: float

    @property
    def n_rows(self):
        return self.data.n_rows

    def predict(self, Xstar, observation_variance=False):
        return predict(self, Xstar, observation_variance)

    def log_marginal_likelihood(self):
        return log_marginal_likelihood(self)


def _factorize(covariance):
    """Cholesky factor of covariance + jitter I, escalating the jitter on failure."""
    scale = float(np.mean(np.diag(covariance)))
    if not scale > 0:
        scale = 1.0
    identity = np.eye(covariance.shape[0])
    ladder = []
    for step in range(JITTER_STEPS):
        jitter = JITTER_START * scale * JITTER_GROWTH ** step
        ladder.append(jitter)
        try:
            chol = cholesky(covariance + jitter * identity, lower=True, check_finite=False)
        except LinAlgError:
            continue
        if step > 0:
            logger.warning("Cholesky factorization needed jitter %.3e (tried %s)", jitter, ladder)
        return chol, jitter
    raise NumericalError(
        f"Covariance matrix is not positive definite after jitter {ladder[-1]:.3e}", ladder
    )


def fit_exact(data: Dataset, kernel: Kernel, noise: NoiseSpec) -> GPModel:
    """Factorizes the training covariance for fixed hyperparameters."""
    K = kernel.gram(data.X)
    if not np.all(np.isfinite(K)):
        raise NumericalError("Kernel produced non-finite covariances")
    covariance = K + noise.sigma_n_sq * np.eye(data.n_rows)
    chol, jitter = _factorize(covariance)
    alpha = cho_solve((chol, True), data.y, check_finite=False)
    return GPModel(data=data, kernel=kernel, noise=noise, chol=chol, alpha=alpha, jitter=jitter)


def predict(model: GPModel, Xstar, observation_variance=False) -> Prediction:
    """Predictive mean k(x, X) alpha and latent variance k(x, x) - v'v, v = L^-1 k(X, x).

    With observation_variance the noise variance sigma_n^2 is added."""
    Xstar = as_inputs(Xstar)
    if Xstar.shape[1] != model.data.n_features:
        raise KernelDimensionError(
            f"Model was trained on {model.data.n_features} features, got {Xstar.shape[1]}",
            expected=model.data.n_features,
            actual=Xstar.shape[1],
        )
    standardization = model.data.standardization
    if standardization is not None:
        Xstar = standardization.transform_features(Xstar)

    means, variances = [], []
    for chunk in split_rows_into_chunks(Xstar, PREDICT_BATCH_SIZE):
        cross = model.kernel.gram(model.data.X, chunk)
        means.append(cross.T @ model.alpha)
        v = solve_triangular(model.chol, cross, lower=True, check_finite=False)
        variances.append(model.kernel.diag(chunk) - np.sum(v * v, axis=0))
    mean = np.concatenate(means) if means else np.zeros(0)
    variance = np.concatenate(variances) if variances else np.zeros(0)

    negative = int(np.sum(variance < 0))
    if negative:
        logger.debug("Clipped %s negative predictive variances to zero", negative)
        variance = np.maximum(variance, 0.0)
    if observation_variance:
        variance = variance + model.noise.sigma_n_sq

    if standardization is not None:
        mean = standardization.inverse_response(mean)
        variance = standardization.inverse_variance(variance)
    return Prediction(mean=mean, variance=variance)


def log_marginal_likelihood(model: GPModel) -> float:
    """-1/2 y' alpha - 1/2 log|K + sigma_n^2 I| - n/2 log(2 pi)"""
    n = model.n_rows
    return float(
        -0.5 * model.data.y @ model.alpha
        - np.sum(np.log(np.diag(model.chol)))
        - 0.5 * n * math.log(2.0 * math.pi)
    )


def parameter_names(kernel: Kernel, noise: NoiseSpec) -> List[str]:
    """Names of the free log-parameters, in the order lml_gradient reports them."""
    names = kernel.free_parameter_names()
    if not noise.fixed:
        names.append(NOISE_PARAMETER)
    return names


def lml_gradient(model: GPModel) -> np.ndarray:
    """dLML/dlog(theta) = 1/2 tr[(alpha alpha' - (K + sigma_n^2 I)^-1) dK/dlog(theta)]

    Entries follow parameter_names(model.kernel, model.noise)."""
    n = model.n_rows
    inverse = cho_solve((model.chol, True), np.eye(n), check_finite=False)
    weights = np.outer(model.alpha, model.alpha) - inverse
    gradient = [0.5 * float(np.sum(weights * dK)) for _, dK in model.kernel.gram_gradients(model.data.X)]
    if not model.noise.fixed:
        gradient.append(0.5 * model.noise.sigma_n_sq * float(np.trace(weights)))
    return np.asarray(gradient, dtype=float)
