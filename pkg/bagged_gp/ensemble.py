#
# Copyright Elasticsearch B.V. and/or licensed to Elasticsearch B.V. under one
# or more contributor license agreements. Licensed under the Elastic License 2.0;
# you may not use this file except in compliance with the Elastic License 2.0.
#
"""ensemble module fits K exact GPs on bootstrap subsets and combines them.

Every member draws its subset from its own random stream, derived from the
run seed and the member index, and fits its own hyperparameters from the
shared kernel template. Members are fitted and queried in threads; results
do not depend on the number of workers.

Two combination rules are available:

* average: mean = (1/K) sum mu_i, variance = (1/K^2) sum sigma_i^2
* poe (product of experts): T_i = 1 / sigma_i^2, variance = 1 / sum T_i,
  mean = variance * sum mu_i T_i
"""

import logging
import time
from dataclasses import dataclass, replace
from typing import List, Optional

import numpy as np

from .dataset import Dataset, Standardization
from .gp_core import GPModel, NoiseSpec, Prediction, log_marginal_likelihood
from .hyperopt import OptimizerConfig, fit_gp
from .kernels import Kernel, KernelDimensionError, as_inputs, mixture_gram
from .utils import member_rng, run_in_threads

logger = logging.getLogger(__name__)

AVERAGE = "average"
POE = "poe"
COMBINATIONS = (AVERAGE, POE)
PRECISION_FLOOR = 1e-12


class EnsembleFitError(Exception):
    """Exception raised when an ensemble member cannot be fitted.

    Attributes:
        member_index -- index of the failed member in draw order
        cause -- the underlying exception
    """

    def __init__(self, member_index, cause):
        super().__init__(f"Ensemble member {member_index} failed to fit: {cause}")
        self.member_index = member_index
        self.cause = cause


@dataclass(frozen=True)
class EnsembleConfig:
    """Number of members K, subset size Ns and how subsets are drawn and combined."""

    Ns: int
    K: int = 30
    with_replacement: bool = True
    combination: str = AVERAGE
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.K < 1:
            raise ValueError(f"K must be at least 1, got {self.K}")
        if self.Ns < 1:
            raise ValueError(f"Ns must be at least 1, got {self.Ns}")
        if self.combination not in COMBINATIONS:
            raise ValueError(f"Unknown combination {self.combination!r}, expected one of {COMBINATIONS}")


@dataclass(frozen=True, eq=False)
class EnsembleModel:
    """K fitted members in draw order plus the rule that combines them.

    The combined estimator is associated with the uniform kernel mixture
    (1/K) sum_i k_i of the member kernels; see mixture_gram()."""

    members: List[GPModel]
    config: EnsembleConfig
    template: Kernel
    standardization: Optional[Standardization] = None

    def __post_init__(self):
        if len(self.members) != self.config.K:
            raise ValueError(f"Expected {self.config.K} members, got {len(self.members)}")
        widths = {member.data.n_features for member in self.members}
        if len(widths) != 1:
            raise ValueError(f"Members disagree on input dimensionality: {sorted(widths)}")

    @property
    def n_features(self):
        return self.members[0].data.n_features

    def member_lml(self):
        return [log_marginal_likelihood(member) for member in self.members]

    def mixture_gram(self, X, X2=None):
        """Gram matrix of the member-kernel mixture on standardized inputs."""
        return mixture_gram([member.kernel for member in self.members], X, X2)

    def predict(self, Xstar, observation_variance=False, combination=None):
        return predict_ensemble(self, Xstar, observation_variance, combination)


def draw_subset(N, config: EnsembleConfig, member_index):
    """Row indices of one member's subset, from stream member_index of the seed."""
    if config.Ns > N and not config.with_replacement:
        raise ValueError(f"Cannot draw {config.Ns} of {N} rows without replacement")
    rng = member_rng(config.seed, member_index)
    return rng.choice(N, size=config.Ns, replace=config.with_replacement)


def fit_ensemble(data: Dataset, template: Kernel, config: EnsembleConfig,
                 opt: Optional[OptimizerConfig] = None, noise: Optional[NoiseSpec] = None) -> EnsembleModel:
    """Fits K members, each by fit_gp on its own subset of Ns rows."""
    opt = opt or OptimizerConfig()
    if data.n_rows < config.Ns:
        raise ValueError(f"Subset size {config.Ns} exceeds the {data.n_rows} available rows")

    def fit_member(index):
        started = time.perf_counter()
        rows = draw_subset(data.n_rows, config, index)
        member_opt = replace(opt, seed=int(member_rng(config.seed, index, 1).integers(2 ** 31)))
        try:
            model = fit_gp(data.subset(rows), template, member_opt, noise)
        except Exception as exception:
            logger.exception("Ensemble member %s failed", index)
            raise EnsembleFitError(index, exception) from exception
        logger.info(
            "Fitted member %s/%s on %s rows: log marginal likelihood %.4f in %.2fs",
            index + 1, config.K, config.Ns, log_marginal_likelihood(model), time.perf_counter() - started,
        )
        return model

    members = run_in_threads(config.workers, fit_member, range(config.K))
    return EnsembleModel(members=members, config=config, template=template, standardization=data.standardization)


def combine_average(means, variances) -> Prediction:
    """Model averaging of K members; inputs have shape (K,) or (K, m)."""
    means = np.asarray(means, dtype=float)
    variances = np.asarray(variances, dtype=float)
    K = means.shape[0]
    return Prediction(mean=means.sum(axis=0) / K, variance=variances.sum(axis=0) / K ** 2)


def combine_poe(means, variances) -> Prediction:
    """Product of experts of K members; inputs have shape (K,) or (K, m)."""
    means = np.asarray(means, dtype=float)
    precisions = 1.0 / np.maximum(np.asarray(variances, dtype=float), PRECISION_FLOOR)
    variance = 1.0 / precisions.sum(axis=0)
    return Prediction(mean=variance * (means * precisions).sum(axis=0), variance=variance)


COMBINERS = {AVERAGE: combine_average, POE: combine_poe}


def member_predictions(model: EnsembleModel, Xstar, observation_variance=False):
    """Stacked member means and variances, each of shape (K, m)."""
    Xstar = as_inputs(Xstar)
    if Xstar.shape[1] != model.n_features:
        raise KernelDimensionError(
            f"Ensemble was trained on {model.n_features} features, got {Xstar.shape[1]}",
            expected=model.n_features,
            actual=Xstar.shape[1],
        )
    predictions = run_in_threads(
        model.config.workers,
        lambda member: member.predict(Xstar, observation_variance),
        model.members,
    )
    means = np.stack([prediction.mean for prediction in predictions])
    variances = np.stack([prediction.variance for prediction in predictions])
    return means, variances


def combine(means, variances, combination) -> Prediction:
    if combination not in COMBINERS:
        raise ValueError(f"Unknown combination {combination!r}, expected one of {COMBINATIONS}")
    return COMBINERS[combination](means, variances)


def predict_ensemble(model: EnsembleModel, Xstar, observation_variance=False, combination=None) -> Prediction:
    """Combines the member predictions at every query point (raw units)."""
    means, variances = member_predictions(model, Xstar, observation_variance)
    return combine(means, variances, combination or model.config.combination)
