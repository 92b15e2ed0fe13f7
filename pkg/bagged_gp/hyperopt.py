#
# Copyright Elasticsearch B.V. and/or licensed to Elasticsearch B.V. under one
# or more contributor license agreements. Licensed under the Elastic License 2.0;
# you may not use this file except in compliance with the Elastic License 2.0.
#
"""hyperopt module fits kernel hyperparameters and the noise variance of one GP
by maximizing the log marginal likelihood.

The search runs in log-parameter space inside box bounds with L-BFGS-B and
is restarted from perturbed starting points. The best point ever evaluated
is kept, so the returned likelihood is never below the starting one."""

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Callable, List, Optional, Tuple

import numpy as np
from scipy.optimize import minimize

from .dataset import Dataset
from .gp_core import GPModel, NoiseSpec, NumericalError, fit_exact, lml_gradient, log_marginal_likelihood
from .kernels import BrownianMotion, Kernel, KernelDimensionError, LengthscaleKernel, PeriodicMatern32, WhiteNoise
from .utils import member_rng, run_in_threads

logger = logging.getLogger(__name__)

TIE_TOLERANCE = 1e-9
FAILED_STEP_PENALTY = 1e6


class HyperparameterSearchError(NumericalError):
    """Exception raised when no restart could evaluate the likelihood.

    Attributes:
        jitter_ladder -- the jitter values tried by the last failure
    """


@dataclass(frozen=True)
class OptimizerConfig:
    """Settings of the marginal-likelihood search."""

    restarts: int = 3
    max_iterations: int = 200
    tolerance: float = 1e-5
    log_bounds: Tuple[float, float] = (-10.0, 10.0)
    seed: int = 0
    restart_workers: int = 1

    def __post_init__(self):
        low, high = (float(bound) for bound in self.log_bounds)
        object.__setattr__(self, "log_bounds", (low, high))
        if self.restarts < 1:
            raise ValueError(f"restarts must be at least 1, got {self.restarts}")
        if self.max_iterations < 1:
            raise ValueError(f"max_iterations must be at least 1, got {self.max_iterations}")
        if not self.tolerance > 0:
            raise ValueError(f"tolerance must be positive, got {self.tolerance}")
        if not (math.isfinite(low) and math.isfinite(high) and low < high):
            raise ValueError(f"log_bounds must be finite and increasing, got {self.log_bounds}")


@dataclass
class OptimizationResult:
    """Best point of one maximization run.

    trace holds the best-so-far objective after the start and after every
    accepted iterate."""

    theta: np.ndarray
    value: float
    trace: List[float] = field(default_factory=list)
    iterations: int = 0
    converged: bool = False
    message: str = ""


def maximize(objective: Callable, theta0, bounds, max_iterations=200, tolerance=1e-5) -> OptimizationResult:
    """Maximizes objective(theta) -> (value, gradient) with bounded L-BFGS-B.

    Evaluations that raise NumericalError are treated as steps to reject.
    Terminates when the projected gradient max-norm drops to `tolerance` or
    after `max_iterations` iterations."""
    theta0 = np.asarray(theta0, dtype=float)
    best = {"theta": theta0.copy(), "value": -np.inf}
    trace = []

    def negated(theta):
        try:
            value, gradient = objective(theta)
        except NumericalError as exception:
            logger.debug("Rejected step at %s: %s", theta, exception)
            value, gradient = -np.inf, None
        if not np.isfinite(value):
            penalty = -best["value"] + FAILED_STEP_PENALTY if np.isfinite(best["value"]) else FAILED_STEP_PENALTY
            return penalty, np.zeros_like(theta)
        if value > best["value"]:
            best["theta"], best["value"] = np.array(theta, dtype=float), float(value)
        return -value, -np.asarray(gradient, dtype=float)

    if theta0.size == 0:
        value, _ = objective(theta0)
        return OptimizationResult(theta=theta0, value=float(value), trace=[float(value)], converged=True)

    negated(theta0)
    trace.append(best["value"])
    result = minimize(
        negated,
        theta0,
        jac=True,
        method="L-BFGS-B",
        bounds=[tuple(bound) for bound in np.broadcast_to(np.asarray(bounds, dtype=float), (theta0.size, 2))],
        options={"maxiter": max_iterations, "gtol": tolerance, "ftol": 1e-12},
        callback=lambda _: trace.append(best["value"]),
    )
    return OptimizationResult(
        theta=best["theta"],
        value=best["value"],
        trace=trace,
        iterations=int(result.nit),
        converged=bool(result.success),
        message=str(result.message),
    )


def initialize(data: Dataset, template: Kernel, noise: NoiseSpec):
    """Data-driven starting values for every free parameter.

    Signal variances start at Var(y) (white noise at 0.1 Var(y)), lengthscales
    at the per-column standard deviation of X, the noise variance at
    0.1 Var(y). Brownian origins without a value move to the column minimum."""
    variance_y = float(np.var(data.y))
    if not variance_y > 0:
        variance_y = 1.0
    column_std = data.X.std(axis=0)
    column_std = np.where(column_std > 0, column_std, 1.0)

    def initialize_leaf(leaf):
        columns = leaf.input_columns(data.n_features)
        if max(columns) >= data.n_features:
            raise KernelDimensionError(
                f"{leaf.kind} reads column {max(columns)} of data with {data.n_features} columns",
                expected=max(columns) + 1,
                actual=data.n_features,
            )
        updates = {}
        if "variance" not in leaf.fixed:
            updates["variance"] = 0.1 * variance_y if isinstance(leaf, WhiteNoise) else variance_y
        if isinstance(leaf, LengthscaleKernel) and "lengthscales" not in leaf.fixed:
            updates["lengthscales"] = tuple(float(value) for value in column_std[columns])
        if isinstance(leaf, BrownianMotion) and leaf.origin is None:
            updates["origin"] = float(data.X[:, columns[0]].min())
        return replace(leaf, **updates)

    kernel = template.map_leaves(initialize_leaf)
    if not noise.fixed:
        noise = replace(noise, sigma_n_sq=0.1 * variance_y)
    return kernel, noise


def _split(theta, kernel, noise):
    count = int(kernel.free_mask().sum())
    kernel = kernel.with_free_log_params(theta[:count])
    if not noise.fixed:
        noise = replace(noise, sigma_n_sq=float(np.exp(theta[count])))
    return kernel, noise


def _pack(kernel, noise):
    theta = list(kernel.free_log_params())
    if not noise.fixed:
        theta.append(math.log(noise.sigma_n_sq))
    return np.asarray(theta, dtype=float)


def _template_values(template, kernel0):
    """kernel0 with the values written in template.

    initialize() gives every lengthscale kernel one lengthscale per column, so a
    shared template lengthscale is repeated across them."""
    source = iter(list(template.leaves()))

    def carry(leaf):
        written = next(source)
        updates = {"variance": written.variance}
        if isinstance(leaf, LengthscaleKernel):
            updates["lengthscales"] = tuple(
                float(value) for value in np.broadcast_to(written.lengthscales, (len(leaf.lengthscales),))
            )
        if isinstance(leaf, PeriodicMatern32):
            updates["period"] = written.period
        return replace(leaf, **updates)

    return kernel0.map_leaves(carry)


def fit_gp(data: Dataset, template: Kernel, config: Optional[OptimizerConfig] = None,
           noise: Optional[NoiseSpec] = None) -> GPModel:
    """Returns the GP with the highest log marginal likelihood across restarts.

    Restart 0 starts from whichever of initialize() and the values written in
    the template (with the given noise) has the higher likelihood, so the
    result is never below the template's own point. Restart i > 0 perturbs the
    initialize() start by uniform(-1, 1) in every log-parameter, drawn from
    stream i of the seed. Equal likelihoods (within 1e-9) go to the lowest
    restart index."""
    config = config or OptimizerConfig()
    noise = noise or NoiseSpec()
    if not template.free_mask().any() and noise.fixed:
        return fit_exact(data, template, noise)

    kernel0, noise0 = initialize(data, template, noise)
    low, high = config.log_bounds
    theta0 = np.clip(_pack(kernel0, noise0), low, high)

    def objective(theta):
        kernel, model_noise = _split(theta, kernel0, noise0)
        model = fit_exact(data, kernel, model_noise)
        return log_marginal_likelihood(model), lml_gradient(model)

    def value_at(theta):
        try:
            value, _ = objective(theta)
        except NumericalError:
            return -np.inf
        return value if np.isfinite(value) else -np.inf

    template_noise = noise
    if not noise.fixed and not noise.sigma_n_sq > 0:
        template_noise = replace(noise, sigma_n_sq=math.exp(low))
    theta_template = np.clip(_pack(_template_values(template, kernel0), template_noise), low, high)
    first_start = theta0
    if value_at(theta_template) > value_at(theta0):
        logger.debug("Restart 0 starts from the template values")
        first_start = theta_template

    def run_restart(index):
        start = first_start
        if index > 0:
            rng = member_rng(config.seed, index)
            start = np.clip(theta0 + rng.uniform(-1.0, 1.0, size=theta0.size), low, high)
        result = maximize(objective, start, (low, high), config.max_iterations, config.tolerance)
        logger.debug(
            "Restart %s: log marginal likelihood %.6f after %s iterations (%s)",
            index, result.value, result.iterations, result.message,
        )
        return result

    results = run_in_threads(config.restart_workers, run_restart, range(config.restarts))

    best = None
    for result in results:
        if not np.isfinite(result.value):
            continue
        if best is None or result.value > best.value + TIE_TOLERANCE:
            best = result
    if best is None:
        raise HyperparameterSearchError(f"All {config.restarts} restarts failed to factorize the covariance")

    kernel, model_noise = _split(best.theta, kernel0, noise0)
    return fit_exact(data, kernel, model_noise)
