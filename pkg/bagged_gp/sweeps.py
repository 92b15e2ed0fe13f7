#
# Copyright Elasticsearch B.V. and/or licensed to Elasticsearch B.V. under one
# or more contributor license agreements. Licensed under the Elastic License 2.0;
# you may not use this file except in compliance with the Elastic License 2.0.
#
"""sweeps module produces plot-ready tables of RMSE against one parameter.

* delta: RMSE versus delta with K fixed (Ns = ceil(N^delta), N = sweep.rows).
* estimators: RMSE versus K with Ns fixed, on sweep.rows training rows.
* dataset-size: inferred delta versus the fraction of the training rows used.
"""

import logging
import math
import time
from dataclasses import replace

from .ensemble import combine, fit_ensemble, member_predictions
from .experiment import RunConfig, evaluate, plan_subset_size, prepare
from .subset_sizing import infer_delta, size_explicit

logger = logging.getLogger(__name__)

DEFAULT_DELTAS = (0.3, 0.4, 0.5, 0.6, 0.7)
DEFAULT_ESTIMATORS = (1, 2, 5, 10, 20, 30, 40)
DEFAULT_FRACTIONS = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0)


def _row(parameter, value, Ns, rmse, sd_baseline, seconds, **extra):
    return {
        "parameter": parameter,
        "value": value,
        "Ns": Ns,
        "rmse": rmse,
        "sd_baseline": sd_baseline,
        "seconds": seconds,
        **extra,
    }


def sweep_rows(config: RunConfig):
    """Train and test split with train cut to its first sweep.rows rows.

    The split is a seeded shuffle, so the leading block is a simple random
    sample of the training rows."""
    train, test = prepare(config)
    rows = config.get("sweep.rows")
    if rows is not None and rows < train.n_rows:
        train = train.subset(range(rows))
        logger.info("Sweeping on %s of the training rows", rows)
    return train, test


def sweep_delta(config: RunConfig, deltas=DEFAULT_DELTAS):
    train, test = sweep_rows(config)
    rows = []
    for delta in deltas:
        started = time.perf_counter()
        Ns = size_explicit(train.n_rows, delta).Ns
        model = fit_ensemble(train, config.kernel_template(), config.ensemble(Ns), config.optimizer(), config.noise())
        means, variances = member_predictions(model, test.X)
        evaluation = evaluate(combine(means, variances, config.get("ensemble.combination")).mean, test.raw_y())
        logger.info("delta=%.2f Ns=%s: RMSE %.6g", delta, Ns, evaluation.rmse)
        rows.append(_row("delta", delta, Ns, evaluation.rmse, evaluation.sd_baseline, time.perf_counter() - started))
    return rows


def sweep_estimators(config: RunConfig, estimators=DEFAULT_ESTIMATORS, Ns=None):
    """Fits max(estimators) members once and scores each leading K of them.

    Member i depends only on the seed and i, so the first K members of the
    largest ensemble are exactly the members of a K-member ensemble."""
    train, test = sweep_rows(config)
    if Ns is None:
        Ns = plan_subset_size(train, config).Ns
    started = time.perf_counter()
    largest = replace(config.ensemble(Ns), K=max(estimators))
    model = fit_ensemble(train, config.kernel_template(), largest, config.optimizer(), config.noise())
    fit_seconds = time.perf_counter() - started
    means, variances = member_predictions(model, test.X)
    truths = test.raw_y()
    rows = []
    for K in estimators:
        evaluation = evaluate(combine(means[:K], variances[:K], config.get("ensemble.combination")).mean, truths)
        logger.info("K=%s Ns=%s: RMSE %.6g", K, Ns, evaluation.rmse)
        rows.append(_row("K", K, Ns, evaluation.rmse, evaluation.sd_baseline, fit_seconds * K / largest.K))
    return rows


def sweep_dataset_size(config: RunConfig, fractions=DEFAULT_FRACTIONS):
    """Training rows are already shuffled, so each fraction takes a leading block."""
    train, _ = prepare(config)
    rows = []
    for fraction in fractions:
        started = time.perf_counter()
        n = max(int(round(fraction * train.n_rows)), 2)
        part = train.subset(range(n))
        plan = infer_delta(part, config.get("sizing.epsilon"), config.kernel_template(), config.probe())
        rmse = plan.trace[-1].rmse if plan.trace else math.nan
        logger.info("fraction=%.2f (%s rows): delta %.2f, target met %s", fraction, n, plan.delta, plan.target_met)
        rows.append(_row(
            "fraction", fraction, plan.Ns, rmse, float(part.raw_y().std()), time.perf_counter() - started,
            N=n, delta=plan.delta, target_met=plan.target_met,
        ))
    return rows


SWEEPS = {
    "delta": sweep_delta,
    "estimators": sweep_estimators,
    "dataset-size": sweep_dataset_size,
}
