#
# Copyright Elasticsearch B.V. and/or licensed to Elasticsearch B.V. under one
# or more contributor license agreements. Licensed under the Elastic License 2.0;
# you may not use this file except in compliance with the Elastic License 2.0.
#
"""experiment module runs the train/test protocol behind `eval` and `bench-sinc`.

A run loads or generates a dataset, splits it 70/30 by a seeded shuffle,
standardizes the training part, sizes the subsets, fits the ensemble and
scores both combination rules on the held-out rows. The resulting RunReport
echoes the full configuration so the run can be regenerated from it."""

import logging
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from . import __version__
from .configuration import Configuration
from .dataset import Dataset, generate_sinc, read_delimited, train_test_split
from .ensemble import AVERAGE, POE, EnsembleConfig, combine, fit_ensemble, member_predictions
from .gp_core import NoiseSpec
from .hyperopt import OptimizerConfig
from .kernel_grammar import parse_kernel
from .model_archive import save_model
from .report import write_predictions, write_report
from .subset_sizing import ProbeConfig, SizingPlan, infer_delta, size_by_formula, size_explicit

logger = logging.getLogger(__name__)

NOISY_C = 0.5


@dataclass(frozen=True, eq=False)
class RunConfig:
    """Typed view over a validated, flat configuration document."""

    values: dict

    @classmethod
    def from_configuration(cls, configuration: Configuration):
        return cls(values=configuration.as_dict())

    @classmethod
    def from_values(cls, values):
        """Validates a flat document, e.g. the config echo of a report."""
        return cls.from_configuration(Configuration(flag_values=values))

    def with_values(self, overrides):
        """A copy with the dotted keys of `overrides` replaced, e.g. {"ensemble.K": 2}."""
        return RunConfig.from_values({**self.values, **overrides})

    def get(self, key):
        return self.values[key]

    @property
    def seed(self):
        return self.values["seed"]

    @property
    def C(self):
        return NOISY_C if self.values["sizing.noisy"] else self.values["sizing.C"]

    def kernel_template(self):
        return parse_kernel(self.values["kernel"])

    def noise(self):
        return NoiseSpec(sigma_n_sq=self.values["noise.sigma_n_sq"], fixed=self.values["noise.fixed"])

    def optimizer(self):
        return OptimizerConfig(
            restarts=self.values["optimizer.restarts"],
            max_iterations=self.values["optimizer.max_iterations"],
            tolerance=self.values["optimizer.tolerance"],
            log_bounds=(self.values["optimizer.log_bound_low"], self.values["optimizer.log_bound_high"]),
            seed=self.seed,
            restart_workers=self.values["optimizer.restart_workers"],
        )

    def probe(self):
        return ProbeConfig(
            sample_size=self.values["sizing.probe_size"],
            delta_start=self.values["sizing.delta_start"],
            delta_step=self.values["sizing.delta_step"],
            seed=self.seed,
            optimizer=self.optimizer(),
        )

    def ensemble(self, Ns):
        return EnsembleConfig(
            Ns=Ns,
            K=self.values["ensemble.K"],
            with_replacement=self.values["ensemble.with_replacement"],
            combination=self.values["ensemble.combination"],
            seed=self.seed,
            workers=self.values["ensemble.workers"],
        )


@dataclass
class RunReport:
    """Outcome of one command run; see docs/report_format.md."""

    command: str
    config: dict
    status: str = "ok"
    error: Optional[str] = None
    sizing: Optional[SizingPlan] = None
    member_lml: List[float] = field(default_factory=list)
    rmse: Optional[float] = None
    rmse_average: Optional[float] = None
    rmse_poe: Optional[float] = None
    sd_baseline: Optional[float] = None
    n_train: Optional[int] = None
    n_test: Optional[int] = None
    timings: dict = field(default_factory=dict)
    repeats: Optional[List[dict]] = None
    library_version: str = __version__

    def to_dict(self):
        document = {
            "status": self.status,
            "command": self.command,
            "error": self.error,
            "library_version": self.library_version,
            "config": dict(self.config),
            "timings": dict(self.timings),
        }
        if self.sizing is not None:
            document["sizing"] = self.sizing.to_dict()
        if self.member_lml:
            document["member_lml"] = [float(value) for value in self.member_lml]
        for key in ("rmse", "rmse_average", "rmse_poe", "sd_baseline"):
            if getattr(self, key) is not None:
                document[key] = float(getattr(self, key))
        for key in ("n_train", "n_test"):
            if getattr(self, key) is not None:
                document[key] = int(getattr(self, key))
        if self.repeats is not None:
            document["repeats"] = list(self.repeats)
        return document


@dataclass(frozen=True)
class Evaluation:
    rmse: float
    sd_baseline: float


def evaluate(predictions, truths) -> Evaluation:
    """RMSE of the predictions and the population standard deviation of the truths."""
    predictions = np.asarray(predictions, dtype=float).ravel()
    truths = np.asarray(truths, dtype=float).ravel()
    if predictions.shape != truths.shape:
        raise ValueError(f"{predictions.size} predictions for {truths.size} truths")
    if truths.size < 1:
        raise ValueError("Cannot evaluate an empty test set")
    rmse = float(np.sqrt(np.mean((predictions - truths) ** 2)))
    sd_baseline = float(np.std(truths)) if np.ptp(truths) > 0 else 0.0
    return Evaluation(rmse=rmse, sd_baseline=sd_baseline)


@contextmanager
def timed(timings, stage):
    """Records the wall-clock seconds of the block in timings[stage], even on failure."""
    started = time.perf_counter()
    try:
        yield
    finally:
        timings[stage] = time.perf_counter() - started
        logger.info("Stage %s took %.3fs", stage, timings[stage])


def load_dataset(config: RunConfig) -> Dataset:
    """The raw dataset of a run: a delimited file or generated sinc data."""
    if config.get("data.source") == "sinc":
        return generate_sinc(
            config.get("generator.n"),
            (config.get("generator.x_min"), config.get("generator.x_max")),
            noise_sd=config.get("generator.noise_sd"),
            seed=config.seed,
        )
    dataset, _ = read_delimited(
        config.get("data.path"),
        config.get("data.target_column"),
        config.get("data.feature_columns"),
        config.get("data.delimiter"),
    )
    return dataset


def prepare(config: RunConfig, dataset: Optional[Dataset] = None):
    """Splits the run's dataset; returns (train, test) with train standardized
    when data.standardize is set and test always in raw units."""
    dataset = dataset if dataset is not None else load_dataset(config)
    train, test = train_test_split(dataset, config.get("split_fraction"), seed=config.seed)
    if config.get("data.standardize"):
        train = train.standardized()
    logger.info("Split %s rows into %s train and %s test rows", dataset.n_rows, train.n_rows, test.n_rows)
    return train, test


def plan_subset_size(train: Dataset, config: RunConfig) -> SizingPlan:
    method = config.get("sizing.method")
    if method == "explicit":
        plan = size_explicit(train.n_rows, config.get("sizing.delta"))
    elif method == "infer":
        plan = infer_delta(train, config.get("sizing.epsilon"), config.kernel_template(), config.probe())
    else:
        plan = size_by_formula(train.n_rows, config.get("sizing.epsilon"), config.C)
    logger.info("Subset size Ns=%s for N=%s (%s, delta %.4f)", plan.Ns, plan.N, plan.method, plan.effective_delta)
    return plan


def score(model, test: Dataset, report: RunReport, combination):
    """Fills the RMSE fields of the report from one pass of member predictions."""
    means, variances = member_predictions(model, test.X)
    truths = test.raw_y()
    by_rule = {rule: evaluate(combine(means, variances, rule).mean, truths) for rule in (AVERAGE, POE)}
    report.rmse_average = by_rule[AVERAGE].rmse
    report.rmse_poe = by_rule[POE].rmse
    report.rmse = by_rule[combination].rmse
    report.sd_baseline = by_rule[combination].sd_baseline
    report.n_test = test.n_rows
    return combine(means, variances, combination)


def run_experiment(config: RunConfig, command="eval", dataset: Optional[Dataset] = None, write=True) -> RunReport:
    """Split, size, fit and test; writes the report (and failure report) when configured."""
    report = RunReport(command=command, config=config.values)
    try:
        train, test = prepare(config, dataset)
        report.n_train = train.n_rows
        with timed(report.timings, "sizing"):
            report.sizing = plan_subset_size(train, config)
        with timed(report.timings, "fit"):
            model = fit_ensemble(
                train,
                config.kernel_template(),
                config.ensemble(report.sizing.Ns),
                config.optimizer(),
                config.noise(),
            )
        report.member_lml = model.member_lml()
        with timed(report.timings, "predict"):
            prediction = score(model, test, report, config.get("ensemble.combination"))
        logger.info(
            "Test RMSE %.6g (average %.6g, poe %.6g) against SD baseline %.6g",
            report.rmse, report.rmse_average, report.rmse_poe, report.sd_baseline,
        )
        if write and config.get("output.model"):
            save_model(model, config.get("output.model"))
        if write and config.get("output.predictions"):
            write_predictions(config.get("output.predictions"), prediction, test.raw_y())
    except Exception as exception:
        logger.exception("Run failed")
        report.status = "failed"
        report.error = f"{type(exception).__name__}: {exception}"
        if write and config.get("output.report"):
            write_report(report.to_dict(), config.get("output.report"))
        raise
    if write and config.get("output.report"):
        write_report(report.to_dict(), config.get("output.report"))
    return report
