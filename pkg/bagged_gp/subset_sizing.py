#
# Copyright Elasticsearch B.V. and/or licensed to Elasticsearch B.V. under one
# or more contributor license agreements. Licensed under the Elastic License 2.0;
# you may not use this file except in compliance with the Elastic License 2.0.
#
"""subset_sizing module computes how many rows each ensemble member trains on.

Two estimators are provided:

* size_by_formula: Ns = N^delta(N) / g(epsilon) with delta(N) = 1 / ln(ln N)
  and g(epsilon) = C * epsilon^(1/10).
* infer_delta: treats delta as a proportion and searches for the smallest
  delta whose probe GP reaches the target RMSE on a small random sample.

size_explicit turns a known delta into a plan."""

import logging
import math
from dataclasses import asdict, dataclass, field
from typing import List, Optional

import numpy as np

from .dataset import Dataset, train_test_split
from .hyperopt import OptimizerConfig, fit_gp
from .kernels import Kernel
from .utils import member_rng

logger = logging.getLogger(__name__)

METHOD_FORMULA = "empirical-formula"
METHOD_INFERENCE = "proportion-inference"
METHOD_EXPLICIT = "explicit"

MIN_FORMULA_N = 16
MIN_SUBSET_SIZE = 8
EPSILON_EXPONENT = 0.1


@dataclass
class ProbeStep:
    """One evaluated grid point of the delta search."""

    delta: float
    subset_size: int
    rmse: float


@dataclass
class SizingPlan:
    """Subset size Ns for a dataset of N rows and how it was obtained."""

    N: int
    method: str
    Ns: int
    delta: Optional[float] = None
    epsilon: Optional[float] = None
    C: Optional[float] = None
    target_met: bool = True
    trace: List[ProbeStep] = field(default_factory=list)

    def __post_init__(self):
        if not 1 <= self.Ns <= self.N:
            raise ValueError(f"Subset size {self.Ns} outside [1, {self.N}]")

    @property
    def effective_delta(self):
        """ln(Ns) / ln(N), and 1 for a single-row dataset."""
        if self.N <= 1:
            return 1.0
        return math.log(self.Ns) / math.log(self.N)

    def to_dict(self):
        values = asdict(self)
        values["effective_delta"] = self.effective_delta
        if values["epsilon"] is not None and math.isinf(values["epsilon"]):
            values["epsilon"] = str(values["epsilon"])
        return values


def formula_delta(N):
    """delta(N) = 1 / ln(ln N), below 1 for N >= 16."""
    return 1.0 / math.log(math.log(N))


def size_by_formula(N, epsilon, C=1.0) -> SizingPlan:
    """Ns = ceil(N^(1/ln ln N) / (C epsilon^(1/10))), clamped to [8, N].

    Below N = 16 the exponent is not a proportion; Ns falls back to N."""
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    if not C > 0:
        raise ValueError(f"C must be positive, got {C}")
    if N < 1:
        raise ValueError(f"N must be at least 1, got {N}")
    if N < MIN_FORMULA_N:
        logger.warning("N=%s is below %s; using every row (Ns=N)", N, MIN_FORMULA_N)
        return SizingPlan(N=N, method=METHOD_FORMULA, Ns=N, delta=1.0, epsilon=epsilon, C=C)
    delta = formula_delta(N)
    size = math.ceil(N ** delta / (C * epsilon ** EPSILON_EXPONENT))
    Ns = min(max(size, MIN_SUBSET_SIZE), N)
    return SizingPlan(N=N, method=METHOD_FORMULA, Ns=Ns, delta=delta, epsilon=epsilon, C=C)


def size_explicit(N, delta) -> SizingPlan:
    """Ns = ceil(N^delta) for a given delta in (0, 1]."""
    if not 0 < delta <= 1:
        raise ValueError(f"delta must lie in (0, 1], got {delta}")
    Ns = min(max(math.ceil(N ** delta), 1), N)
    return SizingPlan(N=N, method=METHOD_EXPLICIT, Ns=Ns, delta=delta)


@dataclass(frozen=True)
class ProbeConfig:
    """Settings of the delta search of infer_delta."""

    sample_size: int = 2000
    train_fraction: float = 0.7
    delta_start: float = 0.1
    delta_step: float = 0.05
    delta_max: float = 1.0
    seed: int = 0
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)

    def grid(self):
        count = int(math.floor((self.delta_max - self.delta_start) / self.delta_step + 1e-9)) + 1
        return [round(self.delta_start + index * self.delta_step, 10) for index in range(count)]


def _rmse(predicted, truth):
    return float(np.sqrt(np.mean((predicted - truth) ** 2)))


def infer_delta(data: Dataset, epsilon, template: Kernel, probe: Optional[ProbeConfig] = None) -> SizingPlan:
    """Smallest grid delta whose single probe GP reaches RMSE <= epsilon.

    A simple random sample of min(sample_size, N) rows is split into probe
    train (M rows) and probe test. For delta = start, start + step, ... a GP
    is fitted on ceil(M^delta) probe-train rows and scored on probe test.
    The first qualifying delta is scaled to the full data as ceil(N^delta);
    when none qualifies the last grid delta is returned with target_met False."""
    probe = probe or ProbeConfig()
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    N = data.n_rows
    rng = member_rng(probe.seed, 0)
    sample = data.subset(rng.choice(N, size=min(probe.sample_size, N), replace=False))
    probe_train, probe_test = train_test_split(sample, probe.train_fraction, seed=probe.seed)
    M = probe_train.n_rows
    truth = probe_test.raw_y()

    trace = []
    grid = probe.grid()
    for index, delta in enumerate(grid):
        size = min(max(math.ceil(M ** delta), 1), M)
        rows = member_rng(probe.seed, index + 1).choice(M, size=size, replace=False)
        model = fit_gp(probe_train.subset(rows), template, probe.optimizer)
        rmse = _rmse(model.predict(probe_test.raw_X()).mean, truth)
        trace.append(ProbeStep(delta=delta, subset_size=size, rmse=rmse))
        logger.info("Probe delta=%.2f (%s rows): RMSE %.6g against target %.6g", delta, size, rmse, epsilon)
        if rmse <= epsilon:
            Ns = min(max(math.ceil(N ** delta), 1), N)
            return SizingPlan(N=N, method=METHOD_INFERENCE, Ns=Ns, delta=delta, epsilon=epsilon, trace=trace)

    delta = grid[-1]
    logger.warning("No probe delta reached RMSE %.6g; using delta=%.2f", epsilon, delta)
    Ns = min(max(math.ceil(N ** delta), 1), N)
    return SizingPlan(
        N=N, method=METHOD_INFERENCE, Ns=Ns, delta=delta, epsilon=epsilon, target_met=False, trace=trace
    )
