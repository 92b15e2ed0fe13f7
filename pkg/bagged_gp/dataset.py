#
# Copyright Elasticsearch B.V. and/or licensed to Elasticsearch B.V. under one
# or more contributor license agreements. Licensed under the Elastic License 2.0;
# you may not use this file except in compliance with the Elastic License 2.0.
#
"""Dataset module holds feature matrices, responses and their standardization.

It also reads and writes delimited files, generates the synthetic sinc
benchmark and performs the seeded train/test split."""

import csv
import logging
import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence, Tuple

import numpy as np

logger = logging.getLogger(__name__)

SINC_RANGE = (-15.0, 15.0)


class DatasetError(ValueError):
    """Exception raised when a dataset cannot be built or read.

    Attributes:
        path -- the file being read, if any
    """

    def __init__(self, message, path=None):
        super().__init__(message if path is None else f"{message} ({path})")
        self.path = path


@dataclass(frozen=True, eq=False)
class Standardization:
    """Per-column affine maps between raw and standardized units."""

    feature_mean: np.ndarray
    feature_scale: np.ndarray
    response_mean: float
    response_scale: float

    @classmethod
    def fit(cls, X, y):
        """Computes column means and population standard deviations.

        Constant columns (and a constant response) keep a scale of 1."""
        feature_scale = np.where(np.ptp(X, axis=0) > 0, X.std(axis=0), 1.0)
        response_scale = float(y.std()) if np.ptp(y) > 0 else 0.0
        return cls(
            feature_mean=X.mean(axis=0),
            feature_scale=feature_scale,
            response_mean=float(y.mean()),
            response_scale=response_scale if response_scale > 0 else 1.0,
        )

    def transform_features(self, X):
        return (X - self.feature_mean) / self.feature_scale

    def inverse_features(self, X):
        return X * self.feature_scale + self.feature_mean

    def transform_response(self, y):
        return (y - self.response_mean) / self.response_scale

    def inverse_response(self, y):
        return y * self.response_scale + self.response_mean

    def inverse_variance(self, variance):
        return variance * self.response_scale ** 2

    def to_dict(self):
        return {
            "feature_mean": [float(v) for v in self.feature_mean],
            "feature_scale": [float(v) for v in self.feature_scale],
            "response_mean": self.response_mean,
            "response_scale": self.response_scale,
        }

    @classmethod
    def from_dict(cls, values):
        return cls(
            feature_mean=np.asarray(values["feature_mean"], dtype=float),
            feature_scale=np.asarray(values["feature_scale"], dtype=float),
            response_mean=float(values["response_mean"]),
            response_scale=float(values["response_scale"]),
        )


@dataclass(frozen=True, eq=False)
class Dataset:
    """Feature matrix X (n x d) and response y (n), in the units recorded by
    `standardization` (raw units when it is None)."""

    X: np.ndarray
    y: np.ndarray
    standardization: Optional[Standardization] = None
    feature_names: Tuple[str, ...] = ()
    target_name: str = "y"

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        if X.ndim == 1:
            X = X[:, None]
        y = np.asarray(self.y, dtype=float).ravel()
        if X.ndim != 2 or X.shape[0] != y.shape[0]:
            raise DatasetError(f"X has shape {X.shape} but y has {y.shape[0]} entries")
        if X.shape[0] < 1:
            raise DatasetError("A dataset needs at least one row")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
            raise DatasetError("Dataset contains non-finite values")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        names = tuple(self.feature_names) or tuple(f"x{index}" for index in range(X.shape[1]))
        if len(names) != X.shape[1]:
            raise DatasetError(f"{len(names)} feature names for {X.shape[1]} columns")
        object.__setattr__(self, "feature_names", names)

    @property
    def n_rows(self):
        return self.X.shape[0]

    @property
    def n_features(self):
        return self.X.shape[1]

    def __len__(self):
        return self.n_rows

    def subset(self, indices):
        """Rows at `indices` (duplicates allowed), same units and metadata."""
        indices = np.asarray(indices, dtype=int)
        return replace(self, X=self.X[indices], y=self.y[indices])

    def standardized(self):
        """Standardizes a raw dataset with statistics computed from itself."""
        if self.standardization is not None:
            return self
        return self.with_standardization(Standardization.fit(self.X, self.y))

    def with_standardization(self, standardization):
        """Maps a raw dataset into the units of an existing standardization."""
        if self.standardization is not None:
            raise DatasetError("Dataset is already standardized")
        return replace(
            self,
            X=standardization.transform_features(self.X),
            y=standardization.transform_response(self.y),
            standardization=standardization,
        )

    def raw_X(self):
        if self.standardization is None:
            return self.X
        return self.standardization.inverse_features(self.X)

    def raw_y(self):
        if self.standardization is None:
            return self.y
        return self.standardization.inverse_response(self.y)

    def raw(self):
        return replace(self, X=self.raw_X(), y=self.raw_y(), standardization=None)


def _read_rows(path, delimiter):
    try:
        with open(path, newline="", encoding="utf-8") as stream:
            reader = csv.reader(stream, delimiter=delimiter)
            header = next(reader, None)
            rows = list(reader)
    except (OSError, csv.Error, UnicodeDecodeError) as exception:
        raise DatasetError(f"Could not read delimited file: {exception}", path)
    if not header:
        raise DatasetError("Delimited file has no header row", path)
    return [name.strip() for name in header], rows


def _column_indices(header, names, path):
    missing = [name for name in names if name not in header]
    if missing:
        raise DatasetError(f"Columns {missing} not found in header {header}", path)
    return [header.index(name) for name in names]


def _parse_row(row, indices):
    """Returns the floats at `indices`, or None when any is missing or non-finite."""
    try:
        values = [float(row[index]) for index in indices]
    except (IndexError, ValueError):
        return None
    if not all(math.isfinite(value) for value in values):
        return None
    return values


def read_delimited(path, target, features=None, delimiter=","):
    """Reads a raw dataset and returns it with the number of dropped rows."""
    header, rows = _read_rows(path, delimiter)
    if target not in header:
        raise DatasetError(f"Target column {target!r} not found in header {header}", path)
    if features is None:
        features = [name for name in header if name != target]
    if not features:
        raise DatasetError("No feature columns", path)
    indices = _column_indices(header, list(features) + [target], path)

    parsed = []
    dropped = 0
    for row in rows:
        if not row:
            continue
        values = _parse_row(row, indices)
        if values is None:
            dropped += 1
            continue
        parsed.append(values)
    if dropped:
        logger.warning("Dropped %s rows with missing or non-finite values from %s", dropped, path)
    if not parsed:
        raise DatasetError("No usable rows", path)

    matrix = np.asarray(parsed, dtype=float)
    dataset = Dataset(
        X=matrix[:, :-1],
        y=matrix[:, -1],
        feature_names=tuple(features),
        target_name=target,
    )
    return dataset, dropped


def load_delimited(path, target, features=None, delimiter=",", standardize=True):
    """Reads a dataset from a delimited UTF-8 file with a header row.

    Rows with missing or non-finite values are dropped with a warning."""
    dataset, _ = read_delimited(path, target, features, delimiter)
    return dataset.standardized() if standardize else dataset


def read_feature_matrix(path, features, delimiter=","):
    """Reads the named feature columns of every row; any unusable cell is an error."""
    header, rows = _read_rows(path, delimiter)
    indices = _column_indices(header, list(features), path)
    matrix = []
    for line, row in enumerate(rows, start=2):
        if not row:
            continue
        values = _parse_row(row, indices)
        if values is None:
            raise DatasetError(f"Row {line} has missing or non-finite feature values", path)
        matrix.append(values)
    if not matrix:
        raise DatasetError("No usable rows", path)
    return np.asarray(matrix, dtype=float)


def write_delimited(dataset, path, delimiter=","):
    """Writes a dataset in raw units; values keep full float precision."""
    X, y = dataset.raw_X(), dataset.raw_y()
    with open(path, "w", newline="", encoding="utf-8") as stream:
        writer = csv.writer(stream, delimiter=delimiter)
        writer.writerow(list(dataset.feature_names) + [dataset.target_name])
        for features, response in zip(X, y):
            writer.writerow([repr(float(value)) for value in features] + [repr(float(response))])


def sinc(x):
    """sin(x) / x with the removable singularity sinc(0) = 1."""
    return np.sinc(np.asarray(x, dtype=float) / np.pi)


def generate_sinc(n, x_range: Sequence[float] = SINC_RANGE, noise_sd=0.0, seed=0):
    """Samples x uniformly on x_range and returns y = sinc(x) (+ Gaussian noise)."""
    if n < 1:
        raise DatasetError(f"Cannot generate {n} rows")
    low, high = (float(bound) for bound in x_range)
    rng = np.random.default_rng(seed)
    x = rng.uniform(low, high, size=n)
    y = sinc(x)
    if noise_sd > 0:
        y = y + rng.normal(0.0, noise_sd, size=n)
    return Dataset(X=x[:, None], y=y, feature_names=("x",), target_name="y")


def train_test_split(dataset, train_fraction=0.7, seed=0):
    """Seeded uniform shuffle, then the first round(fraction * n) rows train."""
    if not 0 < train_fraction < 1:
        raise ValueError(f"Train fraction must lie in (0, 1), got {train_fraction}")
    if dataset.n_rows < 2:
        raise DatasetError("Need at least two rows to split")
    order = np.random.default_rng(seed).permutation(dataset.n_rows)
    n_train = min(max(int(round(train_fraction * dataset.n_rows)), 1), dataset.n_rows - 1)
    return dataset.subset(order[:n_train]), dataset.subset(order[n_train:])
