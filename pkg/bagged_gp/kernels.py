#
# Copyright Elasticsearch B.V. and/or licensed to Elasticsearch B.V. under one
# or more contributor license agreements. Licensed under the Elastic License 2.0;
# you may not use this file except in compliance with the Elastic License 2.0.
#
"""Kernels module contains the covariance functions and their composition algebra.

A kernel is a tree: leaves are parameterized base kernels (RBF, Linear,
WhiteNoise, Bias, Cosine, BrownianMotion, PeriodicMatern32) and inner nodes
are sums or products of two or more children. Kernels are immutable; every
hyperparameter update produces a new tree.

Hyperparameters are stored as positive values and exposed to optimizers as
natural logarithms. Gram matrices are built from per-dimension differences so
that K(X, X) is symmetric entry by entry, without symmetrizing afterwards."""

import math
from dataclasses import dataclass, field, replace
from typing import Callable, ClassVar, FrozenSet, Iterator, List, Optional, Sequence, Tuple

import numpy as np

SQRT3 = math.sqrt(3.0)


class KernelDimensionError(ValueError):
    """Exception raised when inputs do not match the dimensions of a kernel.

    Attributes:
        expected -- the number of columns the kernel expects
        actual -- the number of columns received
    """

    def __init__(self, message, expected=None, actual=None):
        super().__init__(message)
        self.expected = expected
        self.actual = actual


@dataclass(frozen=True)
class Parameter:
    """One hyperparameter of a kernel tree, identified by its path."""

    name: str
    value: float
    free: bool


def as_inputs(X):
    """Coerce X to a 2-D float matrix; a 1-D array is a single column."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2:
        raise KernelDimensionError(f"Expected a 2-D input matrix, got {X.ndim} dimensions")
    return X


def _differences(X1, X2):
    """Per-dimension differences x1 - x2 with shape (d, n, m)."""
    return X1.T[:, :, None] - X2.T[:, None, :]


class Kernel:
    """Base interface for every node of a kernel composition tree."""

    def gram(self, X, X2=None):
        """Returns K(X, X) when X2 is absent, else K(X, X2)."""
        X = as_inputs(X)
        if X2 is None:
            return self._evaluate(X, X)
        X2 = as_inputs(X2)
        if X2.shape[1] != X.shape[1]:
            raise KernelDimensionError(
                f"Inputs have {X.shape[1]} and {X2.shape[1]} columns",
                expected=X.shape[1],
                actual=X2.shape[1],
            )
        return self._evaluate(X, X2)

    def diag(self, X):
        """Returns k(x, x) for every row of X."""
        return self._evaluate_diag(as_inputs(X))

    def gram_gradients(self, X):
        """Returns (parameter name, dK/dlog(parameter)) for every free parameter."""
        X = as_inputs(X)
        gradients = self._evaluate_gradients(X)
        return [
            (parameter.name, gradient)
            for parameter, gradient in zip(self.parameters(), gradients)
            if parameter.free
        ]

    def parameters(self):
        """Lists all hyperparameters in depth-first leaf order."""
        parameters = []
        for index, leaf in enumerate(self.leaves()):
            for name, value, free in leaf._local_parameters():
                parameters.append(Parameter(f"{index}.{leaf.kind}.{name}", value, free))
        return parameters

    def log_params(self):
        """Returns the natural logarithm of every hyperparameter."""
        return np.log(np.array([parameter.value for parameter in self.parameters()], dtype=float))

    def free_mask(self):
        return np.array([parameter.free for parameter in self.parameters()], dtype=bool)

    def free_log_params(self):
        return self.log_params()[self.free_mask()]

    def free_parameter_names(self):
        return [parameter.name for parameter in self.parameters() if parameter.free]

    def with_free_log_params(self, theta):
        """Returns a copy with the free hyperparameters replaced by exp(theta)."""
        values = self.log_params()
        mask = self.free_mask()
        theta = np.asarray(theta, dtype=float)
        if theta.shape != (int(mask.sum()),):
            raise ValueError(f"Expected {int(mask.sum())} free log-parameters, got {theta.shape}")
        values[mask] = theta
        return self.with_log_params(values)

    def with_log_params(self, theta):
        """Returns a copy with every hyperparameter replaced by exp(theta)."""
        theta = np.asarray(theta, dtype=float)
        if theta.shape != (self.n_params,):
            raise ValueError(f"Expected {self.n_params} log-parameters, got {theta.shape}")
        return self._rebuild(theta)

    @property
    def n_params(self):
        return sum(leaf._local_count() for leaf in self.leaves())

    def leaves(self) -> Iterator["BaseKernel"]:
        raise NotImplementedError

    def map_leaves(self, func: Callable[["BaseKernel"], "BaseKernel"]) -> "Kernel":
        raise NotImplementedError

    def _evaluate(self, X1, X2):
        raise NotImplementedError

    def _evaluate_diag(self, X):
        raise NotImplementedError

    def _evaluate_gradients(self, X):
        raise NotImplementedError

    def _rebuild(self, theta):
        raise NotImplementedError

    def __add__(self, other):
        return Sum(_flatten(Sum, self) + _flatten(Sum, other))

    def __mul__(self, other):
        return Product(_flatten(Product, self) + _flatten(Product, other))


def _flatten(node_type, kernel):
    if type(kernel) is node_type:
        return tuple(kernel.children)
    return (kernel,)


@dataclass(frozen=True)
class BaseKernel(Kernel):
    """A leaf kernel with a signal variance and optional active columns.

    `fixed` names the hyperparameter fields ("variance", "lengthscales",
    "period") that optimizers must leave untouched."""

    variance: float = 1.0
    active_dims: Optional[Tuple[int, ...]] = None
    fixed: FrozenSet[str] = frozenset()

    kind: ClassVar[str] = ""
    hyperparameters: ClassVar[Tuple[str, ...]] = ("variance",)

    def __post_init__(self):
        object.__setattr__(self, "variance", float(self.variance))
        if not self.variance > 0:
            raise ValueError(f"{self.kind} variance must be positive, got {self.variance}")
        if self.active_dims is not None:
            dims = tuple(int(dim) for dim in self.active_dims)
            if not dims or min(dims) < 0:
                raise ValueError(f"Invalid active dimensions {self.active_dims}")
            object.__setattr__(self, "active_dims", dims)
        fixed = frozenset(self.fixed)
        unknown = fixed - set(self.hyperparameters)
        if unknown:
            raise ValueError(f"{self.kind} has no hyperparameters named {sorted(unknown)}")
        object.__setattr__(self, "fixed", fixed)

    def leaves(self):
        yield self

    def map_leaves(self, func):
        return func(self)

    def input_columns(self, n_columns):
        """Column indices of an n_columns-wide input this leaf reads."""
        if self.active_dims is None:
            return list(range(n_columns))
        return list(self.active_dims)

    def _slice(self, X):
        if self.active_dims is not None:
            if max(self.active_dims) >= X.shape[1]:
                raise KernelDimensionError(
                    f"{self.kind} reads column {max(self.active_dims)} of an input with {X.shape[1]} columns",
                    expected=max(self.active_dims) + 1,
                    actual=X.shape[1],
                )
            X = X[:, list(self.active_dims)]
        self._check_width(X.shape[1])
        return X

    def _check_width(self, width):
        pass

    def _local_parameters(self):
        parameters = []
        for name in self.hyperparameters:
            value = getattr(self, name)
            free = name not in self.fixed
            if isinstance(value, tuple):
                parameters.extend((f"{name}[{index}]", item, free) for index, item in enumerate(value))
            else:
                parameters.append((name, value, free))
        return parameters

    def _local_count(self):
        return len(self._local_parameters())

    def _rebuild(self, theta):
        values = {}
        position = 0
        for name in self.hyperparameters:
            current = getattr(self, name)
            if isinstance(current, tuple):
                values[name] = tuple(float(v) for v in np.exp(theta[position:position + len(current)]))
                position += len(current)
            else:
                values[name] = float(np.exp(theta[position]))
                position += 1
        return replace(self, **values)

    def _evaluate(self, X1, X2):
        return self._gram(self._slice(X1), self._slice(X2))

    def _evaluate_diag(self, X):
        return self._diag(self._slice(X))

    def _evaluate_gradients(self, X):
        return self._gradients(self._slice(X))

    def _gram(self, X1, X2):
        raise NotImplementedError

    def _diag(self, X):
        raise NotImplementedError

    def _gradients(self, X):
        raise NotImplementedError


@dataclass(frozen=True)
class LengthscaleKernel(BaseKernel):
    """A leaf with one shared lengthscale or one lengthscale per active column (ARD)."""

    lengthscales: Tuple[float, ...] = (1.0,)

    hyperparameters: ClassVar[Tuple[str, ...]] = ("variance", "lengthscales")

    def __post_init__(self):
        super().__post_init__()
        lengthscales = tuple(float(value) for value in np.atleast_1d(self.lengthscales))
        if not lengthscales or min(lengthscales) <= 0:
            raise ValueError(f"{self.kind} lengthscales must be positive, got {self.lengthscales}")
        object.__setattr__(self, "lengthscales", lengthscales)

    @property
    def is_ard(self):
        return len(self.lengthscales) > 1

    def _check_width(self, width):
        if len(self.lengthscales) not in (1, width):
            raise KernelDimensionError(
                f"{self.kind} has {len(self.lengthscales)} lengthscales for {width} columns",
                expected=len(self.lengthscales),
                actual=width,
            )

    def _lengthscale_column(self):
        return np.asarray(self.lengthscales)[:, None, None]

    def _per_lengthscale(self, terms):
        """Collapses per-dimension gradient terms when the lengthscale is shared."""
        if self.is_ard:
            return list(terms)
        return [terms.sum(axis=0)]


@dataclass(frozen=True)
class RBF(LengthscaleKernel):
    """k = variance * exp(-sum_j d_j^2 / (2 l_j^2))"""

    kind: ClassVar[str] = "rbf"

    def _scaled_squares(self, X1, X2):
        return (_differences(X1, X2) / self._lengthscale_column()) ** 2

    def _gram(self, X1, X2):
        return self.variance * np.exp(-0.5 * self._scaled_squares(X1, X2).sum(axis=0))

    def _diag(self, X):
        return np.full(X.shape[0], self.variance)

    def _gradients(self, X):
        squares = self._scaled_squares(X, X)
        K = self.variance * np.exp(-0.5 * squares.sum(axis=0))
        return [K] + self._per_lengthscale(K * squares)


@dataclass(frozen=True)
class Linear(BaseKernel):
    """k = variance * x1.x2"""

    kind: ClassVar[str] = "linear"

    def _gram(self, X1, X2):
        return self.variance * (X1.T[:, :, None] * X2.T[:, None, :]).sum(axis=0)

    def _diag(self, X):
        return self.variance * (X ** 2).sum(axis=1)

    def _gradients(self, X):
        return [self._gram(X, X)]


@dataclass(frozen=True)
class Bias(BaseKernel):
    """k = variance"""

    kind: ClassVar[str] = "bias"

    def _gram(self, X1, X2):
        return np.full((X1.shape[0], X2.shape[0]), self.variance)

    def _diag(self, X):
        return np.full(X.shape[0], self.variance)

    def _gradients(self, X):
        return [self._gram(X, X)]


@dataclass(frozen=True)
class WhiteNoise(BaseKernel):
    """k = variance when the two input rows are identical, else 0.

    Identity is exact coordinate equality, so duplicated rows of a bootstrap
    subset are fully correlated."""

    kind: ClassVar[str] = "white"

    def _gram(self, X1, X2):
        same = np.all(X1[:, None, :] == X2[None, :, :], axis=2)
        return self.variance * same.astype(float)

    def _diag(self, X):
        return np.full(X.shape[0], self.variance)

    def _gradients(self, X):
        return [self._gram(X, X)]


@dataclass(frozen=True)
class Cosine(LengthscaleKernel):
    """k = variance * cos(sum_j (x1_j - x2_j) / l_j)"""

    kind: ClassVar[str] = "cosine"

    def _phase(self, X1, X2):
        scaled = _differences(X1, X2) / self._lengthscale_column()
        return scaled, scaled.sum(axis=0)

    def _gram(self, X1, X2):
        _, phase = self._phase(X1, X2)
        return self.variance * np.cos(np.abs(phase))

    def _diag(self, X):
        return np.full(X.shape[0], self.variance)

    def _gradients(self, X):
        scaled, phase = self._phase(X, X)
        K = self.variance * np.cos(np.abs(phase))
        # sin(|s|) * sign(s) keeps the (i, j) and (j, i) entries bitwise equal
        slope = self.variance * np.sin(np.abs(phase)) * np.sign(phase)
        return [K] + self._per_lengthscale(slope * scaled)


@dataclass(frozen=True)
class BrownianMotion(BaseKernel):
    """k = variance * min(t1, t2) with t = max(x - origin, 0), one column only."""

    origin: Optional[float] = None

    kind: ClassVar[str] = "brownian"

    def _check_width(self, width):
        if width != 1:
            raise KernelDimensionError(
                f"brownian is defined on one column, got {width}", expected=1, actual=width
            )

    def _times(self, X):
        origin = 0.0 if self.origin is None else self.origin
        return np.maximum(X[:, 0] - origin, 0.0)

    def _gram(self, X1, X2):
        return self.variance * np.minimum(self._times(X1)[:, None], self._times(X2)[None, :])

    def _diag(self, X):
        return self.variance * self._times(X)

    def _gradients(self, X):
        return [self._gram(X, X)]


@dataclass(frozen=True)
class PeriodicMatern32(LengthscaleKernel):
    """k = variance * (1 + sqrt(3) u) exp(-sqrt(3) u), u^2 = sum_j (sin(pi |d_j| / p) / l_j)^2"""

    period: float = 1.0

    kind: ClassVar[str] = "periodicmatern32"
    hyperparameters: ClassVar[Tuple[str, ...]] = ("variance", "lengthscales", "period")

    def __post_init__(self):
        super().__post_init__()
        object.__setattr__(self, "period", float(self.period))
        if not self.period > 0:
            raise ValueError(f"{self.kind} period must be positive, got {self.period}")

    def _terms(self, X1, X2):
        angle = np.pi * np.abs(_differences(X1, X2)) / self.period
        sines = np.sin(angle)
        scaled = sines / self._lengthscale_column()
        u = np.sqrt((scaled ** 2).sum(axis=0))
        return angle, sines, scaled, u

    def _gram(self, X1, X2):
        _, _, _, u = self._terms(X1, X2)
        a = SQRT3 * u
        return self.variance * (1.0 + a) * np.exp(-a)

    def _diag(self, X):
        return np.full(X.shape[0], self.variance)

    def _gradients(self, X):
        angle, sines, scaled, u = self._terms(X, X)
        a = SQRT3 * u
        decay = np.exp(-a)
        K = self.variance * (1.0 + a) * decay
        lengthscale_terms = 3.0 * self.variance * decay * scaled ** 2
        period_term = 3.0 * self.variance * decay * (
            sines * np.cos(angle) * angle / self._lengthscale_column() ** 2
        ).sum(axis=0)
        return [K] + self._per_lengthscale(lengthscale_terms) + [period_term]


@dataclass(frozen=True)
class Combination(Kernel):
    """An inner node of the composition tree with two or more children."""

    children: Tuple[Kernel, ...] = field(default_factory=tuple)

    symbol: ClassVar[str] = ""

    def __post_init__(self):
        children = tuple(self.children)
        if len(children) < 2:
            raise ValueError(f"A {type(self).__name__.lower()} kernel needs at least two children")
        object.__setattr__(self, "children", children)

    def leaves(self):
        for child in self.children:
            yield from child.leaves()

    def map_leaves(self, func):
        return replace(self, children=tuple(child.map_leaves(func) for child in self.children))

    def _rebuild(self, theta):
        children = []
        position = 0
        for child in self.children:
            count = child.n_params
            children.append(child._rebuild(theta[position:position + count]))
            position += count
        return replace(self, children=tuple(children))


@dataclass(frozen=True)
class Sum(Combination):
    """k = sum of the children"""

    symbol: ClassVar[str] = "+"

    def _evaluate(self, X1, X2):
        return sum(child._evaluate(X1, X2) for child in self.children)

    def _evaluate_diag(self, X):
        return sum(child._evaluate_diag(X) for child in self.children)

    def _evaluate_gradients(self, X):
        gradients = []
        for child in self.children:
            gradients.extend(child._evaluate_gradients(X))
        return gradients


@dataclass(frozen=True)
class Product(Combination):
    """k = product of the children"""

    symbol: ClassVar[str] = "*"

    def _evaluate(self, X1, X2):
        result = self.children[0]._evaluate(X1, X2)
        for child in self.children[1:]:
            result = result * child._evaluate(X1, X2)
        return result

    def _evaluate_diag(self, X):
        result = self.children[0]._evaluate_diag(X)
        for child in self.children[1:]:
            result = result * child._evaluate_diag(X)
        return result

    def _evaluate_gradients(self, X):
        grams = [child._evaluate(X, X) for child in self.children]
        gradients = []
        for index, child in enumerate(self.children):
            others = np.ones_like(grams[0])
            for other_index, gram in enumerate(grams):
                if other_index != index:
                    others = others * gram
            gradients.extend(gradient * others for gradient in child._evaluate_gradients(X))
        return gradients


BASE_KERNELS = {
    kernel.kind: kernel
    for kernel in (RBF, Linear, WhiteNoise, Bias, Cosine, BrownianMotion, PeriodicMatern32)
}


def eval_kernel(spec: Kernel, x1, x2) -> float:
    """Returns the covariance k(x1, x2) of two feature vectors."""
    x1 = np.atleast_1d(np.asarray(x1, dtype=float))
    x2 = np.atleast_1d(np.asarray(x2, dtype=float))
    if x1.ndim != 1 or x1.shape != x2.shape:
        raise KernelDimensionError(
            f"Feature vectors have shapes {x1.shape} and {x2.shape}",
            expected=x1.shape[-1],
            actual=x2.shape[-1],
        )
    return float(spec.gram(x1[None, :], x2[None, :])[0, 0])


def gram(spec: Kernel, X, X2=None):
    return spec.gram(X, X2)


def gram_gradients(spec: Kernel, X) -> List[Tuple[str, np.ndarray]]:
    return spec.gram_gradients(X)


def mixture_gram(specs: Sequence[Kernel], X, X2=None):
    """Gram matrix of the uniform mixture (1/K) sum_i k_i, itself a valid kernel."""
    if not specs:
        raise ValueError("A kernel mixture needs at least one kernel")
    return sum(spec.gram(X, X2) for spec in specs) / len(specs)
