#
# Copyright Elasticsearch B.V. and/or licensed to Elasticsearch B.V. under one
# or more contributor license agreements. Licensed under the Elastic License 2.0;
# you may not use this file except in compliance with the Elastic License 2.0.
#
"""kernel_grammar module reads and writes kernel compositions as infix strings.

Examples of valid strings:

    rbf
    rbf + linear + white
    periodicmatern32 + linear + rbf + (linear * rbf)[cols=7]
    rbf[cols=0,2;fixed=variance;lengthscale=0.5,2.0]

`*` binds tighter than `+`. An option block in square brackets may follow a
kernel name or a parenthesized group; on a group only `cols` and `fixed` are
accepted and they apply to every leaf inside that does not set its own."""

import re
from dataclasses import replace

from .kernels import BASE_KERNELS, BaseKernel, BrownianMotion, Combination, LengthscaleKernel, PeriodicMatern32, Product, Sum

ALIASES = {
    "rbf": "rbf",
    "se": "rbf",
    "linear": "linear",
    "white": "white",
    "whitenoise": "white",
    "bias": "bias",
    "cosine": "cosine",
    "brownian": "brownian",
    "brownianmotion": "brownian",
    "periodicmatern32": "periodicmatern32",
}

GROUP_OPTIONS = {"cols", "fixed"}

TOKEN = re.compile(r"\s*(?:(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[+*()])|(?P<options>\[[^\]]*\]))")


class KernelGrammarError(ValueError):
    """Exception raised when a kernel-spec string cannot be parsed.

    Attributes:
        text -- the string being parsed
        position -- character offset of the problem
    """

    def __init__(self, message, text="", position=0):
        super().__init__(f"{message} (at position {position} of {text!r})")
        self.text = text
        self.position = position


def _tokenize(text):
    tokens = []
    position = 0
    stripped_end = len(text.rstrip())
    while position < stripped_end:
        match = TOKEN.match(text, position)
        if not match:
            raise KernelGrammarError("Unexpected character", text, position)
        kind = match.lastgroup
        tokens.append((kind, match.group(kind), match.start(kind)))
        position = match.end()
    return tokens


def _parse_options(raw, text, position):
    options = {}
    body = raw[1:-1].strip()
    if not body:
        return options
    for item in body.split(";"):
        if "=" not in item:
            raise KernelGrammarError(f"Option {item.strip()!r} is not key=value", text, position)
        key, value = (part.strip() for part in item.split("=", 1))
        key = key.lower()
        try:
            if key == "cols":
                options["active_dims"] = tuple(int(col) for col in re.split(r"[,\s]+", value) if col)
            elif key == "fixed":
                options["fixed"] = frozenset(name.strip() for name in value.split(",") if name.strip())
            elif key in ("lengthscale", "lengthscales"):
                options["lengthscales"] = tuple(float(v) for v in value.split(",") if v.strip())
            elif key in ("variance", "period", "origin"):
                options[key] = float(value)
            else:
                raise KernelGrammarError(f"Unknown option {key!r}", text, position)
        except ValueError as exception:
            if isinstance(exception, KernelGrammarError):
                raise
            raise KernelGrammarError(f"Invalid value for option {key!r}: {value!r}", text, position)
    return options


class _Parser:
    def __init__(self, text):
        self.text = text
        self.tokens = _tokenize(text)
        self.index = 0

    def peek(self):
        if self.index < len(self.tokens):
            return self.tokens[self.index]
        return (None, None, len(self.text))

    def take(self):
        token = self.peek()
        self.index += 1
        return token

    def parse(self):
        if not self.tokens:
            raise KernelGrammarError("Empty kernel specification", self.text, 0)
        kernel = self.expression()
        kind, value, position = self.peek()
        if kind is not None:
            raise KernelGrammarError(f"Unexpected {value!r}", self.text, position)
        return kernel

    def expression(self):
        terms = [self.term()]
        while self.peek()[1] == "+":
            self.take()
            terms.append(self.term())
        if len(terms) == 1:
            return terms[0]
        result = terms[0]
        for term in terms[1:]:
            result = result + term
        return result

    def term(self):
        factors = [self.factor()]
        while self.peek()[1] == "*":
            self.take()
            factors.append(self.factor())
        if len(factors) == 1:
            return factors[0]
        result = factors[0]
        for factor in factors[1:]:
            result = result * factor
        return result

    def factor(self):
        kind, value, position = self.take()
        if kind == "name":
            kernel = self._leaf(value, position)
        elif value == "(":
            kernel = self.expression()
            closing = self.take()
            if closing[1] != ")":
                raise KernelGrammarError("Missing closing parenthesis", self.text, closing[2])
            kernel = _Group(kernel)
        else:
            raise KernelGrammarError(f"Expected a kernel name, got {value!r}", self.text, position)
        if self.peek()[0] == "options":
            _, raw, options_position = self.take()
            options = _parse_options(raw, self.text, options_position)
            kernel = self._apply(kernel, options, options_position)
        if isinstance(kernel, _Group):
            kernel = kernel.kernel
        return kernel

    def _leaf(self, name, position):
        kind = ALIASES.get(name.lower())
        if kind is None:
            raise KernelGrammarError(f"Unknown kernel {name!r}", self.text, position)
        return BASE_KERNELS[kind]()

    def _apply(self, kernel, options, position):
        if isinstance(kernel, _Group):
            unsupported = set(options) - {"active_dims", "fixed"}
            if unsupported:
                raise KernelGrammarError(
                    f"Only {sorted(GROUP_OPTIONS)} may follow a group, got {sorted(unsupported)}",
                    self.text,
                    position,
                )

            def apply_to_leaf(leaf):
                updates = {}
                if "active_dims" in options and leaf.active_dims is None:
                    updates["active_dims"] = options["active_dims"]
                if "fixed" in options:
                    updates["fixed"] = leaf.fixed | (options["fixed"] & set(leaf.hyperparameters))
                return replace(leaf, **updates)

            return _Group(kernel.kernel.map_leaves(apply_to_leaf))
        if "lengthscales" in options and not isinstance(kernel, LengthscaleKernel):
            raise KernelGrammarError(f"{kernel.kind} has no lengthscale", self.text, position)
        if "period" in options and not isinstance(kernel, PeriodicMatern32):
            raise KernelGrammarError(f"{kernel.kind} has no period", self.text, position)
        if "origin" in options and not isinstance(kernel, BrownianMotion):
            raise KernelGrammarError(f"{kernel.kind} has no origin", self.text, position)
        try:
            return replace(kernel, **options)
        except ValueError as exception:
            raise KernelGrammarError(str(exception), self.text, position)


class _Group:
    """Marks a parenthesized sub-expression while its option block is read."""

    def __init__(self, kernel):
        self.kernel = kernel


def parse_kernel(text):
    """Parses a kernel-spec string into a kernel tree."""
    return _Parser(text).parse()


def _format_number(value):
    return repr(float(value))


def _format_leaf(leaf: BaseKernel, include_values):
    options = []
    if leaf.active_dims is not None:
        options.append("cols=" + ",".join(str(dim) for dim in leaf.active_dims))
    if leaf.fixed:
        options.append("fixed=" + ",".join(sorted(leaf.fixed)))
    if isinstance(leaf, BrownianMotion) and leaf.origin is not None:
        options.append(f"origin={_format_number(leaf.origin)}")
    if include_values:
        options.append(f"variance={_format_number(leaf.variance)}")
        if isinstance(leaf, LengthscaleKernel):
            options.append("lengthscale=" + ",".join(_format_number(v) for v in leaf.lengthscales))
        if isinstance(leaf, PeriodicMatern32):
            options.append(f"period={_format_number(leaf.period)}")
    if options:
        return f"{leaf.kind}[{';'.join(options)}]"
    return leaf.kind


def format_kernel(kernel, include_values=False):
    """Writes a kernel tree as a string that parse_kernel reads back."""
    if isinstance(kernel, BaseKernel):
        return _format_leaf(kernel, include_values)
    if isinstance(kernel, Combination):
        parts = []
        for child in kernel.children:
            text = format_kernel(child, include_values)
            if isinstance(kernel, Product) and isinstance(child, Sum):
                text = f"({text})"
            parts.append(text)
        return f" {kernel.symbol} ".join(parts)
    raise TypeError(f"Cannot format {type(kernel).__name__}")
