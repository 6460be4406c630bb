"""Expression trees and strict binary64 evaluation.

Every node is evaluated exactly as written: one IEEE-754 round-to-nearest
operation per binary node, integer powers expanded into left-folded
multiplications, and no simplification of any kind.  Two algebraically
identical trees of different shape are therefore allowed (and expected) to
produce different results, which is the whole point of comparing a model with
its rewritten extension.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Union


class EvaluationError(ArithmeticError):
    """Raised on division by an exact zero."""

    def __init__(self, message: str, node: "Expression | None" = None):
        super().__init__(message)
        self.node = node


class DivergenceError(ArithmeticError):
    """Raised when a value becomes infinite or NaN."""

    def __init__(self, message: str, step_index: int | None = None,
                 node: "Expression | None" = None):
        super().__init__(message)
        self.step_index = step_index
        self.node = node


@dataclass(frozen=True)
class Constant:
    value: float

    def __post_init__(self):
        object.__setattr__(self, "value", float(self.value))
        if not math.isfinite(self.value):
            raise ValueError("constants must be finite")


@dataclass(frozen=True)
class LaggedOutput:
    """X_{n-lag}; ``lag=0`` is the newest output sample."""
    lag: int

    def __post_init__(self):
        if self.lag < 0:
            raise ValueError("lag must be nonnegative")


@dataclass(frozen=True)
class LaggedInput:
    """U_{n-lag}; ``lag=0`` is the input at the current step."""
    lag: int

    def __post_init__(self):
        if self.lag < 0:
            raise ValueError("lag must be nonnegative")


UNARY_FUNCTIONS = {"sin": math.sin, "cos": math.cos}


@dataclass(frozen=True)
class UnaryCall:
    function: str
    argument: "Expression"

    def __post_init__(self):
        if self.function not in UNARY_FUNCTIONS:
            raise ValueError(f"unknown function {self.function!r}")


@dataclass(frozen=True)
class Neg:
    """Sign flip.  Exact in binary64, so it never adds a rounding."""
    operand: "Expression"


BINARY_OPERATORS = ("+", "-", "*", "/")


@dataclass(frozen=True)
class BinaryOp:
    op: str
    left: "Expression"
    right: "Expression"

    def __post_init__(self):
        if self.op not in BINARY_OPERATORS:
            raise ValueError(f"unknown operator {self.op!r}")


@dataclass(frozen=True)
class Pow:
    """``base ^ exponent`` for a positive integer exponent."""
    base: "Expression"
    exponent: int

    def __post_init__(self):
        if isinstance(self.exponent, bool) or not isinstance(self.exponent, int):
            raise TypeError("exponent must be an int")
        if self.exponent < 1:
            raise ValueError("exponent must be >= 1")


Expression = Union[Constant, LaggedOutput, LaggedInput, UnaryCall, Neg,
                   BinaryOp, Pow]


@dataclass(frozen=True)
class EvaluationContext:
    """Sample histories visible to one evaluation.

    ``outputs`` and ``inputs`` are ordered oldest to newest, so lag ``p``
    resolves to ``outputs[-1 - p]``.
    """
    outputs: tuple[float, ...]
    inputs: tuple[float, ...] = ()
    step_index: int = 0

    def output(self, lag: int) -> float:
        if lag >= len(self.outputs):
            raise IndexError(f"x[{lag}] not available (history holds "
                             f"{len(self.outputs)} samples)")
        return self.outputs[-1 - lag]

    def input(self, lag: int) -> float:
        if lag >= len(self.inputs):
            raise IndexError(f"u[{lag}] not available (history holds "
                             f"{len(self.inputs)} samples)")
        return self.inputs[-1 - lag]


@dataclass(frozen=True)
class ModelDefinition:
    name: str
    max_output_lag: int
    initial_conditions: tuple[float, ...]
    update: Expression
    max_input_lag: int = 0
    requires_input: bool = False
    description: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "initial_conditions",
                           tuple(float(v) for v in self.initial_conditions))
        if self.max_output_lag < 0 or self.max_input_lag < 0:
            raise ValueError("lags must be nonnegative")
        if len(self.initial_conditions) != self.max_output_lag + 1:
            raise ValueError(
                f"model {self.name!r}: expected {self.max_output_lag + 1} "
                f"initial conditions, got {len(self.initial_conditions)}")
        out_lag, in_lag = max_lags(self.update)
        if out_lag > self.max_output_lag:
            raise ValueError(f"model {self.name!r}: x[{out_lag}] exceeds "
                             f"declared lags {self.max_output_lag}")
        if uses_input(self.update):
            if not self.requires_input:
                raise ValueError(f"model {self.name!r} references u[] but "
                                 "declares no input")
            if in_lag > self.max_input_lag:
                raise ValueError(f"model {self.name!r}: u[{in_lag}] exceeds "
                                 f"declared input lag {self.max_input_lag}")


def _check(value: float, ctx: EvaluationContext, node) -> float:
    if not math.isfinite(value):
        raise DivergenceError(
            f"non-finite value {value!r} at step {ctx.step_index}",
            step_index=ctx.step_index, node=node)
    return value


def evaluate(expr: Expression, ctx: EvaluationContext) -> float:
    """Evaluate ``expr`` post-order, one rounding per operation."""
    if isinstance(expr, BinaryOp):
        a = evaluate(expr.left, ctx)
        b = evaluate(expr.right, ctx)
        op = expr.op
        if op == "+":
            r = a + b
        elif op == "-":
            r = a - b
        elif op == "*":
            r = a * b
        else:
            if b == 0.0:
                raise EvaluationError(
                    f"division by zero at step {ctx.step_index}", node=expr)
            r = a / b
        return _check(r, ctx, expr)
    if isinstance(expr, LaggedOutput):
        return ctx.output(expr.lag)
    if isinstance(expr, Constant):
        return expr.value
    if isinstance(expr, LaggedInput):
        return ctx.input(expr.lag)
    if isinstance(expr, Pow):
        base = evaluate(expr.base, ctx)
        r = base
        for _ in range(expr.exponent - 1):
            r = _check(r * base, ctx, expr)
        return r
    if isinstance(expr, Neg):
        return -evaluate(expr.operand, ctx)
    if isinstance(expr, UnaryCall):
        arg = evaluate(expr.argument, ctx)
        return _check(UNARY_FUNCTIONS[expr.function](arg), ctx, expr)
    raise TypeError(f"not an expression node: {expr!r}")


def children(expr: Expression) -> tuple:
    if isinstance(expr, BinaryOp):
        return (expr.left, expr.right)
    if isinstance(expr, Pow):
        return (expr.base,)
    if isinstance(expr, Neg):
        return (expr.operand,)
    if isinstance(expr, UnaryCall):
        return (expr.argument,)
    return ()


def walk(expr: Expression):
    """Yield every node, pre-order."""
    stack = [expr]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(children(node)))


def max_lags(expr: Expression) -> tuple[int, int]:
    """Return ``(output_lag, input_lag)``, the deepest lags referenced."""
    out_lag = in_lag = 0
    for node in walk(expr):
        if isinstance(node, LaggedOutput):
            out_lag = max(out_lag, node.lag)
        elif isinstance(node, LaggedInput):
            in_lag = max(in_lag, node.lag)
    return out_lag, in_lag


def uses_input(expr: Expression) -> bool:
    return any(isinstance(node, LaggedInput) for node in walk(expr))


def constants(expr: Expression) -> list[float]:
    """Constant values in left-to-right order."""
    return [node.value for node in walk(expr) if isinstance(node, Constant)]


def structurally_equal(a: Expression, b: Expression) -> bool:
    """Node-for-node equality, including tree shape.

    Constants compare bitwise, so ``0.0`` and ``-0.0`` differ.
    """
    if type(a) is not type(b):
        return False
    if isinstance(a, Constant):
        return a.value.hex() == b.value.hex()
    if isinstance(a, (LaggedOutput, LaggedInput)):
        return a.lag == b.lag
    if isinstance(a, BinaryOp):
        return (a.op == b.op and structurally_equal(a.left, b.left)
                and structurally_equal(a.right, b.right))
    if isinstance(a, Pow):
        return a.exponent == b.exponent and structurally_equal(a.base, b.base)
    if isinstance(a, Neg):
        return structurally_equal(a.operand, b.operand)
    if isinstance(a, UnaryCall):
        return (a.function == b.function
                and structurally_equal(a.argument, b.argument))
    raise TypeError(f"not an expression node: {a!r}")


# Small constructors, handy when building trees by hand.

def const(value: float) -> Constant:
    return Constant(value)


def x(lag: int = 0) -> LaggedOutput:
    return LaggedOutput(lag)


def u(lag: int = 0) -> LaggedInput:
    return LaggedInput(lag)


def add(a, b) -> BinaryOp:
    return BinaryOp("+", a, b)


def sub(a, b) -> BinaryOp:
    return BinaryOp("-", a, b)


def mul(a, b) -> BinaryOp:
    return BinaryOp("*", a, b)


def div(a, b) -> BinaryOp:
    return BinaryOp("/", a, b)


def power(a, k: int) -> Pow:
    return Pow(a, k)


def context(outputs: Sequence[float], inputs: Sequence[float] = (),
            step_index: int = 0) -> EvaluationContext:
    """Build a context from newest-first lists: ``outputs[p]`` is x[p]."""
    return EvaluationContext(tuple(reversed([float(v) for v in outputs])),
                             tuple(reversed([float(v) for v in inputs])),
                             step_index)
