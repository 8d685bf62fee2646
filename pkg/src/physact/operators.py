"""Constant-coefficient linear differential operators in one dimension.

Every supported operator has the form ``c2 * d^2/dx^2 + c0``:

* identity:  c2 = 0, c0 = 1
* laplace:   c2 = 1, c0 = 0
* helmholtz: c2 = 1, c0 = nu**2

Operators can be applied to plain callables with a central second-difference
stencil, or exactly to the closed-form functions defined below.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

DEFAULT_STEP = 1e-4


class EvaluationError(ValueError):
    """A function returned a non-finite value on a stencil."""


class UnsupportedFunctionError(TypeError):
    pass


class OperatorKind(str, enum.Enum):
    IDENTITY = "identity"
    LAPLACE = "laplace"
    HELMHOLTZ = "helmholtz"


@dataclass(frozen=True)
class LinearOperator:
    kind: OperatorKind
    nu: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", OperatorKind(self.kind))
        nu = float(self.nu)
        if not math.isfinite(nu) or nu < 0:
            raise ValueError(f"wave number must be finite and non-negative, got {self.nu}")
        object.__setattr__(self, "nu", nu)

    @classmethod
    def identity(cls) -> "LinearOperator":
        return cls(OperatorKind.IDENTITY)

    @classmethod
    def laplace(cls) -> "LinearOperator":
        return cls(OperatorKind.LAPLACE)

    @classmethod
    def helmholtz(cls, nu: float) -> "LinearOperator":
        return cls(OperatorKind.HELMHOLTZ, nu)

    @property
    def coefficients(self) -> tuple[float, float]:
        """``(c0, c2)`` such that the operator is ``c2 * d2/dx2 + c0``."""
        if self.kind is OperatorKind.IDENTITY:
            return 1.0, 0.0
        if self.kind is OperatorKind.LAPLACE:
            return 0.0, 1.0
        return self.nu * self.nu, 1.0

    def to_config(self) -> dict:
        if self.kind is OperatorKind.HELMHOLTZ:
            return {"kind": self.kind.value, "nu": self.nu}
        return {"kind": self.kind.value}

    @classmethod
    def from_config(cls, cfg: dict) -> "LinearOperator":
        unknown = set(cfg) - {"kind", "nu"}
        if unknown:
            raise ValueError(f"unknown operator keys: {sorted(unknown)}")
        return cls(OperatorKind(cfg["kind"]), cfg.get("nu", 0.0))


@dataclass(frozen=True)
class FdScheme:
    step: float = DEFAULT_STEP
    order: str = "second"

    def __post_init__(self):
        if not (math.isfinite(self.step) and 0 < self.step <= 1e-1):
            raise ValueError(f"finite-difference step must lie in (0, 0.1], got {self.step}")
        if self.order != "second":
            raise ValueError(f"unsupported stencil order {self.order!r}")

    def weights(self, op: LinearOperator) -> np.ndarray:
        """Stencil weights of ``op`` on the points ``x - h, x, x + h``."""
        c0, c2 = op.coefficients
        h2 = self.step * self.step
        return np.array([c2 / h2, -2.0 * c2 / h2 + c0, c2 / h2])


def _checked(f, x):
    value = f(x)
    if not np.all(np.isfinite(value)):
        raise EvaluationError(f"non-finite function value at x={x!r}")
    return value


def apply_fd(op: LinearOperator, f: Callable, x, scheme: FdScheme = FdScheme()):
    """Approximate ``(op f)(x)`` with the central second-difference stencil."""
    c0, c2 = op.coefficients
    fx = _checked(f, x)
    if c2 == 0.0:
        return c0 * fx
    h = scheme.step
    lap = (_checked(f, x - h) - 2.0 * fx + _checked(f, x + h)) / (h * h)
    return c2 * lap + c0 * fx


# Closed-form function families with exact derivatives.


class AnalyticFunction:
    """Base class for functions that know their own derivatives."""

    def __call__(self, x):
        return self.derivative(0)(x)

    def derivative(self, order: int) -> Callable:
        raise NotImplementedError

    def __add__(self, other):
        if not isinstance(other, AnalyticFunction):
            return NotImplemented
        return Combination(((1.0, self), (1.0, other)))

    def __rmul__(self, scale):
        if not isinstance(scale, (int, float)):
            return NotImplemented
        return Combination(((float(scale), self),))

    __mul__ = __rmul__


@dataclass(frozen=True)
class Sinusoid(AnalyticFunction):
    """``amplitude * sin(frequency * x + phase)``."""

    amplitude: float = 1.0
    frequency: float = 1.0
    phase: float = 0.0

    def derivative(self, order):
        w = self.frequency
        scale = self.amplitude * w**order
        # d/dx cycles sin -> cos -> -sin -> -cos; avoids evaluating sin(z + k*pi/2)
        sign = -1.0 if order % 4 >= 2 else 1.0
        trig = np.cos if order % 2 else np.sin
        return lambda x: sign * scale * trig(w * np.asarray(x, dtype=float) + self.phase)


@dataclass(frozen=True)
class Polynomial(AnalyticFunction):
    """Polynomial with coefficients in increasing degree."""

    coeffs: tuple[float, ...]

    def derivative(self, order):
        p = np.polynomial.Polynomial(self.coeffs).deriv(order)
        return lambda x: p(np.asarray(x, dtype=float))


@dataclass(frozen=True)
class Exponential(AnalyticFunction):
    """``scale * exp(rate * x)``."""

    scale: float = 1.0
    rate: float = 1.0

    def derivative(self, order):
        s = self.scale * self.rate**order
        return lambda x: s * np.exp(self.rate * np.asarray(x, dtype=float))


@dataclass(frozen=True)
class Combination(AnalyticFunction):
    terms: tuple[tuple[float, AnalyticFunction], ...]

    def derivative(self, order):
        parts = [(c, g.derivative(order)) for c, g in self.terms]

        def d(x):
            out = 0.0
            for c, g in parts:
                out = out + c * g(x)
            return out

        return d


def apply_analytic(op: LinearOperator, f: AnalyticFunction, x):
    """Exact ``(op f)(x)`` for the closed-form families above."""
    if not isinstance(f, AnalyticFunction):
        raise UnsupportedFunctionError(f"no exact derivatives for {type(f).__name__}")
    c0, c2 = op.coefficients
    if isinstance(f, Sinusoid):
        # op maps sin(wx + p) onto itself with factor c0 - c2 w^2
        return (c0 - c2 * (f.frequency * f.frequency)) * f(x)
    if c2 == 0.0:
        return c0 * f(x)
    return c2 * f.derivative(2)(x) + c0 * f(x)
