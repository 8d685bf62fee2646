"""Covariance functions, Gram matrices and operator-transformed kernels.

All kernels are immutable and vectorised: ``kernel(x, x_prime)`` broadcasts
its arguments like a numpy ufunc.  Applying a linear operator in both
arguments, ``O_x O_x' k(x, x')``, is done exactly where the kernel allows it
(stationary kernels and Mercer sums of sinusoids) and with a nested
second-difference stencil otherwise.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numpy.polynomial import hermite_e

from .operators import FdScheme, LinearOperator

# Fourth-order mixed stencils lose ~eps/h^4 to rounding; 1e-2 keeps that near 1e-7.
KERNEL_FD_STEP = 1e-2

JITTER_START = 1e-10
JITTER_GROWTH = 10.0
JITTER_CAP = 1e-4


class NotPSDError(np.linalg.LinAlgError):
    def __init__(self, message, min_eigenvalue):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue


class Kernel:
    def __call__(self, x, x_prime):
        raise NotImplementedError

    def to_config(self) -> dict:
        raise NotImplementedError(f"{type(self).__name__} has no config form")


class StationaryKernel(Kernel):
    """Kernel of the form ``kappa(x - x')``."""

    def profile(self, r, order: int = 0):
        """``order``-th derivative of ``kappa`` at lag ``r``."""
        raise NotImplementedError

    def __call__(self, x, x_prime):
        return self.profile(np.asarray(x, dtype=float) - np.asarray(x_prime, dtype=float))


@dataclass(frozen=True)
class Cosine(StationaryKernel):
    """The Helmholtz kernel ``cos(alpha (x - x'))``."""

    alpha: float

    def profile(self, r, order=0):
        a = self.alpha
        z = a * r
        if order == 0:
            return np.cos(z)
        scale = a**order
        sign = -1.0 if order % 4 in (1, 2) else 1.0
        trig = np.sin if order % 2 else np.cos
        return sign * scale * trig(z)

    def to_config(self):
        return {"variant": "cosine", "alpha": self.alpha}


@dataclass(frozen=True)
class SquaredExponential(StationaryKernel):
    lengthscale: float = 1.0
    variance: float = 1.0

    def __post_init__(self):
        if not (self.lengthscale > 0 and self.variance > 0):
            raise ValueError("lengthscale and variance must be positive")

    def profile(self, r, order=0):
        u = np.asarray(r, dtype=float) / self.lengthscale
        base = self.variance * np.exp(-0.5 * u * u)
        if order == 0:
            return base
        # d^n/du^n exp(-u^2/2) = (-1)^n He_n(u) exp(-u^2/2)
        coeffs = np.zeros(order + 1)
        coeffs[order] = 1.0
        return (-1.0) ** order * hermite_e.hermeval(u, coeffs) * base / self.lengthscale**order

    def to_config(self):
        return {
            "variant": "squared_exponential",
            "lengthscale": self.lengthscale,
            "variance": self.variance,
        }


@dataclass(frozen=True)
class BasisFunction:
    """``amplitude * sin(frequency * x + phase)``."""

    amplitude: float = 1.0
    frequency: float = 1.0
    phase: float = 0.0
    family: str = "sinusoid"

    def __call__(self, x):
        return self.amplitude * np.sin(self.frequency * np.asarray(x, dtype=float) + self.phase)

    def transformed(self, op: LinearOperator) -> "BasisFunction":
        """The image ``O phi``, again a sinusoid of the same frequency and phase."""
        c0, c2 = op.coefficients
        w = self.frequency
        return BasisFunction(self.amplitude * (c0 - c2 * (w * w)), w, self.phase)


@dataclass(frozen=True, eq=False)
class MercerSum(Kernel):
    """Finite expansion ``sum_ij phi_i(x) m_ij phi_j(x')``."""

    basis: tuple[BasisFunction, ...]
    m: np.ndarray

    def features(self, x):
        x = np.asarray(x, dtype=float)
        return np.stack([phi(x) for phi in self.basis], axis=-1)

    def __call__(self, x, x_prime):
        fx = self.features(x)
        fxp = self.features(x_prime)
        return np.einsum("...i,ij,...j->...", fx, self.m, fxp)


@dataclass(frozen=True, eq=False)
class OperatorTransformed(Kernel):
    """``O_x O'_x' base(x, x')``, exact for stationary bases, finite differences otherwise."""

    op: LinearOperator
    op_prime: LinearOperator
    base: Kernel
    path: str = "analytic"
    step: float = KERNEL_FD_STEP

    def __post_init__(self):
        if self.path not in ("analytic", "fd"):
            raise ValueError(f"unknown path {self.path!r}")
        if self.path == "analytic" and not isinstance(self.base, StationaryKernel):
            raise ValueError(f"no exact transform for {type(self.base).__name__}")

    def __call__(self, x, x_prime):
        x = np.asarray(x, dtype=float)
        x_prime = np.asarray(x_prime, dtype=float)
        if self.path == "analytic":
            return self._analytic(x, x_prime)
        return self._fd(x, x_prime)

    def _analytic(self, x, x_prime):
        # d^i/dx^i d^j/dx'^j kappa(x - x') = (-1)^j kappa^(i+j); only even j occur
        c0, c2 = self.op.coefficients
        d0, d2 = self.op_prime.coefficients
        r = x - x_prime
        k = self.base.profile
        out = (c0 * d0) * k(r)
        if c2 * d0 + c0 * d2 != 0.0:
            out = out + (c2 * d0 + c0 * d2) * k(r, 2)
        if c2 * d2 != 0.0:
            out = out + (c2 * d2) * k(r, 4)
        return out

    def _fd(self, x, x_prime):
        scheme = FdScheme(self.step)
        wx = scheme.weights(self.op)
        wxp = scheme.weights(self.op_prime)
        h = self.step
        out = 0.0
        for i, ci in zip((-1, 0, 1), wx):
            if ci == 0.0:
                continue
            for j, cj in zip((-1, 0, 1), wxp):
                if cj == 0.0:
                    continue
                out = out + (ci * cj) * self.base(x + i * h, x_prime + j * h)
        if not np.all(np.isfinite(out)):
            raise ValueError("non-finite kernel value on finite-difference stencil")
        return out


def kernel_from_config(cfg: dict) -> Kernel:
    cfg = dict(cfg)
    variant = cfg.pop("variant")
    if variant == "cosine":
        allowed = {"alpha"}
        make = lambda: Cosine(float(cfg["alpha"]))
    elif variant == "squared_exponential":
        allowed = {"lengthscale", "variance"}
        make = lambda: SquaredExponential(float(cfg.get("lengthscale", 1.0)), float(cfg.get("variance", 1.0)))
    else:
        raise ValueError(f"unknown kernel variant {variant!r}")
    unknown = set(cfg) - allowed
    if unknown:
        raise ValueError(f"unknown kernel keys: {sorted(unknown)}")
    return make()


def eval_kernel(kernel: Kernel, x, x_prime):
    return kernel(x, x_prime)


def gram(kernel: Kernel, points: Sequence[float]) -> np.ndarray:
    """Gram matrix ``G_ij = k(points_i, points_j)``, checked for positive semi-definiteness.

    Raises :class:`NotPSDError` if no admissible jitter makes it factorisable.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 1 or pts.size == 0:
        raise ValueError("gram needs a non-empty 1-d point set")
    if not np.all(np.isfinite(pts)):
        raise ValueError("points must be finite")
    G = kernel(pts[:, None], pts[None, :])
    jittered_cholesky(G)
    return G


def jittered_cholesky(G: np.ndarray) -> tuple[np.ndarray, float]:
    """Lower Cholesky factor of ``G + jitter I`` with the smallest admissible jitter.

    The jitter starts at ``1e-10 * trace(G)/n`` and grows tenfold up to
    ``1e-4 * trace(G)/n``.  An all-zero matrix factors as zero.
    """
    n = G.shape[0]
    if not np.any(G):
        return np.zeros_like(G), 0.0
    scale = np.trace(G) / n
    jitter = JITTER_START * scale
    while jitter <= JITTER_CAP * scale * (1 + 1e-9):
        try:
            return np.linalg.cholesky(G + jitter * np.eye(n)), jitter
        except np.linalg.LinAlgError:
            jitter *= JITTER_GROWTH
    lam = float(np.linalg.eigvalsh(0.5 * (G + G.T))[0])
    raise NotPSDError(f"matrix is not positive semi-definite (smallest eigenvalue {lam:.3e})", lam)


def mercer_from_basis(basis: Sequence[BasisFunction], m) -> MercerSum:
    m = np.array(m, dtype=float)
    basis = tuple(basis)
    if m.ndim != 2 or m.shape != (len(basis), len(basis)):
        raise ValueError(f"weight matrix shape {m.shape} does not match {len(basis)} basis functions")
    if np.max(np.abs(m - m.T), initial=0.0) > 1e-12:
        raise ValueError("weight matrix is not symmetric")
    if m.size and np.linalg.eigvalsh(m)[0] < -1e-12 * max(1.0, np.abs(m).max()):
        raise ValueError("weight matrix is not positive semi-definite")
    m.setflags(write=False)
    return MercerSum(basis, m)


def cosine_mercer_pair(alpha: float) -> MercerSum:
    """``{sin(a x), sin(a x + pi/2)}`` with identity weights, equal to ``Cosine(alpha)``."""
    return mercer_from_basis(
        [BasisFunction(1.0, alpha, 0.0), BasisFunction(1.0, alpha, math.pi / 2)], np.eye(2)
    )


def operator_transform(op: LinearOperator, kernel: Kernel, op_prime: LinearOperator | None = None,
                       path: str = "auto", step: float = KERNEL_FD_STEP) -> Kernel:
    """Kernel of the transformed process, ``O_x O'_x' k(x, x')``.

    ``op_prime`` defaults to ``op``.  With ``path="auto"`` Mercer sums are
    transformed basis-function-wise, stationary kernels in closed form, and
    anything else by nested finite differences.
    """
    op_prime = op if op_prime is None else op_prime
    if path == "auto":
        if isinstance(kernel, MercerSum) and op == op_prime:
            return MercerSum(tuple(phi.transformed(op) for phi in kernel.basis), kernel.m)
        path = "analytic" if isinstance(kernel, StationaryKernel) else "fd"
    return OperatorTransformed(op, op_prime, kernel, path, step)


def boogaart_residual(op: LinearOperator, kernel: Kernel, points: Sequence[float],
                      path: str = "auto", step: float = KERNEL_FD_STEP) -> float:
    """``max_x |O_x O_x' k(x, x')|`` over the diagonal ``x = x'`` at ``points``."""
    pts = np.asarray(points, dtype=float)
    if pts.size == 0:
        raise ValueError("need at least one point")
    transformed = operator_transform(op, kernel, path=path, step=step)
    return float(np.max(np.abs(transformed(pts, pts))))


ZERO_KERNEL = mercer_from_basis([BasisFunction(1.0, 1.0, 0.0)], [[0.0]])
