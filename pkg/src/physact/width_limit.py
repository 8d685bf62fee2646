"""Monte-Carlo check of the wide-network covariance against a target kernel.

For a single hidden layer with output weights of variance ``A^2 / N`` and
output bias variance ``sigma_b^2``, the output covariance in the wide limit is

    sigma_b^2 + A^2 E[h(w x + a) h(w x' + a)]

with ``(w, a)`` drawn from the weight prior.  The estimators below sample that
single-neuron expectation directly; samples are shared across every grid pair
of one call so that estimates are symmetric and comparable.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .csvio import write_csv
from .kernels import ZERO_KERNEL, Kernel
from .nn import ActivationKind, activation
from .operators import LinearOperator
from .rng import make_rng

_W_STREAM = 404
_A_STREAM = 405


@dataclass(frozen=True)
class Delta:
    value: float

    def sample(self, rng, n):
        return np.full(n, float(self.value))


@dataclass(frozen=True)
class Gaussian:
    sigma: float = 1.0

    def sample(self, rng, n):
        return rng.normal(0.0, self.sigma, n)


@dataclass(frozen=True)
class Uniform:
    lo: float = 0.0
    hi: float = 2 * math.pi

    def sample(self, rng, n):
        return rng.uniform(self.lo, self.hi, n)


@dataclass(frozen=True)
class WeightPrior:
    w_law: Delta | Gaussian | Uniform
    a_law: Delta | Gaussian | Uniform
    sigma_b: float = 0.0
    amplitude: float = math.sqrt(2.0)

    def __post_init__(self):
        if self.sigma_b < 0:
            raise ValueError("sigma_b must be non-negative")

    @classmethod
    def helmholtz(cls, alpha: float) -> "WeightPrior":
        """Input weight pinned to ``alpha``, phase uniform over one period, ``A^2 = 2``."""
        return cls(Delta(alpha), Uniform(0.0, 2 * math.pi), 0.0, math.sqrt(2.0))

    @property
    def deterministic(self) -> bool:
        return isinstance(self.w_law, Delta) and isinstance(self.a_law, Delta)

    def draw(self, n: int, seed: int):
        if n < 1:
            raise ValueError("need at least one sample")
        w = self.w_law.sample(make_rng(seed, _W_STREAM), n)
        a = self.a_law.sample(make_rng(seed, _A_STREAM), n)
        return w, a


@dataclass
class CorrespondenceReport:
    x: np.ndarray
    x_prime: np.ndarray
    mc_estimate: np.ndarray
    kernel_value: np.ndarray
    n_samples: int
    seed: int
    samples: np.ndarray | None = field(default=None, repr=False)

    @property
    def abs_error(self) -> np.ndarray:
        return np.abs(self.mc_estimate - self.kernel_value)

    @property
    def max_abs_error(self) -> float:
        return float(self.abs_error.max())

    def save(self, path):
        write_csv(path, {"x": self.x, "x_prime": self.x_prime, "mc": self.mc_estimate,
                         "kernel": self.kernel_value, "abs_error": self.abs_error},
                  comments=[f"n_samples={self.n_samples} seed={self.seed}"])


def square_grid(lo: float, hi: float, n: int) -> list[tuple[float, float]]:
    pts = np.linspace(lo, hi, n)
    return [(float(x), float(xp)) for x in pts for xp in pts]


def _estimate(prior, feature, grid, n_samples, seed, bias_var):
    """Shared-sample estimate of ``bias_var + A^2 E[feature(x) feature(x')]`` on ``grid``.

    ``feature(x, w, a)`` returns per-sample values.  Returns abscissae, estimates
    and the per-sample products (pairs x samples).
    """
    grid = [(float(x), float(xp)) for x, xp in grid]
    if not grid:
        raise ValueError("empty grid")
    # a fully deterministic prior yields identical draws; one sample is exact
    w, a = prior.draw(1 if prior.deterministic else n_samples, seed)
    table = {x: feature(x, w, a) for x in sorted({p for pair in grid for p in pair})}
    A2 = prior.amplitude * prior.amplitude
    prods = np.array([table[x] * table[xp] for x, xp in grid])
    est = bias_var + A2 * prods.mean(axis=1)
    xs = np.array([g[0] for g in grid])
    xps = np.array([g[1] for g in grid])
    return xs, xps, est, prods


def mc_covariance(kind: ActivationKind, prior: WeightPrior, x: float, x_prime: float,
                  n_samples: int, seed: int) -> float:
    feature = lambda t, w, a: activation(kind, w * t + a)
    return float(_estimate(prior, feature, [(x, x_prime)], n_samples, seed, prior.sigma_b**2)[2][0])


def correspondence_check(kind: ActivationKind, prior: WeightPrior, target: Kernel,
                         grid: Sequence[tuple[float, float]], n_samples: int, seed: int) -> CorrespondenceReport:
    feature = lambda t, w, a: activation(kind, w * t + a)
    xs, xps, est, _ = _estimate(prior, feature, grid, n_samples, seed, prior.sigma_b**2)
    return CorrespondenceReport(xs, xps, est, np.asarray(target(xs, xps), dtype=float), n_samples, seed)


def transformed_correspondence(op: LinearOperator, kind: ActivationKind, prior: WeightPrior,
                               grid, n_samples: int, seed: int,
                               target: Kernel = ZERO_KERNEL) -> CorrespondenceReport:
    """Estimate ``E[(O h)(x) (O h)(x')]`` with ``O h`` in closed form.

    The per-sample products are kept on the report (``samples``) so exact
    annihilation can be checked draw by draw.  The bias is fixed, so
    ``sigma_b`` enters as ``c0^2 sigma_b^2``.
    """
    kind = ActivationKind(kind)
    c0, c2 = op.coefficients
    if kind is ActivationKind.RELU and c2 != 0.0:
        raise ValueError("ReLU has no second derivative for a differential operator")

    def feature(t, w, a):
        z = w * t + a
        h = activation(kind, z)
        if c2 == 0.0:
            return c0 * h
        return c2 * (w * w) * activation(kind, z, 2) + c0 * h

    xs, xps, est, prods = _estimate(prior, feature, grid, n_samples, seed, (c0 * prior.sigma_b) ** 2)
    return CorrespondenceReport(xs, xps, est, np.asarray(target(xs, xps), dtype=float),
                                n_samples, seed, samples=prods)
