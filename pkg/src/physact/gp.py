"""Zero-mean Gaussian processes: prior draws, exact regression, PDE residuals of draws."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy.linalg import cho_solve, lapack, solve_triangular

from .kernels import Kernel, gram, jittered_cholesky
from .operators import LinearOperator
from .rng import make_rng

_PRIOR_STREAM = 101


@dataclass(frozen=True)
class GpModel:
    kernel: Kernel
    noise_variance: float = 0.0

    def __post_init__(self):
        if not (np.isfinite(self.noise_variance) and self.noise_variance >= 0):
            raise ValueError(f"noise variance must be finite and >= 0, got {self.noise_variance}")


@dataclass
class GpPosterior:
    x: np.ndarray
    mean: np.ndarray
    covariance: np.ndarray

    @property
    def std(self) -> np.ndarray:
        return np.sqrt(np.diag(self.covariance))


def low_rank_factor(G: np.ndarray) -> np.ndarray:
    """Factor ``F`` (n x r) with ``F F^T = G`` from rank-revealing pivoted Cholesky.

    Unlike a jittered factor this adds no white noise to draws, so paths from
    rank-deficient kernels stay exactly inside the kernel's span.
    """
    n = G.shape[0]
    if not np.any(G):
        return np.zeros((n, 0))
    c, piv, rank, info = lapack.dpstrf(G, lower=1)
    if info < 0:
        raise np.linalg.LinAlgError(f"dpstrf failed with info={info}")
    L = np.tril(c)[:, :rank]
    F = np.empty_like(L)
    F[piv - 1] = L
    return F


@lru_cache(maxsize=8)
def _prior_factor(kernel: Kernel, points: bytes) -> np.ndarray:
    F = low_rank_factor(gram(kernel, np.frombuffer(points)))
    F.setflags(write=False)
    return F


def sample_prior(model: GpModel, points: Sequence[float], seed: int) -> np.ndarray:
    """One prior draw at ``points``; bitwise reproducible for a given seed."""
    pts = np.ascontiguousarray(points, dtype=float).reshape(-1)
    F = _prior_factor(model.kernel, pts.tobytes())
    z = make_rng(seed, _PRIOR_STREAM).standard_normal(F.shape[1])
    return F @ z if F.shape[1] else np.zeros(pts.size)


def posterior(model: GpModel, train_x, train_y, query_x) -> GpPosterior:
    """Condition the prior on ``train_y = g(train_x) + noise``."""
    tx = np.asarray(train_x, dtype=float)
    ty = np.asarray(train_y, dtype=float)
    qx = np.asarray(query_x, dtype=float)
    if tx.size == 0:
        raise ValueError("posterior needs at least one training point")
    if tx.shape != ty.shape:
        raise ValueError(f"train_x has shape {tx.shape} but train_y has {ty.shape}")
    k = model.kernel
    K = k(tx[:, None], tx[None, :]) + model.noise_variance * np.eye(tx.size)
    L, _ = jittered_cholesky(K)
    Ks = k(tx[:, None], qx[None, :])
    Kss = k(qx[:, None], qx[None, :])
    mean = Ks.T @ cho_solve((L, True), ty)
    V = solve_triangular(L, Ks, lower=True)
    cov = Kss - V.T @ V
    cov = 0.5 * (cov + cov.T)
    d = np.diag(cov).copy()
    if np.any(d < -1e-10 * max(1.0, np.abs(np.diag(Kss)).max())):
        raise np.linalg.LinAlgError(f"posterior variance negative: {d.min():.3e}")
    np.fill_diagonal(cov, np.maximum(d, 0.0))
    return GpPosterior(qx, mean, cov)


def grid_residual(op: LinearOperator, xs: np.ndarray, values: np.ndarray) -> np.ndarray:
    """``O g`` on the interior of a uniform grid from second differences of ``values``."""
    if xs.size < 5:
        raise ValueError(f"grid too coarse: {xs.size} points, need at least 5")
    steps = np.diff(xs)
    h = steps.mean()
    if np.max(np.abs(steps - h)) > 1e-9 * max(1.0, abs(h)):
        raise ValueError("grid must be uniformly spaced")
    c0, c2 = op.coefficients
    lap = (values[:-2] - 2.0 * values[1:-1] + values[2:]) / (h * h)
    return c2 * lap + c0 * values[1:-1]


def pde_residual_of_sample(model: GpModel, op: LinearOperator, points, seed: int) -> float:
    """Largest interior ``|O g|`` of one prior draw ``g`` on a uniform grid."""
    xs = np.asarray(points, dtype=float)
    if xs.size < 5:
        raise ValueError(f"grid too coarse: {xs.size} points, need at least 5")
    g = sample_prior(model, xs, seed)
    return float(np.max(np.abs(grid_residual(op, xs, g))))
