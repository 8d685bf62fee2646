"""Data loss + lambda * physics loss, ADAM/SGD, and the full-batch training loop."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .csvio import read_csv, write_csv
from .data import Dataset
from .nn import (ActivationKind, ParamGradient, SingleLayerNet, apply_operator,
                 constrained_net, forward, grad_params, grad_params_of_operator, init_net)
from .operators import LinearOperator

GROUPS = ("w", "a", "v", "b")


class DivergenceError(FloatingPointError):
    def __init__(self, iteration, message=None):
        super().__init__(message or f"total loss became non-finite at iteration {iteration}")
        self.iteration = iteration


class Variant(str, enum.Enum):
    VANILLA = "vanilla"
    INFORMED = "informed"
    CONSTRAINED = "constrained"


@dataclass(frozen=True)
class Adam:
    lr: float = 0.02
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8


@dataclass(frozen=True)
class Sgd:
    lr: float = 0.02


@dataclass
class TrainConfig:
    variant: Variant = Variant.CONSTRAINED
    lam: float = 0.1
    optimizer: Adam | Sgd = field(default_factory=Adam)
    iterations: int = 2000
    n_hidden: int = 50
    pivots: np.ndarray = field(default_factory=lambda: np.linspace(0.0, 4 * math.pi, 100))
    operator: LinearOperator = field(default_factory=lambda: LinearOperator.helmholtz(0.51))
    seed: int = 0
    learn_frequency: bool = False

    def __post_init__(self):
        self.variant = Variant(self.variant)
        self.pivots = np.asarray(self.pivots, dtype=float)
        if self.variant is Variant.VANILLA:
            self.lam = 0.0
        if self.lam < 0:
            raise ValueError("lambda must be non-negative")
        if self.iterations < 0 or self.n_hidden < 1:
            raise ValueError("iterations must be >= 0 and n_hidden >= 1")
        if self.pivots.size == 0:
            raise ValueError("need at least one pivot point")

    def build_net(self) -> SingleLayerNet:
        if self.variant is Variant.CONSTRAINED:
            return constrained_net(self.n_hidden, self.operator.nu, self.seed, self.learn_frequency)
        return init_net(self.n_hidden, ActivationKind.RELU, self.seed)


@dataclass
class TrainTrace:
    iteration: list = field(default_factory=list)
    data_loss: list = field(default_factory=list)
    physics_loss: list = field(default_factory=list)
    total_loss: list = field(default_factory=list)
    error: str | None = None

    def record(self, it, d, p, t):
        self.iteration.append(it)
        self.data_loss.append(d)
        self.physics_loss.append(p)
        self.total_loss.append(t)

    def __len__(self):
        return len(self.iteration)

    def save(self, path):
        write_csv(path, {"iter": np.array(self.iteration, dtype=int), "data_loss": self.data_loss,
                         "physics_loss": self.physics_loss, "total_loss": self.total_loss})

    @classmethod
    def load(cls, path):
        cols, _ = read_csv(path)
        return cls([int(i) for i in cols["iter"]], list(cols["data_loss"]),
                   list(cols["physics_loss"]), list(cols["total_loss"]))


def data_loss(net: SingleLayerNet, data: Dataset) -> float:
    if len(data) == 0:
        raise ValueError("empty dataset")
    r = data.ys - forward(net, data.xs)
    return float(np.sum(r * r))


def physics_loss(net: SingleLayerNet, op: LinearOperator, pivots) -> float:
    """Sum of squared operator residuals at the pivot points."""
    pivots = np.asarray(pivots, dtype=float)
    if pivots.size == 0:
        raise ValueError("need at least one pivot point")
    r = apply_operator(net, op, pivots)
    return float(np.sum(r * r))


def total_loss(net, data, op, pivots, lam) -> float:
    return data_loss(net, data) + lam * physics_loss(net, op, pivots)


def loss_and_gradient(net: SingleLayerNet, data: Dataset, op: LinearOperator, pivots, lam):
    """``(data_loss, physics_loss, total_loss, gradient of total_loss)``."""
    # overflow on a diverging run surfaces as a non-finite loss, handled by the caller
    with np.errstate(over="ignore", invalid="ignore"):
        r_d = data.ys - forward(net, data.xs)
        r_p = apply_operator(net, op, pivots)
        dl = float(np.sum(r_d * r_d))
        pl = float(np.sum(r_p * r_p))
    grad = grad_params(net, data.xs, -2.0 * r_d)
    grad = grad + grad_params_of_operator(net, op, pivots, (2.0 * lam) * r_p)
    return dl, pl, dl + lam * pl, grad


class Optimizer:
    def step(self, net: SingleLayerNet, grads: ParamGradient):
        raise NotImplementedError


def _trainable_groups(net):
    return [g for g in GROUPS if getattr(net.trainable, g)]


class AdamOptimizer(Optimizer):
    """Bias-corrected ADAM; moment buffers persist between calls and frozen groups never move."""

    def __init__(self, cfg: Adam = Adam()):
        self.cfg = cfg
        self.t = 0
        self.m: dict[str, np.ndarray] = {}
        self.v: dict[str, np.ndarray] = {}

    def step(self, net, grads):
        c = self.cfg
        self.t += 1
        bc1 = 1.0 - c.beta1**self.t
        bc2 = 1.0 - c.beta2**self.t
        for name in _trainable_groups(net):
            g = np.asarray(getattr(grads, "d_" + name), dtype=float)
            p = np.asarray(getattr(net, name), dtype=float)
            if g.shape != p.shape:
                raise ValueError(f"gradient for {name} has shape {g.shape}, parameter has {p.shape}")
            m = self.m.get(name, np.zeros_like(p))
            v = self.v.get(name, np.zeros_like(p))
            m = c.beta1 * m + (1.0 - c.beta1) * g
            v = c.beta2 * v + (1.0 - c.beta2) * (g * g)
            self.m[name], self.v[name] = m, v
            update = c.lr * (m / bc1) / (np.sqrt(v / bc2) + c.eps)
            new = p - update
            setattr(net, name, float(new) if name == "b" else new)


class SgdOptimizer(Optimizer):
    def __init__(self, cfg: Sgd = Sgd()):
        self.cfg = cfg

    def step(self, net, grads):
        for name in _trainable_groups(net):
            g = getattr(grads, "d_" + name)
            with np.errstate(over="ignore", invalid="ignore"):
                new = np.asarray(getattr(net, name)) - self.cfg.lr * np.asarray(g)
            setattr(net, name, float(new) if name == "b" else new)


def adam_step(net: SingleLayerNet, grads: ParamGradient, state: AdamOptimizer) -> AdamOptimizer:
    state.step(net, grads)
    return state


def make_optimizer(cfg) -> Optimizer:
    if isinstance(cfg, Adam):
        return AdamOptimizer(cfg)
    if isinstance(cfg, Sgd):
        return SgdOptimizer(cfg)
    raise TypeError(f"unknown optimizer config {cfg!r}")


def train(config: TrainConfig, data: Dataset, net: SingleLayerNet | None = None,
          raise_on_divergence: bool = True):
    """Full-batch minimisation of ``data_loss + lam * physics_loss``.

    Returns ``(net, trace)``; the trace has one record per iteration plus the
    initial state.  A non-finite loss raises :class:`DivergenceError`, or, with
    ``raise_on_divergence=False``, stops and stores the message in ``trace.error``.
    """
    net = config.build_net() if net is None else net.copy()
    opt = make_optimizer(config.optimizer)
    trace = TrainTrace()
    op, pivots, lam = config.operator, config.pivots, config.lam
    for it in range(config.iterations + 1):
        dl, pl, tl, grad = loss_and_gradient(net, data, op, pivots, lam)
        if not math.isfinite(tl):
            err = DivergenceError(it)
            if raise_on_divergence:
                raise err
            trace.error = str(err)
            break
        trace.record(it, dl, pl, tl)
        if it == config.iterations:
            break
        opt.step(net, grad)
        if not np.all(np.isfinite(net.flat())):
            err = DivergenceError(it + 1, f"parameters became non-finite at iteration {it + 1}")
            if raise_on_divergence:
                raise err
            trace.error = str(err)
            break
    return net, trace
