"""Single-hidden-layer network ``f(x) = sum_k v_k h(w_k x + a_k) + b``.

Scalar input and output.  Everything is evaluated in closed form: the output,
its first and second input derivatives, a linear operator applied to the
output, and the parameter gradients of both the output and its second
derivative.  Inputs may be scalars or 1-d arrays; per-point quantities come
back with the input's shape, gradients are summed over points.
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .operators import LinearOperator
from .rng import make_rng

_INIT_STREAM = 202


class ActivationKind(str, enum.Enum):
    RELU = "relu"
    TANH = "tanh"
    SIN = "sin"


def activation(kind: ActivationKind, z, order: int = 0):
    """``order``-th derivative of the activation at ``z`` (orders 0 to 3).

    ReLU uses the almost-everywhere convention: h'(0) = 0 and all higher
    derivatives vanish.
    """
    kind = ActivationKind(kind)
    if kind is ActivationKind.SIN:
        sign = -1.0 if order % 4 >= 2 else 1.0
        return sign * (np.cos(z) if order % 2 else np.sin(z))
    if kind is ActivationKind.RELU:
        if order == 0:
            return np.maximum(z, 0.0)
        if order == 1:
            return (z > 0).astype(float)
        return np.zeros_like(z, dtype=float)
    t = np.tanh(z)
    if order == 0:
        return t
    s = 1.0 - t * t
    if order == 1:
        return s
    if order == 2:
        return -2.0 * t * s
    if order == 3:
        return s * (6.0 * t * t - 2.0)
    raise ValueError(f"derivative order {order} not supported")


@dataclass
class Trainable:
    w: bool = True
    a: bool = True
    v: bool = True
    b: bool = True


@dataclass
class ParamGradient:
    d_w: np.ndarray
    d_a: np.ndarray
    d_v: np.ndarray
    d_b: float

    def __add__(self, other):
        return ParamGradient(self.d_w + other.d_w, self.d_a + other.d_a,
                             self.d_v + other.d_v, self.d_b + other.d_b)

    def scaled(self, c):
        return ParamGradient(c * self.d_w, c * self.d_a, c * self.d_v, c * self.d_b)

    def flat(self) -> np.ndarray:
        return np.concatenate([self.d_w, self.d_a, self.d_v, [self.d_b]])


@dataclass
class SingleLayerNet:
    activation: ActivationKind
    w: np.ndarray
    a: np.ndarray
    v: np.ndarray
    b: float = 0.0
    trainable: Trainable = field(default_factory=Trainable)

    def __post_init__(self):
        self.activation = ActivationKind(self.activation)
        self.w = np.array(self.w, dtype=float).reshape(-1)
        self.a = np.array(self.a, dtype=float).reshape(-1)
        self.v = np.array(self.v, dtype=float).reshape(-1)
        self.b = float(self.b)
        n = self.w.size
        if n < 1 or self.a.size != n or self.v.size != n:
            raise ValueError(f"parameter lengths differ: w={self.w.size}, a={self.a.size}, v={self.v.size}")
        if not (np.all(np.isfinite(self.flat())) and math.isfinite(self.b)):
            raise ValueError("network parameters must be finite")

    @property
    def n_hidden(self) -> int:
        return self.w.size

    def flat(self) -> np.ndarray:
        return np.concatenate([self.w, self.a, self.v, [self.b]])

    def with_flat(self, theta) -> "SingleLayerNet":
        n = self.n_hidden
        theta = np.asarray(theta, dtype=float)
        return replace(self, w=theta[:n], a=theta[n:2 * n], v=theta[2 * n:3 * n], b=theta[3 * n])

    def copy(self) -> "SingleLayerNet":
        return replace(self, w=self.w.copy(), a=self.a.copy(), v=self.v.copy(),
                       trainable=replace(self.trainable))

    def to_json(self) -> str:
        return json.dumps({
            "activation": self.activation.value,
            "w": self.w.tolist(),
            "a": self.a.tolist(),
            "v": self.v.tolist(),
            "b": self.b,
            "trainable": vars(self.trainable),
        }, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "SingleLayerNet":
        d = json.loads(text)
        return cls(d["activation"], d["w"], d["a"], d["v"], d["b"], Trainable(**d["trainable"]))


def _pre(net, x):
    x = np.asarray(x, dtype=float)
    return x, x[..., None] * net.w + net.a


def forward(net: SingleLayerNet, x):
    x, z = _pre(net, x)
    return (net.v * activation(net.activation, z)).sum(axis=-1) + net.b


def forward_dx(net: SingleLayerNet, x):
    x, z = _pre(net, x)
    return (net.v * net.w * activation(net.activation, z, 1)).sum(axis=-1)


def forward_dx2(net: SingleLayerNet, x):
    x, z = _pre(net, x)
    return (net.v * (net.w * net.w) * activation(net.activation, z, 2)).sum(axis=-1)


def apply_operator(net: SingleLayerNet, op: LinearOperator, x):
    """``(O f)(x)`` summed neuron by neuron.

    Each neuron contributes ``v_k (c2 w_k^2 h''(z_k) + c0 h(z_k))``; for a sine
    neuron with ``w_k^2 == c0`` that bracket is exactly zero in floating point,
    so constrained networks have an exactly vanishing residual.
    """
    c0, c2 = op.coefficients
    x, z = _pre(net, x)
    h = activation(net.activation, z)
    if c2 == 0.0:
        per_neuron = c0 * h
    else:
        per_neuron = c2 * (net.w * net.w) * activation(net.activation, z, 2) + c0 * h
    return (net.v * per_neuron).sum(axis=-1) + c0 * net.b


def _broadcast(x, upstream):
    x = np.asarray(x, dtype=float)
    up = np.broadcast_to(np.asarray(upstream, dtype=float), x.shape)
    return x.reshape(-1), up.reshape(-1)


def grad_params(net: SingleLayerNet, x, upstream=1.0) -> ParamGradient:
    """Gradient of ``sum_i upstream_i f(x_i)`` with respect to ``(w, a, v, b)``."""
    x, up = _broadcast(x, upstream)
    z = x[:, None] * net.w + net.a
    h = activation(net.activation, z)
    hp = activation(net.activation, z, 1)
    d_a_pts = up[:, None] * net.v * hp
    return ParamGradient(
        d_w=(d_a_pts * x[:, None]).sum(axis=0),
        d_a=d_a_pts.sum(axis=0),
        d_v=(up[:, None] * h).sum(axis=0),
        d_b=float(up.sum()),
    )


def grad_params_of_dx2(net: SingleLayerNet, x, upstream=1.0) -> ParamGradient:
    """Gradient of ``sum_i upstream_i f''(x_i)`` with respect to ``(w, a, v, b)``."""
    x, up = _broadcast(x, upstream)
    z = x[:, None] * net.w + net.a
    h2 = activation(net.activation, z, 2)
    h3 = activation(net.activation, z, 3)
    w, v = net.w, net.v
    u = up[:, None]
    return ParamGradient(
        d_w=(u * v * (2.0 * w * h2 + (w * w) * h3 * x[:, None])).sum(axis=0),
        d_a=(u * v * (w * w) * h3).sum(axis=0),
        d_v=(u * (w * w) * h2).sum(axis=0),
        d_b=0.0,
    )


def grad_params_of_operator(net: SingleLayerNet, op: LinearOperator, x, upstream=1.0) -> ParamGradient:
    """Gradient of ``sum_i upstream_i (O f)(x_i)``."""
    c0, c2 = op.coefficients
    g = grad_params(net, x, upstream).scaled(c0)
    if c2 != 0.0:
        g = g + grad_params_of_dx2(net, x, upstream).scaled(c2)
    return g


def init_net(n_hidden: int, kind: ActivationKind, seed: int, amplitude: float = 1.0,
             fixed_w: float | None = None, trainable: Trainable | None = None) -> SingleLayerNet:
    """Random initial network.

    ``v ~ N(0, amplitude^2 / N)``; phases ``a ~ U[0, 2 pi)`` for sine networks
    and ``N(0, 1)`` otherwise; ``w ~ N(0, 1)`` unless ``fixed_w`` pins every
    input weight to one value.  The output bias starts at zero.
    """
    if n_hidden < 1:
        raise ValueError("need at least one hidden neuron")
    kind = ActivationKind(kind)
    rng = make_rng(seed, _INIT_STREAM)
    v = rng.normal(0.0, amplitude / math.sqrt(n_hidden), n_hidden)
    if kind is ActivationKind.SIN:
        a = rng.uniform(0.0, 2 * math.pi, n_hidden)
    else:
        a = rng.standard_normal(n_hidden)
    w = rng.standard_normal(n_hidden)
    if fixed_w is not None:
        w = np.full(n_hidden, float(fixed_w))
    return SingleLayerNet(kind, w, a, v, 0.0, trainable or Trainable())


def constrained_net(n_hidden: int, nu: float, seed: int, learn_frequency: bool = False) -> SingleLayerNet:
    """Sine network with every input weight equal to the wave number and no output bias.

    Such a network solves ``f'' + nu^2 f = 0`` for any ``v`` and ``a``.  With
    ``learn_frequency`` the input weights are trainable and that guarantee is lost.
    """
    return init_net(n_hidden, ActivationKind.SIN, seed, fixed_w=nu,
                    trainable=Trainable(w=learn_frequency, a=True, v=True, b=False))
