import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from physact.nn import (ActivationKind, SingleLayerNet, Trainable, activation, apply_operator,
                        constrained_net, forward, forward_dx, forward_dx2, grad_params,
                        grad_params_of_dx2, init_net)
from physact.operators import LinearOperator

KINDS = list(ActivationKind)


def random_net(rng, kind, n=None):
    n = n or int(rng.integers(1, 8))
    return SingleLayerNet(kind, rng.normal(0, 1.5, n), rng.normal(0, 1, n), rng.normal(0, 1, n), rng.normal())


def fd_param_grad(fn, net, h):
    theta = net.flat()
    out = np.empty_like(theta)
    for i in range(theta.size):
        tp, tm = theta.copy(), theta.copy()
        tp[i] += h
        tm[i] -= h
        out[i] = (fn(net.with_flat(tp)) - fn(net.with_flat(tm))) / (2 * h)
    return out


def test_forward_examples(rng):
    net = SingleLayerNet("sin", [1.0], [0.0], [1.0], 0.0)
    assert forward(net, math.pi / 2) == 1.0
    zero_v = SingleLayerNet("tanh", [1.0, 2.0], [0.3, -1.0], [0.0, 0.0], 0.75)
    assert np.all(forward(zero_v, np.linspace(-3, 3, 9)) == 0.75)


def test_forward_relu_direct_sum():
    w, a, v, b = [0.5, -1.2, 2.0], [0.1, 0.3, -0.9], [1.5, -0.7, 0.25], 0.05
    net = SingleLayerNet("relu", w, a, v, b)
    x = 0.37
    oracle = (1.5 * max(0.5 * x + 0.1, 0) + -0.7 * max(-1.2 * x + 0.3, 0)
              + 0.25 * max(2.0 * x - 0.9, 0) + 0.05)
    assert forward(net, x) == pytest.approx(oracle, abs=1e-12)


def test_forward_dx2_examples(rng):
    net = SingleLayerNet("sin", [1.0], [0.0], [1.0], 0.0)
    assert forward_dx2(net, math.pi / 2) == -1.0
    h = 1e-4
    fd = (forward(net, math.pi / 2 + h) - 2 * forward(net, math.pi / 2) + forward(net, math.pi / 2 - h)) / h**2
    assert fd == pytest.approx(-1.0, abs=1e-6)
    relu = random_net(rng, "relu", 6)
    xs = np.linspace(-4, 4, 57)
    assert np.all(forward_dx2(relu, xs) == 0.0)
    flat = SingleLayerNet("tanh", [0.0, 0.0], [0.5, 1.0], [1.0, 2.0])
    assert np.all(forward_dx2(flat, xs) == 0.0)


@pytest.mark.parametrize("kind", ["sin", "tanh"])
def test_input_derivatives_vs_fd(rng, kind):
    net = random_net(rng, kind, 5)
    x = np.linspace(-2, 2, 9)
    h = 1e-5
    np.testing.assert_allclose(forward_dx(net, x), (forward(net, x + h) - forward(net, x - h)) / (2 * h),
                               rtol=1e-6, atol=1e-8)
    h = 1e-3
    fd2 = (forward_dx(net, x + h) - forward_dx(net, x - h)) / (2 * h)
    np.testing.assert_allclose(forward_dx2(net, x), fd2, rtol=1e-5, atol=1e-6)


@pytest.mark.parametrize("kind", KINDS)
def test_activation_derivative_chain(kind):
    z = np.linspace(-3, 3, 13) + 0.05  # avoid the ReLU kink
    h = 1e-6
    for order in range(3):
        fd = (activation(kind, z + h, order) - activation(kind, z - h, order)) / (2 * h)
        np.testing.assert_allclose(activation(kind, z, order + 1), fd, rtol=1e-6, atol=1e-7)


def test_relu_kink_convention():
    assert activation("relu", np.array(0.0), 1) == 0.0
    assert activation("relu", np.array(0.0), 2) == 0.0


def test_grad_params_examples():
    net = SingleLayerNet("sin", [1.0], [0.0], [1.0], 0.0)
    g = grad_params(net, 0.0, 1.0)
    assert (g.d_v[0], g.d_a[0], g.d_w[0], g.d_b) == (0.0, 1.0, 0.0, 1.0)
    z = grad_params(net, 0.3, 0.0)
    assert not np.any(z.flat())
    g2 = grad_params_of_dx2(net, 0.0, 1.0)
    assert g2.d_v[0] == 0.0
    assert g2.d_a[0] == -1.0
    relu = SingleLayerNet("relu", [1.0, -2.0], [0.5, 0.2], [1.0, 3.0])
    assert not np.any(grad_params_of_dx2(relu, np.linspace(-2, 2, 7), 1.0).flat())


def _assert_rel(analytic, fd, rel):
    scale = max(np.max(np.abs(fd)), 1e-12)
    np.testing.assert_allclose(analytic, fd, rtol=rel, atol=rel * 1e-3 * scale)


@pytest.mark.parametrize("kind", ["sin", "tanh"])
def test_grad_params_vs_fd_many(kind):
    rng = np.random.default_rng(99)
    for _ in range(100):
        net = random_net(rng, kind)
        for x in rng.uniform(-3, 3, 10):
            _assert_rel(grad_params(net, x).flat(), fd_param_grad(lambda n: forward(n, x), net, 1e-6), 1e-5)
    for _ in range(100):
        net = random_net(rng, kind)
        for x in rng.uniform(-3, 3, 10):
            _assert_rel(grad_params_of_dx2(net, x).flat(), fd_param_grad(lambda n: forward_dx2(n, x), net, 1e-5), 1e-4)


def test_grad_relu_vs_fd_away_from_kinks(rng):
    net = SingleLayerNet("relu", [1.0, -0.5, 2.0], [0.5, 0.3, -3.0], [0.4, -1.0, 0.8], 0.1)
    for x in (-0.2, 0.9, 2.3):
        _assert_rel(grad_params(net, x, 0.7).flat(),
                    fd_param_grad(lambda n: 0.7 * forward(n, x), net, 1e-6), 1e-5)


def test_vectorised_gradient_sums_points(rng):
    net = random_net(rng, "tanh", 4)
    xs = rng.uniform(-2, 2, 6)
    ups = rng.normal(size=6)
    total = sum((grad_params(net, x, u) for x, u in zip(xs, ups)), start=grad_params(net, 0.0, 0.0))
    np.testing.assert_allclose(grad_params(net, xs, ups).flat(), total.flat(), rtol=1e-12, atol=1e-14)


@settings(max_examples=40, deadline=None)
@given(n=st.sampled_from([1, 3, 10, 50, 200]), seed=st.integers(0, 2**31))
def test_constrained_net_annihilated(n, seed):
    nu = 0.51
    rng = np.random.default_rng(seed)
    net = SingleLayerNet("sin", np.full(n, nu), rng.uniform(0, 2 * np.pi, n), rng.normal(0, 3, n), 0.0)
    xs = np.linspace(-20, 20, 400)
    resid = forward_dx2(net, xs) + nu**2 * forward(net, xs)
    assert np.max(np.abs(resid)) <= 1e-10 * np.sum(np.abs(net.v))
    assert np.all(apply_operator(net, LinearOperator.helmholtz(nu), xs) == 0.0)
    assert np.all(np.abs(forward(net, xs)) <= np.sum(np.abs(net.v)) + abs(net.b))


@pytest.mark.parametrize("op", [LinearOperator.identity(), LinearOperator.laplace(), LinearOperator.helmholtz(1.3)])
def test_apply_operator_consistent(rng, op):
    net = random_net(rng, "tanh", 6)
    xs = np.linspace(-2, 2, 11)
    c0, c2 = op.coefficients
    np.testing.assert_allclose(apply_operator(net, op, xs), c2 * forward_dx2(net, xs) + c0 * forward(net, xs),
                               rtol=1e-12, atol=1e-12)


def test_forward_bitwise_deterministic(rng):
    net = random_net(rng, "sin", 200)
    xs = rng.uniform(-5, 5, 50)
    assert forward(net, xs).tobytes() == forward(net.copy(), xs).tobytes()
    assert np.array([forward(net, x) for x in xs]).tobytes() == forward(net, xs).tobytes()


def test_init_and_constrained_factory():
    net = constrained_net(50, 0.51, seed=3)
    assert np.all(net.w == 0.51) and net.b == 0.0
    assert net.trainable == Trainable(w=False, a=True, v=True, b=False)
    assert np.all((net.a >= 0) & (net.a < 2 * np.pi))
    assert constrained_net(50, 0.51, seed=3, learn_frequency=True).trainable.w
    relu = init_net(50, "relu", seed=3)
    assert relu.trainable == Trainable()
    # shared seed: output weights coincide across variants
    np.testing.assert_array_equal(relu.v, net.v)
    big = init_net(20000, "tanh", seed=1, amplitude=2.0)
    assert np.var(big.v) * 20000 == pytest.approx(4.0, rel=0.05)


def test_checkpoint_roundtrip(rng):
    net = constrained_net(7, 0.51, seed=2)
    back = SingleLayerNet.from_json(net.to_json())
    assert back.flat().tobytes() == net.flat().tobytes()
    assert back.trainable == net.trainable and back.activation is ActivationKind.SIN
    import json
    d = json.loads(net.to_json())
    assert set(d) == {"w", "a", "v", "b", "activation", "trainable"}


def test_invalid_nets():
    with pytest.raises(ValueError):
        SingleLayerNet("sin", [1.0, 2.0], [0.0], [1.0, 1.0])
    with pytest.raises(ValueError):
        SingleLayerNet("sin", [np.nan], [0.0], [1.0])
    with pytest.raises(ValueError):
        SingleLayerNet("gelu", [1.0], [0.0], [1.0])
