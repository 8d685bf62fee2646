import math

import numpy as np
import pytest
from scipy import integrate

from physact.csvio import read_csv
from physact.kernels import ZERO_KERNEL, Cosine, cosine_mercer_pair
from physact.operators import LinearOperator
from physact.width_limit import (Delta, Gaussian, Uniform, WeightPrior, correspondence_check, mc_covariance,
                                 square_grid, transformed_correspondence)

ALPHA = 0.51
PRIOR = WeightPrior.helmholtz(ALPHA)
GRID = square_grid(0.0, 4 * math.pi, 5)


def test_phase_average_oracle():
    # quadrature oracle for the single-neuron expectation under a uniform phase
    x, xp = 1.0, 3.0
    val, _ = integrate.quad(lambda a: math.sin(ALPHA * x + a) * math.sin(ALPHA * xp + a), 0, 2 * math.pi)
    assert 2 * val / (2 * math.pi) == pytest.approx(math.cos(ALPHA * (x - xp)), abs=1e-12)


def test_mc_covariance_converges_to_cosine():
    est = mc_covariance("sin", PRIOR, 1.0, 3.0, 10**6, seed=0)
    assert abs(est - math.cos(-1.02)) < 0.01
    diag = mc_covariance("sin", PRIOR, 2.0, 2.0, 10**6, seed=0)
    assert abs(diag - 1.0) < 0.01


def test_mc_determinism_and_symmetry():
    a = mc_covariance("sin", PRIOR, 0.4, 2.2, 1, seed=5)
    assert a == mc_covariance("sin", PRIOR, 0.4, 2.2, 1, seed=5)
    assert mc_covariance("tanh", WeightPrior(Gaussian(), Gaussian()), 0.4, 2.2, 1000, 1) == \
        mc_covariance("tanh", WeightPrior(Gaussian(), Gaussian()), 2.2, 0.4, 1000, 1)


def test_delta_prior_is_exact():
    prior = WeightPrior(Delta(0.7), Delta(0.2), sigma_b=0.3, amplitude=1.5)
    exact = 0.3**2 + 1.5**2 * math.tanh(0.7 * 1.1 + 0.2) * math.tanh(0.7 * -0.4 + 0.2)
    for n in (1, 10, 1000):
        assert mc_covariance("tanh", prior, 1.1, -0.4, n, seed=n) == pytest.approx(exact, rel=1e-15)


def test_correspondence_report_small_error():
    rep = correspondence_check("sin", PRIOR, Cosine(ALPHA), GRID, 10**5, seed=0)
    assert len(rep.mc_estimate) == 25
    assert rep.max_abs_error == np.max(np.abs(rep.mc_estimate - rep.kernel_value))
    assert rep.max_abs_error < 0.03


def test_correspondence_detects_relu_mismatch():
    rep = correspondence_check("relu", WeightPrior(Gaussian(1.0), Gaussian(1.0)), Cosine(ALPHA), GRID, 10**5, 0)
    assert rep.max_abs_error > 0.1


def test_mercer_target_gives_same_report():
    a = correspondence_check("sin", PRIOR, Cosine(ALPHA), GRID, 10**4, 3)
    b = correspondence_check("sin", PRIOR, cosine_mercer_pair(ALPHA), GRID, 10**4, 3)
    np.testing.assert_array_equal(a.mc_estimate, b.mc_estimate)
    np.testing.assert_allclose(a.kernel_value, b.kernel_value, atol=1e-12)


def test_error_decreases_with_samples():
    err = {n: np.mean([correspondence_check("sin", PRIOR, Cosine(ALPHA), GRID, n, s).max_abs_error
                       for s in range(10)]) for n in (10**3, 10**4, 10**5)}
    assert err[10**3] > err[10**4] > err[10**5]
    assert 5 <= err[10**3] / err[10**5] <= 20


def test_transformed_matched_is_exactly_zero():
    op = LinearOperator.helmholtz(ALPHA)
    for seed in range(5):
        for n in (1, 100, 10**4):
            rep = transformed_correspondence(op, "sin", PRIOR, GRID, n, seed)
            assert np.all(rep.samples == 0.0)
            assert np.all(rep.mc_estimate == 0.0)
            assert rep.max_abs_error == 0.0


def test_transformed_identity_reduces():
    a = transformed_correspondence(LinearOperator.identity(), "sin", PRIOR, GRID, 5000, 2, target=Cosine(ALPHA))
    b = correspondence_check("sin", PRIOR, Cosine(ALPHA), GRID, 5000, 2)
    np.testing.assert_array_equal(a.mc_estimate, b.mc_estimate)
    np.testing.assert_array_equal(a.kernel_value, b.kernel_value)


def test_transformed_mismatched_frequency():
    op = LinearOperator.helmholtz(0.51)
    prior = WeightPrior(Delta(1.0), Uniform(0, 2 * math.pi))
    x, xp, a = 0.7, 2.9, 1.234
    # hand-computed single sample: (nu^2 - w^2)^2 sin(w x + a) sin(w x' + a), times A^2
    single = WeightPrior(Delta(1.0), Delta(a))
    one = transformed_correspondence(op, "sin", single, [(x, xp)], 1, 0)
    hand = 2.0 * (0.51**2 - 1.0) ** 2 * math.sin(x + a) * math.sin(xp + a)
    assert one.mc_estimate[0] == pytest.approx(hand, rel=1e-12)
    rep = transformed_correspondence(op, "sin", prior, [(x, xp), (x, x)], 10**5, 0)
    expected = (0.51**2 - 1.0) ** 2 * np.cos(np.array([x - xp, 0.0]))
    np.testing.assert_allclose(rep.mc_estimate, expected, atol=0.01)
    assert np.all(np.abs(rep.mc_estimate) > 0)


def test_transformed_relu_rejected():
    with pytest.raises(ValueError):
        transformed_correspondence(LinearOperator.laplace(), "relu", PRIOR, GRID, 10, 0)


def test_report_csv(tmp_path):
    rep = correspondence_check("sin", PRIOR, Cosine(ALPHA), GRID, 1000, 0)
    rep.save(tmp_path / "c.csv")
    cols, _ = read_csv(tmp_path / "c.csv")
    assert list(cols) == ["x", "x_prime", "mc", "kernel", "abs_error"]
    assert cols["mc"].tobytes() == rep.mc_estimate.tobytes()


def test_empty_grid():
    with pytest.raises(ValueError):
        correspondence_check("sin", PRIOR, Cosine(ALPHA), [], 10, 0)
    assert ZERO_KERNEL(np.zeros(3), np.ones(3)).tolist() == [0.0, 0.0, 0.0]
