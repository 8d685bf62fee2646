"""Neural networks that satisfy a linear ODE by construction.

Activations are derived from Gaussian-process kernels that the differential
operator annihilates; the modules here build those kernels, the matching
single-layer networks, and numerical checks of each link.
"""
from .operators import LinearOperator, FdScheme, apply_fd, apply_analytic
from .kernels import (Cosine, SquaredExponential, BasisFunction, MercerSum, gram,
                      mercer_from_basis, operator_transform, boogaart_residual)
from .gp import GpModel, sample_prior, posterior, pde_residual_of_sample
from .nn import ActivationKind, SingleLayerNet, forward, forward_dx2, constrained_net
from .data import Dataset, generate
from .training import TrainConfig, TrainTrace, Variant, train

__version__ = "0.1.0"
