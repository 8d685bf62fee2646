"""Noisy observations of the sinusoidal Helmholtz solution ``sin(omega x + phi)``."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .csvio import read_csv, write_csv
from .rng import make_rng

_NOISE_STREAM = 303


@dataclass
class Dataset:
    xs: np.ndarray
    ys: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.xs = np.asarray(self.xs, dtype=float)
        self.ys = np.asarray(self.ys, dtype=float)
        if self.xs.shape != self.ys.shape or self.xs.ndim != 1:
            raise ValueError("xs and ys must be 1-d arrays of equal length")
        if self.xs.size and np.any(np.diff(self.xs) <= 0):
            raise ValueError("xs must be strictly increasing")

    def __len__(self):
        return self.xs.size

    def truth(self, x):
        return clean_signal(self.meta["omega"], self.meta["phi"], x)

    def save(self, path):
        comments = [json.dumps(self.meta, sort_keys=True)]
        write_csv(path, {"x": self.xs, "y": self.ys}, comments=comments)

    @classmethod
    def load(cls, path):
        cols, comments = read_csv(path)
        meta = json.loads(comments[0]) if comments else {}
        return cls(cols["x"], cols["y"], meta)


def clean_signal(omega: float, phi: float, x):
    return np.sin(omega * np.asarray(x, dtype=float) + phi)


def generate(omega: float = 0.51, phi: float = 0.50001, n_points: int = 11, noise_frac: float = 0.2,
             domain: tuple[float, float] = (0.0, 4 * math.pi), seed: int = 0) -> Dataset:
    lo, hi = (float(d) for d in domain)
    if n_points < 2:
        raise ValueError(f"need at least 2 points, got {n_points}")
    if not lo < hi:
        raise ValueError(f"empty domain [{lo}, {hi}]")
    if noise_frac < 0:
        raise ValueError("noise fraction must be non-negative")
    xs = np.linspace(lo, hi, n_points)
    noise = make_rng(seed, _NOISE_STREAM).normal(0.0, noise_frac, n_points)
    ys = clean_signal(omega, phi, xs) + noise
    meta = {"omega": omega, "phi": phi, "noise_frac": noise_frac, "seed": seed, "domain": [lo, hi]}
    return Dataset(xs, ys, meta)
