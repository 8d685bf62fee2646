"""Monte-Carlo error of the sine-network covariance against the cosine kernel versus sample count.

    python scripts/correspondence_convergence.py [--alpha 0.51] [--seeds 10]

Mean max-abs error over seeds should fall like n^(-1/2).
"""
import argparse
import math

import numpy as np

from physact.kernels import Cosine
from physact.width_limit import WeightPrior, correspondence_check, square_grid


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--alpha", type=float, default=0.51)
    p.add_argument("--seeds", type=int, default=10)
    p.add_argument("--grid-size", type=int, default=5)
    args = p.parse_args()

    prior = WeightPrior.helmholtz(args.alpha)
    grid = square_grid(0.0, 4 * math.pi, args.grid_size)
    prev = None
    for n in (10**2, 10**3, 10**4, 10**5):
        err = np.mean([correspondence_check("sin", prior, Cosine(args.alpha), grid, n, s).max_abs_error
                       for s in range(args.seeds)])
        ratio = "" if prev is None else f"  (x{prev / err:.2f}, ideal x{math.sqrt(10):.2f})"
        print(f"n={n:>7d}  mean max_abs_error={err:.5f}{ratio}")
        prev = err


if __name__ == "__main__":
    main()
