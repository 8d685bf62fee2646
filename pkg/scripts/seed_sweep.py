"""Final losses and truth error of all three variants over a range of seeds.

    python scripts/seed_sweep.py [--seeds 10] [--out sweep.csv]

Prints one row per seed and the win counts of the constrained variant, both on
final data loss and on mean squared distance to the clean signal.
"""
import argparse
import math

import numpy as np

from physact.csvio import write_csv
from physact.experiment import seed_sweep
from physact.nn import forward

VARIANTS = ("vanilla", "informed", "constrained")


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--seeds", type=int, default=10)
    p.add_argument("--out")
    args = p.parse_args()

    runs = seed_sweep(range(args.seeds))
    xs = np.linspace(0.0, 4 * math.pi, 400)
    cols = {"seed": np.arange(args.seeds)}
    for v in VARIANTS:
        cols[f"{v}_data_loss"] = np.array([runs[s][v].trace.data_loss[-1] for s in runs])
        cols[f"{v}_truth_mse"] = np.array([np.mean((forward(runs[s][v].net, xs) - runs[s][v].data.truth(xs)) ** 2)
                                           for s in runs])
    print("seed " + " ".join(f"{v[:5]}_loss {v[:5]}_mse" for v in VARIANTS))
    for i in range(args.seeds):
        print(f"{i:4d} " + " ".join(f"{cols[f'{v}_data_loss'][i]:10.4g} {cols[f'{v}_truth_mse'][i]:9.4g}"
                                    for v in VARIANTS))
    for metric in ("data_loss", "truth_mse"):
        c = cols[f"constrained_{metric}"]
        wins = {v: int(np.sum(c <= cols[f"{v}_{metric}"])) for v in ("vanilla", "informed")}
        print(f"constrained <= other on {metric}: {wins}")
    if args.out:
        write_csv(args.out, cols)


if __name__ == "__main__":
    main()
