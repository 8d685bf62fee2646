"""Run the default three-way Helmholtz comparison and render both figure panels.

    python scripts/reproduce_figure1.py --out runs/figure1 [--seed 0] [--iterations 2000]
"""
import argparse
import json

from physact.experiment import ExperimentConfig, run_experiment


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--out", default="runs/figure1")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--iterations", type=int, default=2000)
    args = p.parse_args()

    cfg = ExperimentConfig()
    cfg.experiment.out = args.out
    cfg.experiment.seed = args.seed
    cfg.train.iterations = args.iterations
    report = run_experiment(cfg)
    for name, entry in report.summary["variants"].items():
        print(f"{name:12s} data_loss={entry['final_data_loss']:.4g} physics_loss={entry['final_physics_loss']:.4g} "
              f"truth_rmse={entry['truth_rmse']:.4g}")
    print(json.dumps([str(f) for f in report.figures]))


if __name__ == "__main__":
    main()
