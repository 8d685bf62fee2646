"""Command-line entry point: ``physact run|check-correspondence|gp-posterior|boogaart|plot``.

On failure a single JSON line ``{"error": ..., "message": ...}`` goes to stderr
and the exit code is 1.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import data as data_mod
from .csvio import write_csv
from .experiment import ExperimentConfig, run_experiment
from .gp import GpModel, posterior
from .kernels import Cosine, SquaredExponential, boogaart_residual
from .operators import LinearOperator
from .svg import Series, emit_svg
from .training import TrainTrace
from .width_limit import WeightPrior, correspondence_check, square_grid


def _run(args):
    cfg = ExperimentConfig.load(args.config) if args.config else ExperimentConfig()
    overrides = {
        ("data", "omega"): args.omega,
        ("train", "lam"): args.lam,
        ("train", "iterations"): args.iterations,
        ("experiment", "seed"): args.seed,
        ("experiment", "out"): args.out,
    }
    for (section, key), value in overrides.items():
        if value is not None:
            setattr(getattr(cfg, section), key, value)
    if args.omega is not None and args.nu is None:
        # the wave number follows the data frequency unless set explicitly
        cfg.operator.nu = args.omega
    if args.nu is not None:
        cfg.operator.nu = args.nu
    if args.learn_frequency:
        cfg.train.learn_frequency = True
    if args.variant and args.variant != "all":
        cfg.experiment.variants = [args.variant]
    cfg.validate()
    report = run_experiment(cfg)
    print(json.dumps({"out": str(report.out_dir), "variants": report.summary["variants"]}, indent=2))


def _check_correspondence(args):
    lo, hi = args.domain
    report = correspondence_check("sin", WeightPrior.helmholtz(args.alpha), Cosine(args.alpha),
                                  square_grid(lo, hi, args.grid_size), args.n_samples, args.seed)
    if args.out:
        report.save(args.out)
    print(json.dumps({"max_abs_error": report.max_abs_error, "n_samples": args.n_samples, "seed": args.seed}))


def _gp_posterior(args):
    lo, hi = args.domain
    ds = data_mod.generate(args.omega, args.phi, args.n_points, args.noise_frac, (lo, hi), args.seed)
    query = np.linspace(lo, hi, args.n_dense)
    post = posterior(GpModel(Cosine(args.alpha), args.noise_variance), ds.xs, ds.ys, query)
    if args.out:
        write_csv(args.out, {"x": query, "mean": post.mean, "std": post.std})
    rmse = float(np.sqrt(np.mean((post.mean - ds.truth(query)) ** 2)))
    print(json.dumps({"truth_rmse": rmse, "max_std": float(post.std.max())}))


def _boogaart(args):
    kernel = Cosine(args.alpha) if args.kernel == "cosine" else SquaredExponential(args.lengthscale, args.variance)
    op = LinearOperator.helmholtz(args.alpha if args.nu is None else args.nu)
    pts = np.linspace(args.domain[0], args.domain[1], args.n_points)
    res = boogaart_residual(op, kernel, pts, path=args.path)
    print(json.dumps({"kernel": kernel.to_config(), "operator": op.to_config(), "path": args.path,
                      "residual": res}))


def _plot(args):
    series = []
    for path in args.traces:
        tr = TrainTrace.load(path)
        series.append(Series(Path(path).stem, np.array(tr.iteration, dtype=float),
                             np.array(getattr(tr, args.column))))
    text, warnings = emit_svg(series, title=args.column, xlabel="iteration", ylabel=args.column,
                              log_y=not args.linear)
    Path(args.out).write_text(text)
    for w in warnings:
        print(json.dumps({"warning": w}), file=sys.stderr)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="physact")
    sub = p.add_subparsers(dest="command", required=True)
    domain = dict(nargs=2, type=float, default=[0.0, 4 * math.pi], metavar=("LO", "HI"))

    r = sub.add_parser("run", help="train the three network variants and write all artifacts")
    r.add_argument("--config", type=Path)
    r.add_argument("--omega", type=float)
    r.add_argument("--nu", type=float, help="wave number (defaults to --omega when that is given)")
    r.add_argument("--lambda", dest="lam", type=float)
    r.add_argument("--iterations", type=int)
    r.add_argument("--seed", type=int)
    r.add_argument("--variant", choices=["all", "vanilla", "informed", "constrained"], default="all")
    r.add_argument("--learn-frequency", action="store_true",
                   help="let the constrained net train its input weights (breaks exact constraint)")
    r.add_argument("--out")
    r.set_defaults(func=_run)

    c = sub.add_parser("check-correspondence", help="Monte-Carlo covariance of sine neurons vs cosine kernel")
    c.add_argument("--alpha", type=float, default=0.51)
    c.add_argument("--n-samples", type=int, default=100_000)
    c.add_argument("--grid-size", type=int, default=5)
    c.add_argument("--domain", **domain)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--out")
    c.set_defaults(func=_check_correspondence)

    g = sub.add_parser("gp-posterior", help="GP regression with the cosine kernel on generated data")
    g.add_argument("--alpha", type=float, default=0.51)
    g.add_argument("--noise-variance", type=float, default=0.04)
    g.add_argument("--omega", type=float, default=0.51)
    g.add_argument("--phi", type=float, default=0.50001)
    g.add_argument("--n-points", type=int, default=11)
    g.add_argument("--noise-frac", type=float, default=0.2)
    g.add_argument("--n-dense", type=int, default=400)
    g.add_argument("--domain", **domain)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out")
    g.set_defaults(func=_gp_posterior)

    b = sub.add_parser("boogaart", help="max diagonal |O_x O_x' k| of a kernel")
    b.add_argument("--kernel", choices=["cosine", "squared_exponential"], default="cosine")
    b.add_argument("--alpha", type=float, default=0.51)
    b.add_argument("--nu", type=float)
    b.add_argument("--lengthscale", type=float, default=1.0)
    b.add_argument("--variance", type=float, default=1.0)
    b.add_argument("--path", choices=["auto", "analytic", "fd"], default="auto")
    b.add_argument("--n-points", type=int, default=50)
    b.add_argument("--domain", **domain)
    b.set_defaults(func=_boogaart)

    pl = sub.add_parser("plot", help="render trace CSVs as an SVG convergence panel")
    pl.add_argument("traces", nargs="+")
    pl.add_argument("--column", choices=["data_loss", "physics_loss", "total_loss"], default="data_loss")
    pl.add_argument("--linear", action="store_true")
    pl.add_argument("--out", required=True)
    pl.set_defaults(func=_plot)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except Exception as exc:  # noqa: BLE001 - reported as a machine-readable line
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
