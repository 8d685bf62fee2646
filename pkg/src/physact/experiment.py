"""The three-way Helmholtz comparison: vanilla, physics-informed and physics-constrained nets.

Configuration is a TOML document with one flat table per concern; unknown keys
are rejected.  ``run_experiment`` writes every artifact into one directory and
echoes the fully resolved configuration next to them.
"""
from __future__ import annotations

import copy
import json
import math
import sys
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np
import tomli_w

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from . import data as data_mod
from .csvio import read_csv, write_csv
from .gp import GpModel, posterior
from .kernels import Cosine
from .nn import forward
from .operators import LinearOperator
from .svg import Series, emit_svg
from .training import Adam, Sgd, TrainConfig, TrainTrace, Variant, train
from .width_limit import WeightPrior, correspondence_check, square_grid

VARIANT_ORDER = (Variant.VANILLA, Variant.INFORMED, Variant.CONSTRAINED)
VARIANT_LABELS = {
    Variant.VANILLA: "Vanilla",
    Variant.INFORMED: "Physics-informed",
    Variant.CONSTRAINED: "Physics-constrained",
}
VARIANT_COLORS = {Variant.VANILLA: "#1f77b4", Variant.INFORMED: "#2ca02c", Variant.CONSTRAINED: "#d62728"}


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentSection:
    seed: int = 0
    out: str = "runs/helmholtz"
    variants: list = field(default_factory=lambda: [v.value for v in VARIANT_ORDER])
    n_dense: int = 400


@dataclass
class DataSection:
    omega: float = 0.51
    phi: float = 0.50001
    n_points: int = 11
    noise_frac: float = 0.2
    domain: list = field(default_factory=lambda: [0.0, 4 * math.pi])


@dataclass
class OperatorSection:
    kind: str = "helmholtz"
    nu: float = 0.51


@dataclass
class TrainSection:
    n_hidden: int = 50
    iterations: int = 2000
    optimizer: str = "adam"
    lr: float = 0.02
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    lam: float = 0.1
    n_pivots: int = 100
    learn_frequency: bool = False


@dataclass
class GpSection:
    enabled: bool = True
    alpha: float = 0.51
    noise_variance: float = 0.04


@dataclass
class CorrespondenceSection:
    enabled: bool = True
    alpha: float = 0.51
    n_samples: int = 100_000
    grid_size: int = 5


@dataclass
class ExperimentConfig:
    experiment: ExperimentSection = field(default_factory=ExperimentSection)
    data: DataSection = field(default_factory=DataSection)
    operator: OperatorSection = field(default_factory=OperatorSection)
    train: TrainSection = field(default_factory=TrainSection)
    gp: GpSection = field(default_factory=GpSection)
    correspondence: CorrespondenceSection = field(default_factory=CorrespondenceSection)

    # TOML key "lambda" is a Python keyword; it maps onto TrainSection.lam
    _ALIASES = {("train", "lambda"): "lam"}

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentConfig":
        cfg = cls()
        for section, values in doc.items():
            if section not in {f.name for f in fields(cls)}:
                raise ConfigError(f"unknown config section [{section}]")
            if not isinstance(values, dict):
                raise ConfigError(f"[{section}] must be a table")
            target = getattr(cfg, section)
            known = {f.name for f in fields(target)}
            internal = {name for (s, _), name in cls._ALIASES.items() if s == section}
            for key, value in values.items():
                name = cls._ALIASES.get((section, key), key)
                if name not in known or key in internal:
                    raise ConfigError(f"unknown config key {section}.{key}")
                setattr(target, name, value)
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        with open(path, "rb") as fh:
            try:
                doc = tomllib.load(fh)
            except tomllib.TOMLDecodeError as exc:
                raise ConfigError(f"{path}: {exc}") from exc
        return cls.from_dict(doc)

    def to_dict(self) -> dict:
        doc = {}
        for f in fields(self):
            section = asdict(getattr(self, f.name))
            for (sec, alias), name in self._ALIASES.items():
                if sec == f.name:
                    section[alias] = section.pop(name)
            doc[f.name] = section
        return doc

    def dumps(self) -> str:
        return tomli_w.dumps(self.to_dict())

    def validate(self):
        for v in self.experiment.variants:
            Variant(v)
        if self.train.optimizer not in ("adam", "sgd"):
            raise ConfigError(f"unknown optimizer {self.train.optimizer!r}")
        if len(self.data.domain) != 2:
            raise ConfigError("data.domain must be [lo, hi]")
        LinearOperator(self.operator.kind, self.operator.nu)

    @property
    def operator_value(self) -> LinearOperator:
        return LinearOperator(self.operator.kind, self.operator.nu)

    def train_config(self, variant: Variant) -> TrainConfig:
        t = self.train
        opt = Adam(t.lr, t.beta1, t.beta2, t.eps) if t.optimizer == "adam" else Sgd(t.lr)
        lo, hi = self.data.domain
        return TrainConfig(
            variant=variant,
            lam=t.lam,
            optimizer=opt,
            iterations=t.iterations,
            n_hidden=t.n_hidden,
            pivots=np.linspace(lo, hi, t.n_pivots),
            operator=self.operator_value,
            seed=self.experiment.seed,
            learn_frequency=t.learn_frequency,
        )


@dataclass
class ExperimentReport:
    out_dir: Path
    traces: dict
    solutions: dict
    checkpoints: dict
    correspondence: Path | None
    gp_posterior: Path | None
    figures: list
    summary: dict


def read_solution(path):
    cols, _ = read_csv(path)
    return cols


def _write_svg(path, *args, **kwargs):
    text, warnings = emit_svg(*args, **kwargs)
    Path(path).write_text(text)
    return warnings


def run_experiment(config: ExperimentConfig) -> ExperimentReport:
    out = Path(config.experiment.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.toml").write_text(config.dumps())

    d = config.data
    dataset = data_mod.generate(d.omega, d.phi, d.n_points, d.noise_frac, tuple(d.domain), config.experiment.seed)
    dataset.save(out / "data.csv")
    dense = np.linspace(d.domain[0], d.domain[1], config.experiment.n_dense)
    truth = dataset.truth(dense)

    summary = {"variants": {}, "warnings": []}
    traces, solutions, checkpoints = {}, {}, {}
    variants = [v for v in VARIANT_ORDER if v.value in config.experiment.variants]
    for variant in variants:
        tcfg = config.train_config(variant)
        net, trace = train(tcfg, dataset, raise_on_divergence=False)
        name = variant.value
        traces[name] = out / f"trace_{name}.csv"
        trace.save(traces[name])
        checkpoints[name] = out / f"net_{name}.json"
        checkpoints[name].write_text(net.to_json())
        with np.errstate(over="ignore", invalid="ignore"):
            fx = forward(net, dense)
            rmse = float(np.sqrt(np.mean((fx - truth) ** 2)))
        solutions[name] = out / f"solution_{name}.csv"
        write_csv(solutions[name], {"x": dense, "f": fx, "truth": truth})
        entry = {
            "iterations_run": trace.iteration[-1] if len(trace) else None,
            "final_data_loss": trace.data_loss[-1] if len(trace) else None,
            "final_physics_loss": trace.physics_loss[-1] if len(trace) else None,
            "final_total_loss": trace.total_loss[-1] if len(trace) else None,
            "max_physics_loss": max(trace.physics_loss) if len(trace) else None,
            "truth_rmse": rmse if math.isfinite(rmse) else None,
            "error": trace.error,
        }
        summary["variants"][name] = entry

    figures = []
    plotted = [v for v in variants if len(TrainTrace.load(traces[v.value]))]
    if plotted:
        conv = []
        for v in plotted:
            tr = TrainTrace.load(traces[v.value])
            conv.append(Series(VARIANT_LABELS[v], np.array(tr.iteration, dtype=float),
                               np.array(tr.data_loss), VARIANT_COLORS[v]))
        summary["warnings"] += _write_svg(out / "convergence.svg", conv, title="Convergence",
                                          xlabel="iteration", ylabel="data loss", log_y=True)
        figures.append(out / "convergence.svg")
        sol = [Series("truth", dense, truth, "#000000"),
               Series("data", dataset.xs, dataset.ys, "#7f7f7f", markers=True)]
        for v in plotted:
            cols = read_solution(solutions[v.value])
            if np.all(np.isfinite(cols["f"])):
                sol.append(Series(VARIANT_LABELS[v], cols["x"], cols["f"], VARIANT_COLORS[v]))
        summary["warnings"] += _write_svg(out / "solutions.svg", sol, title="Learned solutions",
                                          xlabel="x", ylabel="f(x)")
        figures.append(out / "solutions.svg")

    gp_path = None
    if config.gp.enabled:
        post = posterior(GpModel(Cosine(config.gp.alpha), config.gp.noise_variance),
                         dataset.xs, dataset.ys, dense)
        gp_path = out / "gp_posterior.csv"
        write_csv(gp_path, {"x": dense, "mean": post.mean, "std": post.std})
        summary["gp_truth_rmse"] = float(np.sqrt(np.mean((post.mean - truth) ** 2)))

    corr_path = None
    if config.correspondence.enabled:
        c = config.correspondence
        report = correspondence_check("sin", WeightPrior.helmholtz(c.alpha), Cosine(c.alpha),
                                      square_grid(d.domain[0], d.domain[1], c.grid_size),
                                      c.n_samples, config.experiment.seed)
        corr_path = out / "correspondence.csv"
        report.save(corr_path)
        summary["correspondence_max_abs_error"] = report.max_abs_error

    files = {
        "config": "config.toml",
        "data": "data.csv",
        "traces": {k: p.name for k, p in traces.items()},
        "solutions": {k: p.name for k, p in solutions.items()},
        "checkpoints": {k: p.name for k, p in checkpoints.items()},
        "figures": [p.name for p in figures],
        "gp_posterior": gp_path.name if gp_path else None,
        "correspondence": corr_path.name if corr_path else None,
    }
    summary["files"] = files
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return ExperimentReport(out, traces, solutions, checkpoints, corr_path, gp_path, figures, summary)


@dataclass
class SweepRun:
    net: object
    trace: TrainTrace
    data: data_mod.Dataset


def seed_sweep(seeds, config: ExperimentConfig | None = None) -> dict:
    """Train every configured variant for each seed: ``{seed: {variant: SweepRun}}``.

    Each seed draws its own dataset and initialisation, shared by all variants.
    """
    base = ExperimentConfig() if config is None else config
    d = base.data
    out = {}
    for seed in seeds:
        cfg = copy.deepcopy(base)
        cfg.experiment.seed = seed
        dataset = data_mod.generate(d.omega, d.phi, d.n_points, d.noise_frac, tuple(d.domain), seed)
        out[seed] = {}
        for variant in VARIANT_ORDER:
            if variant.value in cfg.experiment.variants:
                net, trace = train(cfg.train_config(variant), dataset, raise_on_divergence=False)
                out[seed][variant.value] = SweepRun(net, trace, dataset)
    return out
