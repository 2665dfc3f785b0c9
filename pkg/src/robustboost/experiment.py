"""Benchmark harness: seeded noise sweeps, hyperparameter grid search on the
noisy training data, and rank reporting.

Seed derivation: every random choice draws from a seed derived from the
master seed via numpy SeedSequence spawn keys, one fixed integer tag per
purpose, so any subset of the sweep reproduces in isolation:

    split seed  = derive(master, TAG_SPLIT, repeat)
    noise seed  = derive(master, TAG_NOISE, gamma_index, repeat)
    tune seed   = derive(master, TAG_TUNE,  gamma_index, repeat, method_index)
    model seed  = derive(master, TAG_MODEL, gamma_index, repeat, method_index)
"""

from __future__ import annotations

import csv
import itertools
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import synthetic
from .booster import BoosterConfig, fit, predict_label, predict_proba
from .data import TabularDataset, load_csv, train_test_split
from .losses import LossSpec
from .metrics import accuracy, aucpr
from .noise import Flip, NoiseSpec, inject_binary, inject_multiclass, write_flip_log
from .tree import TreeConfig

TAG_SPLIT, TAG_NOISE, TAG_TUNE, TAG_MODEL = 1, 2, 3, 4

DEFAULT_NOISE_LEVELS = (0.0, 0.1, 0.2, 0.3, 0.4)
DEFAULT_GRID_R = (0.5, 1.0, 2.0)
DEFAULT_GRID_Q = (0.3, 0.5, 0.7)
DEFAULT_GRID_LR = (0.05, 0.1)
DEFAULT_GRID_ROUNDS = (100, 300)

# effectively-zero q used when a grid pins "q -> 0" (focal-loss ablation)
Q_ZERO = 1e-6


def derive_seed(master: int, *key: int) -> int:
    ss = np.random.SeedSequence(master, spawn_key=tuple(int(k) for k in key))
    return int(ss.generate_state(1)[0])


@dataclass(frozen=True)
class MethodSpec:
    """A loss family plus the hyperparameter grid searched for it."""

    name: str
    family: str
    grid_r: tuple = (0.0,)
    grid_q: tuple = (0.5,)
    grid_lr: tuple = DEFAULT_GRID_LR
    grid_rounds: tuple = DEFAULT_GRID_ROUNDS
    eta: float = 1e-2
    sce_alpha: float = 1.0
    sce_beta: float = 1.0

    def candidates(self):
        """Canonically ordered (LossSpec, lr, rounds) grid."""
        out = []
        for r, q, lr, rounds in itertools.product(
                self.grid_r, self.grid_q, self.grid_lr, self.grid_rounds):
            spec = LossSpec(family=self.family, r=r, q=q, eta=self.eta,
                            sce_alpha=self.sce_alpha, sce_beta=self.sce_beta)
            out.append((spec, lr, rounds))
        return out


def default_method(name: str) -> MethodSpec:
    """Grid over only the parameters the family actually uses."""
    base = dict(name=name, family=name)
    if name == "rfl":
        return MethodSpec(grid_r=DEFAULT_GRID_R, grid_q=DEFAULT_GRID_Q, **base)
    if name == "gce":
        return MethodSpec(grid_q=DEFAULT_GRID_Q, **base)
    if name == "fl":
        return MethodSpec(grid_r=DEFAULT_GRID_R, **base)
    if name in ("cce", "mae", "sce", "nce"):
        return MethodSpec(**base)
    raise ValueError(f"unknown method {name!r}")


@dataclass
class ExperimentConfig:
    dataset: str = "synthetic:imbalanced"
    label_column: str = "label"
    noise_levels: tuple = DEFAULT_NOISE_LEVELS
    repeats: int = 5
    fraction: float = 0.8
    stratified: bool = True
    methods: tuple = ("rfl", "cce")
    method_specs: dict = field(default_factory=dict)  # name -> MethodSpec overrides
    tree: TreeConfig = field(default_factory=TreeConfig)
    tune_fraction: float = 0.75
    master_seed: int = 0
    threads: int = 1

    def __post_init__(self):
        for g in self.noise_levels:
            if not 0.0 <= g < 0.5:
                raise ValueError(f"noise level {g} outside [0, 0.5)")
        if self.repeats < 1:
            raise ValueError("repeats must be >= 1")

    def resolve_method(self, name: str) -> MethodSpec:
        return self.method_specs.get(name, default_method(name))


def load_experiment_dataset(cfg: ExperimentConfig, synthetic_seed: int = 12345) -> TabularDataset:
    if cfg.dataset.startswith("synthetic:"):
        return synthetic.make(cfg.dataset.split(":", 1)[1], seed=synthetic_seed)
    return load_csv(cfg.dataset, label_column=cfg.label_column)


def _inject(labels, n_classes, rate, seed):
    if rate == 0.0:
        return np.asarray(labels).copy(), []
    if n_classes == 2:
        spec = NoiseSpec(rate=rate, protocol="binary_pairflip", seed=seed)
        return inject_binary(labels, spec)
    spec = NoiseSpec(rate=rate, protocol="multiclass_pairflip", seed=seed)
    return inject_multiclass(labels, n_classes, spec)


def _score(model, data) -> float:
    if data.n_classes == 2:
        return aucpr(predict_proba(model, data)[:, 1], data.labels)
    return accuracy(predict_label(model, data), data.labels)


def fit_tuned(train: TabularDataset, method: MethodSpec, tree: TreeConfig,
              n_classes: int, tune_fraction: float, tune_seed: int, model_seed: int):
    """Grid-search on an internal split of (possibly noisy) training data,
    then refit the winner on the full training set.
    """
    candidates = method.candidates()
    if len(candidates) > 1:
        try:
            plan = train_test_split(train, tune_fraction, seed=tune_seed, stratified=True)
        except Exception:
            plan = train_test_split(train, tune_fraction, seed=tune_seed, stratified=False)
        sub_train = train.subset(plan.train_indices)
        sub_valid = train.subset(plan.test_indices)
        best = None
        for i, (spec, lr, rounds) in enumerate(candidates):
            cfg = BoosterConfig(loss=spec, tree=tree, learning_rate=lr,
                                n_rounds=rounds, n_classes=n_classes, seed=model_seed)
            score = _score(fit(sub_train, cfg), sub_valid)
            if best is None or score > best[0]:
                best = (score, i)
        spec, lr, rounds = candidates[best[1]]
    else:
        spec, lr, rounds = candidates[0]
    cfg = BoosterConfig(loss=spec, tree=tree, learning_rate=lr,
                        n_rounds=rounds, n_classes=n_classes, seed=model_seed)
    return fit(train, cfg), cfg


@dataclass
class SweepRow:
    dataset: str
    method: str
    gamma: float
    repeat: int
    metric: str
    value: float
    params: str


def run_sweep(cfg: ExperimentConfig, out_dir: str, methods=None,
              dataset: TabularDataset = None, dataset_name: str = None):
    """Full noise sweep. Writes results.csv, summary.csv and per-cell flip
    logs (with dataset-global sample indices) into ``out_dir``.
    """
    os.makedirs(out_dir, exist_ok=True)
    if dataset is None:
        dataset = load_experiment_dataset(cfg)
    if dataset_name is None:
        dataset_name = cfg.dataset
    if methods is None:
        methods = [cfg.resolve_method(m) for m in cfg.methods]
    n_classes = dataset.n_classes
    metric_name = "aucpr" if n_classes == 2 else "accuracy"

    cells = [
        (gi, gamma, rep, mi, method)
        for gi, gamma in enumerate(cfg.noise_levels)
        for rep in range(cfg.repeats)
        for mi, method in enumerate(methods)
    ]

    flip_logs = {}

    def run_cell(cell):
        gi, gamma, rep, mi, method = cell
        plan = train_test_split(dataset, cfg.fraction,
                                seed=derive_seed(cfg.master_seed, TAG_SPLIT, rep),
                                stratified=cfg.stratified)
        train = dataset.subset(plan.train_indices)
        noisy, log = _inject(train.labels, n_classes, gamma,
                             derive_seed(cfg.master_seed, TAG_NOISE, gi, rep))
        global_log = [Flip(int(plan.train_indices[f.index]), f.old_label, f.new_label)
                      for f in log]
        train = train.with_labels(noisy)
        model, used_cfg = fit_tuned(
            train, method, cfg.tree, n_classes, cfg.tune_fraction,
            tune_seed=derive_seed(cfg.master_seed, TAG_TUNE, gi, rep, mi),
            model_seed=derive_seed(cfg.master_seed, TAG_MODEL, gi, rep, mi))
        test = dataset.subset(plan.test_indices)
        value = _score(model, test)
        params = (f"family={used_cfg.loss.family};r={used_cfg.loss.r};"
                  f"q={used_cfg.loss.q};lr={used_cfg.learning_rate};"
                  f"rounds={used_cfg.n_rounds}")
        row = SweepRow(dataset_name, method.name, gamma, rep, metric_name,
                       value, params)
        return cell, row, global_log, set(plan.test_indices.tolist())

    results = []
    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as ex:
            outputs = list(ex.map(run_cell, cells))
    else:
        outputs = [run_cell(c) for c in cells]

    for (gi, gamma, rep, mi, method), row, global_log, test_idx in outputs:
        results.append(row)
        key = (gi, rep)
        if key not in flip_logs:
            flip_logs[key] = (gamma, rep, global_log, test_idx)

    results.sort(key=lambda r: (r.dataset, r.method, r.gamma, r.repeat))
    _write_results(results, os.path.join(out_dir, "results.csv"))
    _write_summary(results, os.path.join(out_dir, "summary.csv"))
    for (gi, rep), (gamma, _, log, test_idx) in sorted(flip_logs.items()):
        write_flip_log(log, os.path.join(out_dir, f"fliplog_g{gi}_r{rep}.csv"))
        if {f.index for f in log} & test_idx:
            raise AssertionError("noise was applied to test indices")
    return results


def run_ablation(cfg: ExperimentConfig, out_dir: str, dataset=None, dataset_name=None):
    """Sweep three variants with everything else fixed: the full focal robust
    loss, its r=0 degeneration, and its q->0 degeneration.
    """
    base = cfg.resolve_method("rfl")
    variants = [
        replace(base, name="rfl_full"),
        replace(base, name="rfl_r0", grid_r=(0.0,)),
        replace(base, name="rfl_q0", grid_q=(Q_ZERO,)),
    ]
    return run_sweep(cfg, out_dir, methods=variants, dataset=dataset,
                     dataset_name=dataset_name)


def _write_results(rows, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["dataset", "method", "gamma", "repeat", "metric", "value", "params"])
        for r in rows:
            writer.writerow([r.dataset, r.method, repr(r.gamma), r.repeat,
                             r.metric, repr(r.value), r.params])


def _write_summary(rows, path):
    cells = {}
    for r in rows:
        cells.setdefault((r.dataset, r.method, r.gamma, r.metric), []).append(r.value)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["dataset", "method", "gamma", "metric", "mean_value"])
        for (ds, m, g, metric), vals in sorted(cells.items()):
            writer.writerow([ds, m, repr(g), metric, repr(float(np.mean(vals)))])


def read_results(path):
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        for rec in csv.DictReader(fh):
            rows.append(SweepRow(rec["dataset"], rec["method"], float(rec["gamma"]),
                                 int(rec["repeat"]), rec["metric"],
                                 float(rec["value"]), rec["params"]))
    return rows
