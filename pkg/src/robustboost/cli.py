"""Command-line entry point.

Subcommands: train, predict, sweep, ablate, report. Configuration is a
plain-text key=value file (see README for the key list). Exit codes:
0 success, 1 runtime failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

import numpy as np

from .booster import (BoosterConfig, BoosterConfigError, deserialize, fit,
                      predict_label, predict_proba, serialize)
from .data import load_csv, train_test_split
from .experiment import (DEFAULT_GRID_LR, DEFAULT_GRID_Q, DEFAULT_GRID_R,
                         DEFAULT_GRID_ROUNDS, DEFAULT_NOISE_LEVELS,
                         ExperimentConfig, MethodSpec, default_method,
                         load_experiment_dataset, read_results, run_ablation,
                         run_sweep)
from .losses import LossConfigError, LossSpec
from .metrics import accuracy, aucpr, rank_methods
from .tree import TreeConfig

EXIT_OK, EXIT_RUNTIME, EXIT_CONFIG = 0, 1, 2


class ConfigError(ValueError):
    pass


def parse_config_file(path) -> dict:
    """key = value lines; '#' starts a comment; later keys override earlier."""
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, 1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ConfigError(f"{path}:{line_no}: expected key=value, got {line!r}")
                key, value = line.split("=", 1)
                out[key.strip()] = value.strip()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return out


def _get(cfg, key, default, conv=str):
    if key not in cfg:
        return default
    try:
        return conv(cfg[key])
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"config key {key!r}: cannot parse {cfg[key]!r}") from exc


def _floats(text):
    return tuple(float(t) for t in text.split(",") if t.strip())


def _ints(text):
    return tuple(int(t) for t in text.split(",") if t.strip())


def _bool(text):
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def loss_spec_from_config(cfg) -> LossSpec:
    return LossSpec(
        family=_get(cfg, "family", "rfl"),
        r=_get(cfg, "r", 1.0, float),
        q=_get(cfg, "q", 0.5, float),
        eta=_get(cfg, "eta", 1e-2, float),
        sce_alpha=_get(cfg, "sce_alpha", 1.0, float),
        sce_beta=_get(cfg, "sce_beta", 1.0, float),
        focal_wrap=_get(cfg, "focal_wrap", False, _bool),
    )


def tree_config_from_config(cfg) -> TreeConfig:
    return TreeConfig(
        lam=_get(cfg, "lam", 1.0, float),
        min_samples_leaf=_get(cfg, "min_samples_leaf", 1, int),
        min_sum_hessian=_get(cfg, "min_sum_hessian", 1e-3, float),
        min_gain=_get(cfg, "min_gain", 0.0, float),
        max_depth=_get(cfg, "max_depth", 6, int),
        max_leaves=_get(cfg, "max_leaves", 31, int),
    )


def experiment_from_config(cfg, seed, threads) -> ExperimentConfig:
    method_specs = {}
    for name in _get(cfg, "methods", "rfl,cce", lambda t: tuple(
            s.strip() for s in t.split(",") if s.strip())):
        base = default_method(name)
        overrides = {}
        if name == "rfl" or name == "fl":
            overrides["grid_r"] = _get(cfg, "grid_r", base.grid_r, _floats)
        if name in ("rfl", "gce"):
            overrides["grid_q"] = _get(cfg, "grid_q", base.grid_q, _floats)
        overrides["grid_lr"] = _get(cfg, "grid_lr", base.grid_lr, _floats)
        overrides["grid_rounds"] = _get(cfg, "grid_rounds", base.grid_rounds, _ints)
        method_specs[name] = MethodSpec(
            name=name, family=name,
            grid_r=overrides.get("grid_r", base.grid_r),
            grid_q=overrides.get("grid_q", base.grid_q),
            grid_lr=overrides["grid_lr"], grid_rounds=overrides["grid_rounds"],
            eta=_get(cfg, "eta", 1e-2, float))
    return ExperimentConfig(
        dataset=_get(cfg, "dataset", "synthetic:imbalanced"),
        label_column=_get(cfg, "label_column", "label"),
        noise_levels=_get(cfg, "noise_levels", DEFAULT_NOISE_LEVELS, _floats),
        repeats=_get(cfg, "repeats", 5, int),
        fraction=_get(cfg, "fraction", 0.8, float),
        stratified=_get(cfg, "stratified", True, _bool),
        methods=tuple(method_specs),
        method_specs=method_specs,
        tree=tree_config_from_config(cfg),
        tune_fraction=_get(cfg, "tune_fraction", 0.75, float),
        master_seed=seed,
        threads=threads,
    )


def _load_data(cfg, path_key="dataset"):
    exp_like = {"dataset": cfg.get(path_key, "synthetic:imbalanced"),
                "label_column": cfg.get("label_column", "label")}
    dummy = ExperimentConfig(dataset=exp_like["dataset"],
                             label_column=exp_like["label_column"])
    return load_experiment_dataset(dummy, synthetic_seed=int(cfg.get("synthetic_seed", 12345)))


def _task_metric(model, data):
    if data.n_classes == 2:
        return "aucpr", aucpr(predict_proba(model, data)[:, 1], data.labels)
    return "accuracy", accuracy(predict_label(model, data), data.labels)


def cmd_train(args) -> int:
    cfg = parse_config_file(args.config)
    data = _load_data(cfg)
    booster_cfg = BoosterConfig(
        loss=loss_spec_from_config(cfg),
        tree=tree_config_from_config(cfg),
        learning_rate=_get(cfg, "learning_rate", 0.1, float),
        n_rounds=_get(cfg, "n_rounds", 100, int),
        n_classes=data.n_classes,
        seed=args.seed,
        subsample=_get(cfg, "subsample", 1.0, float),
    )
    model = fit(data, booster_cfg)
    os.makedirs(args.out, exist_ok=True)
    with open(os.path.join(args.out, "model.json"), "w", encoding="utf-8") as fh:
        fh.write(serialize(model))
    with open(os.path.join(args.out, "train_log.csv"), "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["round", "train_loss"])
        for t, v in enumerate(model.train_loss_history):
            writer.writerow([t, repr(v)])
    metric, value = _task_metric(model, data)
    with open(os.path.join(args.out, "train_report.json"), "w", encoding="utf-8") as fh:
        json.dump({"metric": metric, "train_value": value,
                   "n_rounds": len(model.trees[0])}, fh, indent=1)
    print(f"trained {booster_cfg.loss.family} model: train {metric}={value:.6f}")
    return EXIT_OK


def cmd_predict(args) -> int:
    with open(args.model, encoding="utf-8") as fh:
        model = deserialize(fh.read())
    cfg = parse_config_file(args.config) if args.config else {}
    if args.data:
        cfg = dict(cfg, dataset=args.data)
    data = _load_data(cfg)
    proba = predict_proba(model, data)
    labels = np.argmax(proba, axis=1)
    os.makedirs(args.out, exist_ok=True)
    with open(os.path.join(args.out, "predictions.csv"), "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index"] + [f"proba_{k}" for k in range(proba.shape[1])] + ["label"])
        for i in range(proba.shape[0]):
            writer.writerow([i] + [repr(float(v)) for v in proba[i]] + [int(labels[i])])
    metric, value = _task_metric(model, data)
    with open(os.path.join(args.out, "predict_report.json"), "w", encoding="utf-8") as fh:
        json.dump({"metric": metric, "value": value}, fh, indent=1)
    print(f"predicted {proba.shape[0]} samples: {metric}={value:.6f}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = parse_config_file(args.config)
    exp = experiment_from_config(cfg, args.seed, args.threads)
    rows = run_sweep(exp, args.out)
    print(f"sweep done: {len(rows)} result rows in {args.out}/results.csv")
    return EXIT_OK


def cmd_ablate(args) -> int:
    cfg = parse_config_file(args.config)
    exp = experiment_from_config(cfg, args.seed, args.threads)
    rows = run_ablation(exp, args.out)
    print(f"ablation done: {len(rows)} result rows in {args.out}/results.csv")
    return EXIT_OK


def cmd_report(args) -> int:
    rows = read_results(args.results)
    methods = sorted({r.method for r in rows})
    cells = {}
    for r in rows:
        cells.setdefault((r.dataset, r.gamma), {}).setdefault(r.method, []).append(r.value)
    keys = sorted(cells)
    matrix = []
    for key in keys:
        per_method = cells[key]
        if set(per_method) != set(methods):
            raise ValueError(f"incomplete result cell {key}: {sorted(per_method)}")
        matrix.append([float(np.mean(per_method[m])) for m in methods])
    table = rank_methods(np.array(matrix), methods, higher_is_better=True)
    os.makedirs(args.out, exist_ok=True)
    with open(os.path.join(args.out, "ranks.csv"), "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        m = len(methods)
        writer.writerow(["method", "average_rank"] + [f"top_{n}" for n in range(1, m + 1)])
        for i, name in enumerate(methods):
            writer.writerow([name, repr(float(table.average_rank[i]))]
                            + [int(c) for c in table.top_n_counts[i]])
    print(f"rank table over {len(keys)} dataset/noise cells written to {args.out}/ranks.csv")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="robustboost",
        description="Noise-robust Newton-boosted trees: training, noise sweeps, rank reports.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--seed", type=int, default=0, help="master seed")
        p.add_argument("--threads", type=int, default=1)

    p = sub.add_parser("train", help="train one model from a config file")
    p.add_argument("--config", required=True)
    common(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="score a dataset with a trained model")
    p.add_argument("--model", required=True)
    p.add_argument("--config", default=None)
    p.add_argument("--data", default=None, help="dataset path or synthetic:<name>")
    common(p)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("sweep", help="noise-level sweep with tuned methods")
    p.add_argument("--config", required=True)
    common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("ablate", help="focal/robust-term ablation sweep")
    p.add_argument("--config", required=True)
    common(p)
    p.set_defaults(func=cmd_ablate)

    p = sub.add_parser("report", help="rank tables from a sweep results.csv")
    p.add_argument("--results", required=True)
    common(p)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, LossConfigError, BoosterConfigError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
