#!/usr/bin/env python3
"""Full desk-scale noise sweep on the bundled imbalanced dataset.

Runs every loss family with its default hyperparameter grid over the default
noise levels, then writes the rank table. Expect tens of minutes on one core;
trim --noise-levels / --repeats for a quicker look.
"""

import argparse
import os
import sys

from robustboost.cli import main as cli_main
from robustboost.experiment import ExperimentConfig, run_sweep
from robustboost.tree import TreeConfig


def parse_args():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="bench_out")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--methods", default="rfl,gce,fl,cce,mae,sce,nce")
    ap.add_argument("--noise-levels", default="0.0,0.1,0.2,0.3,0.4")
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--threads", type=int, default=1)
    return ap.parse_args()


def main():
    args = parse_args()
    cfg = ExperimentConfig(
        dataset="synthetic:imbalanced",
        noise_levels=tuple(float(g) for g in args.noise_levels.split(",")),
        repeats=args.repeats,
        methods=tuple(args.methods.split(",")),
        tree=TreeConfig(lam=1.0, max_leaves=64, max_depth=12),
        master_seed=args.seed,
        threads=args.threads,
    )
    rows = run_sweep(cfg, args.out)
    print(f"{len(rows)} result rows in {args.out}/results.csv")
    code = cli_main(["report", "--results", os.path.join(args.out, "results.csv"),
                     "--out", args.out])
    return code


if __name__ == "__main__":
    sys.exit(main())
