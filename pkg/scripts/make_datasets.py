#!/usr/bin/env python3
"""Dump the bundled synthetic datasets to CSV for inspection or external use."""

import argparse
import os

from robustboost.data import dump_csv
from robustboost.synthetic import GENERATORS


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="datasets")
    ap.add_argument("--seed", type=int, default=12345)
    args = ap.parse_args()

    os.makedirs(args.out, exist_ok=True)
    for name, gen in GENERATORS.items():
        ds = gen(seed=args.seed)
        path = os.path.join(args.out, f"{name}.csv")
        dump_csv(ds, path)
        print(f"{path}: {ds.n_samples} samples, {ds.n_features} features, "
              f"{ds.n_classes} classes")


if __name__ == "__main__":
    main()
