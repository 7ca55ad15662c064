"""Phase-transition grid: mean recovery score per (subspace dimension, corruption size).

    python scripts/phase_transition.py --out runs/phase --threads 4
    python scripts/phase_transition.py --dims 1 2 4 --corruptions 0.4 2 4 --trials 5

Interrupted runs resume from the checkpoint in --out. Prints one text
heat map per method (rows: subspace dim, columns: corruption size).
"""
import argparse
import logging
import sys

import numpy as np

from rsp.sweep import METHODS, SweepConfig, default_corruptions, default_dims, run_sweep


def heatmap(cfg, cells, method):
    grid = np.full((len(cfg.dims), len(cfg.corruptions)), np.nan)
    for c in cells:
        if c["method"] == method:
            grid[cfg.dims.index(c["subspace_dim"]), cfg.corruptions.index(c["corruption_size"])] = c["mean_score"]
    lines = [f"{method}: mean score", "  d | " + " ".join(f"{c:4.1f}" for c in cfg.corruptions)]
    for d, row in zip(cfg.dims, grid):
        lines.append(f"{d:3d} | " + " ".join(f"{x:4.2f}" for x in row))
    return "\n".join(lines)


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--out", default="runs/phase")
    ap.add_argument("--dims", type=int, nargs="+", default=default_dims())
    ap.add_argument("--corruptions", type=float, nargs="+", default=default_corruptions())
    ap.add_argument("--trials", type=int, default=20)
    ap.add_argument("--p", type=int, default=50)
    ap.add_argument("--methods", nargs="+", default=list(METHODS), choices=METHODS)
    ap.add_argument("--max-iters", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(message)s")

    cfg = SweepConfig(dims=args.dims, corruptions=args.corruptions, p=args.p, trials=args.trials,
                      base_seed=args.seed, methods=args.methods, max_iters=args.max_iters)
    progress = lambda done, total: print(f"\r{done}/{total} trials", end="", file=sys.stderr)  # noqa: E731
    cells = run_sweep(cfg, args.out, threads=args.threads, progress=progress)
    print(file=sys.stderr)
    for method in cfg.methods:
        print(heatmap(cfg, cells, method), end="\n\n")


if __name__ == "__main__":
    main()
