"""Phase-transition sweep over (subspace dimension, corruption size) cells.

Every (cell, trial) pair gets its own seed from ``numpy.random.SeedSequence``
keyed on ``(base_seed; cell, trial)``. That seed is split into independent
streams for the instance, the sensing matrix and k-means, so any single
trial can be replayed without running the others.

Output directory layout::

    manifest.json     config, versions, progress (rewritten atomically)
    records.jsonl     append-only checkpoint, one line per finished trial
    trials.csv        per-trial, per-method records (deterministic)
    timings.csv       wall-clock per trial and method
    cells.csv/.json   per-cell, per-method means
"""
import csv
import json
import logging
import platform
import time
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from threadpoolctl import threadpool_limits

from . import __version__
from .baselines import pca_rowspace, sim_rowspace
from .clustering import accuracy, cluster_rows
from .errors import RspError
from .io import dump_json, load_json
from .linalg import truncated_svd
from .metrics import projector_snr, score_of_snr
from .sensing import compress, make_sensing
from .solver import DEFAULT_LAMBDA, RspParams, solve
from .synth import SynConfig, generate

log = logging.getLogger(__name__)

METHODS = ("rsp", "sim", "pca")
TRIAL_FIELDS = ("cell", "trial", "subspace_dim", "true_rank", "corruption_size", "p", "seed",
                "method", "snr_db", "score", "accuracy", "iterations", "converged")
TIMING_FIELDS = ("cell", "trial", "method", "wall_ms")
CELL_FIELDS = ("cell", "subspace_dim", "true_rank", "corruption_size", "p", "method", "trials",
               "mean_score", "mean_snr_db", "mean_accuracy", "mean_iterations")


class CheckpointError(RspError):
    pass


def default_dims():
    return list(range(1, 21))


def default_corruptions():
    return [round(0.4 * i, 10) for i in range(1, 21)]


@dataclass
class SweepConfig:
    dims: list = field(default_factory=default_dims)
    corruptions: list = field(default_factory=default_corruptions)
    p: int = 50
    trials: int = 20
    base_seed: int = 0
    methods: tuple = METHODS
    lam: float = DEFAULT_LAMBDA
    r_offset: int = 0
    m: int = 200
    n_per_class: int = 100
    k: int = 2
    max_iters: int = 1000
    tol: float = 1e-6

    def __post_init__(self):
        self.dims = [int(d) for d in self.dims]
        self.corruptions = [float(c) for c in self.corruptions]
        self.methods = tuple(self.methods)
        if not self.dims or not self.corruptions:
            raise RspError("sweep grids must be non-empty")
        if self.trials < 1:
            raise RspError("trials must be >= 1")
        unknown = set(self.methods) - set(METHODS)
        if unknown or not self.methods:
            raise RspError(f"methods must be a non-empty subset of {METHODS}, got {self.methods}")

    def cells(self):
        """``(index, subspace_dim, corruption_size)`` in row-major order."""
        out = []
        for i, d in enumerate(self.dims):
            for j, c in enumerate(self.corruptions):
                out.append((i * len(self.corruptions) + j, d, c))
        return out

    def to_dict(self):
        d = asdict(self)
        d["methods"] = list(self.methods)
        return d


def derive_seed(base_seed, cell, trial):
    ss = np.random.SeedSequence(int(base_seed), spawn_key=(int(cell), int(trial)))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _streams(seed):
    children = np.random.SeedSequence(int(seed)).spawn(3)
    return [int(c.generate_state(1, dtype=np.uint64)[0]) for c in children]


def run_trial(cfg, cell, dim, corruption, trial):
    """Run every configured method on one synthetic instance.

    Returns ``(records, timings)``: lists of dicts keyed by ``TRIAL_FIELDS``
    and ``TIMING_FIELDS``.
    """
    seed = derive_seed(cfg.base_seed, cell, trial)
    synth_seed, sensing_seed, kmeans_seed = _streams(seed)
    inst = generate(SynConfig(cfg.m, cfg.n_per_class, cfg.k, dim, corruption, synth_seed))
    r0 = inst.true_rank
    sensing = make_sensing(cfg.p, cfg.m, sensing_seed)
    m_mat = compress(sensing, inst.observed)
    v_true = truncated_svd(inst.clean, r0, method="dense").right_vectors
    r = r0 + cfg.r_offset

    records, timings = [], []
    for method in cfg.methods:
        t0 = time.perf_counter()
        iterations, converged = 0, True
        if method == "rsp":
            sol = solve(m_mat, sensing, RspParams(r, cfg.lam, cfg.max_iters, cfg.tol))
            v_est, iterations, converged = sol.row_space, sol.iterations, sol.converged
        elif method == "sim":
            v_est = sim_rowspace(m_mat, min(r, min(m_mat.shape)))
        else:
            v_est = pca_rowspace(m_mat, min(r, min(m_mat.shape)))
        acc = accuracy(cluster_rows(v_est, cfg.k, kmeans_seed), inst.labels)
        wall_ms = 1e3 * (time.perf_counter() - t0)
        snr = projector_snr(v_true, v_est)
        records.append({
            "cell": cell, "trial": trial, "subspace_dim": dim, "true_rank": r0,
            "corruption_size": corruption, "p": cfg.p, "seed": seed, "method": method,
            "snr_db": snr, "score": score_of_snr(snr), "accuracy": acc,
            "iterations": iterations, "converged": bool(converged),
        })
        timings.append({"cell": cell, "trial": trial, "method": method, "wall_ms": wall_ms})
    return records, timings


def _run_trial_job(args):
    cfg_dict, cell, dim, corruption, trial = args
    with threadpool_limits(1):
        return cell, trial, run_trial(SweepConfig(**cfg_dict), cell, dim, corruption, trial)


def _versions():
    import scipy

    return {"rsp": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
            "python": platform.python_version()}


def _load_checkpoint(out, cfg):
    manifest_path = out / "manifest.json"
    log_path = out / "records.jsonl"
    done = {}
    if not manifest_path.exists():
        return done
    try:
        manifest = load_json(manifest_path)
    except (OSError, json.JSONDecodeError) as exc:
        raise CheckpointError(f"unreadable manifest {manifest_path}: {exc}") from exc
    if manifest.get("config") != cfg.to_dict():
        raise CheckpointError(f"{manifest_path} was written for a different sweep config")
    if not log_path.exists():
        return done
    raw = log_path.read_text()
    lines = raw.split("\n")
    # a final line without newline is a write cut short by the interrupt
    complete, tail = lines[:-1], lines[-1]
    if tail:
        log.warning("dropping truncated checkpoint line")
    for lineno, line in enumerate(complete, 1):
        try:
            entry = json.loads(line)
            done[(entry["cell"], entry["trial"])] = (entry["records"], entry["timings"])
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise CheckpointError(f"{log_path}:{lineno}: corrupt checkpoint line") from exc
    if tail:
        log_path.write_text("".join(line + "\n" for line in complete))
    return done


def _write_csv(path, fields, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _fmt(row[k]) for k in fields})


def _fmt(x):
    if isinstance(x, float):
        return f"{x:.17g}"
    return x


def aggregate(cfg, records):
    """Per-cell, per-method means of the trial records."""
    by_key = {}
    for rec in records:
        by_key.setdefault((rec["cell"], rec["method"]), []).append(rec)
    cells = []
    for cell, dim, corruption in cfg.cells():
        for method in cfg.methods:
            recs = by_key.get((cell, method), [])
            if not recs:
                continue
            cells.append({
                "cell": cell, "subspace_dim": dim, "true_rank": recs[0]["true_rank"],
                "corruption_size": corruption, "p": cfg.p, "method": method,
                "trials": len(recs),
                "mean_score": float(np.mean([r["score"] for r in recs])),
                "mean_snr_db": float(np.mean([r["snr_db"] for r in recs])),
                "mean_accuracy": float(np.mean([r["accuracy"] for r in recs])),
                "mean_iterations": float(np.mean([r["iterations"] for r in recs])),
            })
    return cells


def run_sweep(cfg, out, threads=1, progress=None):
    """Run (or resume) a sweep into ``out`` and return the per-cell aggregates.

    Finished trials are appended to ``records.jsonl`` as they complete, so an
    interrupted sweep resumes where it stopped. ``threads`` counts worker
    processes; each worker pins BLAS to a single thread.
    """
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    done = _load_checkpoint(out, cfg)
    jobs = [(cell, dim, c, t) for cell, dim, c in cfg.cells() for t in range(cfg.trials)
            if (cell, t) not in done]
    total = len(cfg.cells()) * cfg.trials
    manifest = {"config": cfg.to_dict(), "versions": _versions(), "total_trials": total,
                "seed_scheme": "SeedSequence(base_seed, spawn_key=(cell, trial))"}

    def checkpoint(status):
        dump_json(out / "manifest.json", {**manifest, "completed_trials": len(done),
                                          "status": status})

    checkpoint("running")
    log.info("sweep: %d of %d trials already done", total - len(jobs), total)
    try:
        with open(out / "records.jsonl", "a") as fh:
            def record(cell, trial, result):
                done[(cell, trial)] = result
                fh.write(json.dumps({"cell": cell, "trial": trial, "records": result[0],
                                     "timings": result[1]}) + "\n")
                fh.flush()
                checkpoint("running")
                if progress:
                    progress(len(done), total)

            if threads <= 1:
                with threadpool_limits(1):
                    for cell, dim, c, t in jobs:
                        record(cell, t, run_trial(cfg, cell, dim, c, t))
            else:
                cfg_dict = cfg.to_dict()
                with ProcessPoolExecutor(max_workers=threads) as pool:
                    futures = [pool.submit(_run_trial_job, (cfg_dict, cell, dim, c, t))
                               for cell, dim, c, t in jobs]
                    for fut in as_completed(futures):
                        cell, t, result = fut.result()
                        record(cell, t, result)
    except KeyboardInterrupt:
        checkpoint("interrupted")
        raise

    keys = sorted(done)
    records = [rec for key in keys for rec in done[key][0]]
    timings = [tm for key in keys for tm in done[key][1]]
    _write_csv(out / "trials.csv", TRIAL_FIELDS, records)
    _write_csv(out / "timings.csv", TIMING_FIELDS, timings)
    cells = aggregate(cfg, records)
    _write_csv(out / "cells.csv", CELL_FIELDS, cells)
    dump_json(out / "cells.json", {"config": cfg.to_dict(), "cells": cells})
    checkpoint("complete")
    return cells


def read_trials(path):
    """Parse ``trials.csv`` back into typed records."""
    ints = {"cell", "trial", "subspace_dim", "true_rank", "p", "seed", "iterations"}
    floats = {"corruption_size", "snr_db", "score", "accuracy"}
    rows = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            for k in ints:
                row[k] = int(row[k])
            for k in floats:
                row[k] = float(row[k])
            row["converged"] = row["converged"] == "True"
            rows.append(row)
    return rows
