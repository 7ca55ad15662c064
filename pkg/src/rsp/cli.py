"""Command-line harness: ``rsp {synth,compress,solve,cluster,evaluate,sweep}``.

Exit codes: 0 success (including a solve that hit its iteration cap),
1 invalid arguments or inconsistent inputs, 2 I/O failure or corrupt
checkpoint.

Every command writes its deterministic outputs plus a separate
``timings.json``; only the timings differ between identical runs.
"""
import argparse
import logging
import os
import sys
import time
from pathlib import Path

import numpy as np
from threadpoolctl import threadpool_limits

from . import io
from .baselines import sim_rowspace
from .clustering import accuracy, cluster_rows, normalize_columns
from .errors import RspError
from .linalg import truncated_svd
from .metrics import recovery_report
from .sensing import SensingMatrix, compress, make_sensing
from .solver import DEFAULT_LAMBDA, RspParams, solve
from .sweep import CheckpointError, SweepConfig, default_corruptions, default_dims, run_sweep
from .synth import SynConfig, generate

log = logging.getLogger("rsp")

OUTPUT_ENV = "RSP_OUTPUT_DIR"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _global_flags():
    g = argparse.ArgumentParser(add_help=False)
    g.add_argument("--seed", type=int, default=0, help="master seed for the command")
    g.add_argument("--threads", type=int, default=None,
                   help="worker count (default: logical cores; 1 for bit-reproducible runs)")
    g.add_argument("--format", choices=io.FORMATS, default="bin", dest="fmt",
                   help="matrix file format for outputs")
    g.add_argument("--out", type=Path, default=None,
                   help=f"output directory (default ${OUTPUT_ENV} or current directory)")
    g.add_argument("-v", "--verbose", action="store_true")
    return g


def _out_dir(args):
    out = args.out or Path(os.environ.get(OUTPUT_ENV, "."))
    out.mkdir(parents=True, exist_ok=True)
    return out


def _rsp_flags(p):
    p.add_argument("--r", type=int, required=True, help="row-space dimension")
    p.add_argument("--lambda", type=float, default=DEFAULT_LAMBDA, dest="lam")
    p.add_argument("--max-iters", type=int, default=1000)
    p.add_argument("--tol", type=float, default=1e-6)


def _sensing_flags(p):
    p.add_argument("--sensing", type=Path, help="sensing matrix file")
    p.add_argument("--sensing-seed", type=int, help="regenerate R from this seed instead")
    p.add_argument("--ambient", type=int, help="ambient dimension m when using --sensing-seed")
    p.add_argument("--p", type=int, help="expected number of projections (checked against M)")


def _load_sensing(args, m_mat):
    if args.sensing is not None:
        r = SensingMatrix(io.read_matrix(args.sensing))
    elif args.sensing_seed is not None:
        if args.ambient is None:
            raise UsageError("--sensing-seed needs --ambient")
        r = make_sensing(m_mat.shape[0], args.ambient, args.sensing_seed, allow_square=True)
    else:
        raise UsageError("give --sensing FILE or --sensing-seed with --ambient")
    if args.p is not None and args.p != m_mat.shape[0]:
        raise UsageError(f"--p {args.p} does not match M with {m_mat.shape[0]} rows")
    if r.p != m_mat.shape[0]:
        raise UsageError(f"R has {r.p} rows but M has {m_mat.shape[0]}")
    return r


def cmd_synth(args):
    cfg = SynConfig(args.m, args.per_class, args.k, args.dim, args.corruption, args.seed)
    t0 = time.perf_counter()
    inst = generate(cfg)
    out = _out_dir(args)
    for stem, mat in (("clean", inst.clean), ("corruption", inst.corruption),
                      ("observed", inst.observed)):
        io.write_matrix(io.matrix_path(out, stem, args.fmt), mat)
    io.write_labels(out / "labels.csv", inst.labels)
    io.dump_json(out / "manifest.json", {**inst.manifest(), "format": args.fmt})
    io.dump_json(out / "timings.json", {"synth_ms": 1e3 * (time.perf_counter() - t0)})
    return 0


def cmd_compress(args):
    x = io.read_matrix(args.input)
    r = make_sensing(args.p, x.shape[0], args.seed, allow_square=args.allow_square)
    out = _out_dir(args)
    io.write_matrix(io.matrix_path(out, "sensing", args.fmt), r.matrix)
    io.write_matrix(io.matrix_path(out, "compressed", args.fmt), compress(r, x))
    io.dump_json(out / "compress.json", {"p": r.p, "m": r.m, "n": x.shape[1],
                                         "sensing_seed": args.seed, "format": args.fmt})
    return 0


def _solution_files(out, fmt, sol):
    io.write_matrix(io.matrix_path(out, "rowspace", fmt), sol.row_space)
    io.write_matrix(io.matrix_path(out, "sparse", fmt), sol.sparse)
    io.write_vector(out / "objective.csv", sol.objective_trace)


def _solve_report(sol, params):
    return {
        "r": params.r, "lambda": params.lam, "max_iters": params.max_iters, "tol": params.tol,
        "iterations": sol.iterations, "converged": sol.converged, "rho": sol.rho,
        "degenerate": sol.degenerate, "sparse_nonzeros": int(np.count_nonzero(sol.sparse)),
        "final_objective": sol.objective_trace[-1] if sol.objective_trace else None,
    }


def cmd_solve(args):
    m_mat = io.read_matrix(args.input)
    r = _load_sensing(args, m_mat)
    params = RspParams(args.r, args.lam, args.max_iters, args.tol)
    if args.normalize:
        m_mat = normalize_columns(m_mat)
    t0 = time.perf_counter()
    sol = solve(m_mat, r, params)
    elapsed = 1e3 * (time.perf_counter() - t0)
    out = _out_dir(args)
    _solution_files(out, args.fmt, sol)
    io.dump_json(out / "report.json", {**_solve_report(sol, params), "normalized": args.normalize})
    io.dump_json(out / "timings.json", {"solve_ms": elapsed})
    return 0


def cmd_cluster(args):
    m_mat = io.read_matrix(args.input)
    if args.normalize:
        m_mat = normalize_columns(m_mat)
    timings = {}
    t0 = time.perf_counter()
    report = {"method": args.method, "k": args.k, "normalized": args.normalize}
    if args.method == "rsp":
        r = _load_sensing(args, m_mat)
        params = RspParams(args.r, args.lam, args.max_iters, args.tol)
        sol = solve(m_mat, r, params)
        v = sol.row_space
        report.update(_solve_report(sol, params))
    else:
        v = sim_rowspace(m_mat, args.r)
        report["r"] = args.r
    timings["rowspace_ms"] = 1e3 * (time.perf_counter() - t0)
    t0 = time.perf_counter()
    assignment = cluster_rows(v, args.k, args.seed)
    timings["kmeans_ms"] = 1e3 * (time.perf_counter() - t0)
    out = _out_dir(args)
    io.write_labels(out / "pred_labels.csv", assignment.labels)
    io.write_matrix(io.matrix_path(out, "rowspace", args.fmt), v)
    if args.method == "rsp":
        io.write_matrix(io.matrix_path(out, "sparse", args.fmt), sol.sparse)
    report["inertia"] = assignment.inertia
    io.dump_json(out / "cluster.json", report)
    io.dump_json(out / "timings.json", timings)
    return 0


def cmd_evaluate(args):
    report = {}
    t0 = time.perf_counter()
    if args.truth_labels or args.pred_labels:
        if not (args.truth_labels and args.pred_labels):
            raise UsageError("--truth-labels and --pred-labels go together")
        truth = io.read_labels(args.truth_labels)
        pred = io.read_labels(args.pred_labels)
        if truth.shape != pred.shape:
            raise UsageError(f"label lengths differ: {truth.size} vs {pred.size}")
        report["accuracy"] = accuracy(pred, truth)
    if args.rowspace:
        v_est = io.read_matrix(args.rowspace)
        if args.true_rowspace:
            v_true = io.read_matrix(args.true_rowspace)
        elif args.clean:
            rank = args.true_rank or _manifest_rank(args)
            v_true = truncated_svd(io.read_matrix(args.clean), rank, method="dense").right_vectors
        else:
            raise UsageError("--rowspace needs --true-rowspace or --clean")
        if v_true.shape[0] != v_est.shape[0]:
            raise UsageError(f"row spaces disagree on n: {v_true.shape} vs {v_est.shape}")
        s_est = io.read_matrix(args.sparse) if args.sparse else None
        s_true = io.read_matrix(args.true_sparse) if args.true_sparse else None
        if s_est is not None and s_true is not None and s_est.shape != s_true.shape:
            raise UsageError(f"sparse shapes differ: {s_true.shape} vs {s_est.shape}")
        report.update(recovery_report(v_true, v_est, s_true, s_est).to_dict())
    if not report:
        raise UsageError("nothing to evaluate: give labels and/or row spaces")
    out = _out_dir(args)
    io.dump_json(out / "evaluation.json", report)
    io.dump_json(out / "timings.json", {"evaluate_ms": 1e3 * (time.perf_counter() - t0)})
    print(io.json.dumps(report, sort_keys=True))
    return 0


def _manifest_rank(args):
    manifest = Path(args.clean).parent / "manifest.json"
    if not manifest.exists():
        raise UsageError("--clean needs --true-rank or a manifest.json next to it")
    return int(io.load_json(manifest)["true_rank"])


def cmd_sweep(args):
    cfg = SweepConfig(
        dims=args.dims or default_dims(), corruptions=args.corruptions or default_corruptions(),
        p=args.p, trials=args.trials, base_seed=args.seed, methods=tuple(args.methods),
        lam=args.lam, r_offset=args.r_offset, m=args.m, n_per_class=args.per_class, k=args.k,
        max_iters=args.max_iters, tol=args.tol)
    threads = args.threads or os.cpu_count() or 1

    def progress(done, total):
        log.info("%d/%d trials", done, total)

    run_sweep(cfg, _out_dir(args), threads=threads, progress=progress)
    return 0


def build_parser():
    g = _global_flags()
    parser = _Parser(prog="rsp", description="Compressive robust subspace clustering.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("synth", parents=[g], help="generate a synthetic instance")
    p.add_argument("--m", type=int, default=200)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--per-class", type=int, default=100)
    p.add_argument("--dim", type=int, default=1)
    p.add_argument("--corruption", type=float, default=0.0, help="||S0||_0 / n")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("compress", parents=[g], help="draw R from --seed and write M = R X")
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--allow-square", action="store_true")
    p.set_defaults(func=cmd_compress)

    p = sub.add_parser("solve", parents=[g], help="recover row space and sparse errors")
    p.add_argument("--input", type=Path, required=True, help="compressed matrix M")
    _sensing_flags(p)
    _rsp_flags(p)
    p.add_argument("--normalize", action="store_true", help="unit-normalize columns of M first")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("cluster", parents=[g], help="cluster points from compressed data")
    p.add_argument("--input", type=Path, required=True, help="compressed matrix M")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--method", choices=("rsp", "sim"), default="rsp")
    _sensing_flags(p)
    _rsp_flags(p)
    p.add_argument("--no-normalize", action="store_false", dest="normalize")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("evaluate", parents=[g], help="score labels and recovered row spaces")
    p.add_argument("--truth-labels", type=Path)
    p.add_argument("--pred-labels", type=Path)
    p.add_argument("--rowspace", type=Path, help="estimated n x r basis")
    p.add_argument("--true-rowspace", type=Path)
    p.add_argument("--clean", type=Path, help="clean matrix L0; its top right vectors are the truth")
    p.add_argument("--true-rank", type=int)
    p.add_argument("--sparse", type=Path, help="estimated sparse matrix")
    p.add_argument("--true-sparse", type=Path)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("sweep", parents=[g], help="phase-transition benchmark")
    p.add_argument("--dims", type=int, nargs="+", help="subspace dimensions (default 1..20)")
    p.add_argument("--corruptions", type=float, nargs="+",
                   help="corruption sizes (default 0.4..8 step 0.4)")
    p.add_argument("--p", type=int, default=50)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--methods", nargs="+", choices=("rsp", "sim", "pca"),
                   default=["rsp", "sim", "pca"])
    p.add_argument("--lambda", type=float, default=DEFAULT_LAMBDA, dest="lam")
    p.add_argument("--r-offset", type=int, default=0, help="use r = true rank + offset")
    p.add_argument("--m", type=int, default=200)
    p.add_argument("--per-class", type=int, default=100)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--max-iters", type=int, default=1000)
    p.add_argument("--tol", type=float, default=1e-6)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "sweep":
            return args.func(args)
        with threadpool_limits(args.threads):
            return args.func(args)
    except (CheckpointError, io.FormatError) as exc:
        print(f"rsp: error: {exc}", file=sys.stderr)
        return 2
    except (UsageError, RspError) as exc:
        print(f"rsp: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"rsp: I/O error: {exc}", file=sys.stderr)
        return 2
    except KeyboardInterrupt:
        print("rsp: interrupted; partial results kept", file=sys.stderr)
        return 130


if __name__ == "__main__":
    sys.exit(main())
