"""Command-line driver: ``diffmap {generate,embed,cluster,validate-fp,exit-time}``.

Exit status is 0 on success, 1 when the library rejects the input and 2 on
I/O errors or bad usage. Every output file is a deterministic function of the
command line; wall-clock timings are logged to standard error only.
"""

from __future__ import annotations

import argparse
import contextlib
import logging
import os
import sys
import time

import numpy as np

from . import io
from .clustering import cluster, detect_gap, permutation_accuracy
from .datasets import DatasetSpec, generate, load_csv, save_csv
from .diffusion import diffusion_map, truncation_error_ratio
from .errors import DiffmapError
from .fokker_planck import (
    PotentialGrid,
    compare_spectra,
    discretize_fp,
    fp_eigenpairs,
    parse_potential,
)
from .kernel_graph import KernelConfig, markov_from_cloud, select_epsilon
from .langevin import Box, LangevinConfig, mean_exit_time
from .spectral import decompose

log = logging.getLogger("diffmap")

MAX_K = 10


class _Timer:
    def __init__(self):
        self.stages = {}

    @contextlib.contextmanager
    def stage(self, name):
        t0 = time.perf_counter()
        yield
        self.stages[name] = time.perf_counter() - t0
        log.info("%s: %.3f s", name, self.stages[name])


def _thread_limit():
    n = int(os.environ.get("DIFFMAP_THREADS", "0") or 0)
    if n <= 0:
        return contextlib.nullcontext()
    from threadpoolctl import threadpool_limits

    return threadpool_limits(limits=n)


def _epsilon(cloud, args) -> float:
    if args.epsilon is not None:
        return float(args.epsilon)
    rule, _, k = args.epsilon_rule.partition(":")
    if k and not k.isdigit():
        raise DiffmapError(f"bad neighbour count in --epsilon-rule {args.epsilon_rule!r}")
    return select_epsilon(cloud, rule, int(k) if k else 7)


def _grid_axis(text: str):
    try:
        lo, hi, n = text.split(",")
        return float(lo), float(hi), int(n)
    except ValueError:
        raise argparse.ArgumentTypeError("expected lo,hi,nodes") from None


def _interval(text: str):
    try:
        lo, hi = text.split(",")
        return float(lo), float(hi)
    except ValueError:
        raise argparse.ArgumentTypeError("expected lo,hi") from None


def _k_arg(text: str):
    if text == "auto":
        return text
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("expected 'auto' or an integer") from None


# --- commands --------------------------------------------------------------


def cmd_generate(args) -> None:
    with open(args.spec_json) as fh:
        spec = DatasetSpec.from_json(fh.read())
    save_csv(generate(spec), args.out_csv)


def cmd_embed(args) -> None:
    timer = _Timer()
    cloud = load_csv(args.in_csv)
    with timer.stage("kernel"):
        eps = _epsilon(cloud, args)
        markov = markov_from_cloud(cloud, KernelConfig(epsilon=eps))
    with timer.stage("eigensolve"):
        m = min(cloud.n, max(args.k + 2, MAX_K + 1))
        decomp = decompose(markov, m)
    dmap = diffusion_map(decomp, args.t, args.k)
    try:
        ratio = truncation_error_ratio(decomp, args.k, args.t)
    except DiffmapError:
        ratio = None
    out = args.out_prefix
    io.write_embedding_csv(f"{out}_embedding.csv", dmap.coords)
    io.write_spectrum_csv(f"{out}_spectrum.csv", decomp.eigenvalues)
    io.write_matrix_csv(f"{out}_psi.csv", decomp.right_vectors, prefix="psi")
    io.write_matrix_csv(f"{out}_phi.csv", decomp.left_vectors, prefix="phi")
    io.write_json(
        f"{out}_report.json",
        {
            "config": {"input": os.path.basename(args.in_csv), "epsilon": eps, "k": args.k, "t": args.t},
            "eigenvalues": decomp.eigenvalues,
            "k": args.k,
            "t": args.t,
            "truncation_ratio": ratio,
        },
    )


def cmd_cluster(args) -> None:
    timer = _Timer()
    cloud = load_csv(args.in_csv)
    with timer.stage("kernel"):
        eps = _epsilon(cloud, args)
        config = KernelConfig(epsilon=eps, family=args.kernel)
        markov = markov_from_cloud(cloud, config)
    with timer.stage("eigensolve"):
        decomp = decompose(markov, min(cloud.n, MAX_K + 1))
    gap = detect_gap(decomp.eigenvalues, min(MAX_K, decomp.m - 1))
    k = gap.k if args.k == "auto" else args.k
    if k < 2:
        raise DiffmapError(f"spectral gap suggests k = {k}; clustering needs k >= 2")
    with timer.stage("kmeans"):
        result = cluster(diffusion_map(decomp, 1, k - 1), k, seed=args.seed)
    report = {
        "config": {
            "input": os.path.basename(args.in_csv),
            "epsilon": eps,
            "kernel": args.kernel,
            "k": args.k,
            "seed": args.seed,
        },
        "gap": gap.to_dict(),
        "k": k,
        "inertia": result.inertia,
    }
    if cloud.labels is not None:
        report["accuracy"] = permutation_accuracy(result.labels, cloud.labels)
    io.write_labels_csv(f"{args.out_prefix}_labels.csv", result.labels)
    io.write_json(f"{args.out_prefix}_gap.json", report)


def cmd_validate_fp(args) -> None:
    timer = _Timer()
    potential = parse_potential(args.potential)
    lo, hi, nodes = args.grid
    with timer.stage("fp"):
        fp = fp_eigenpairs(discretize_fp(PotentialGrid.from_potential(potential, [args.grid])), args.modes + 1)
    with timer.stage("sample"):
        spec = DatasetSpec.boltzmann1d(args.potential, (lo, hi), args.n_samples, seed=args.seed)
        cloud = generate(spec)
    with timer.stage("graph"):
        eps = select_epsilon(cloud) * args.epsilon_scale
        decomp = decompose(markov_from_cloud(cloud, KernelConfig(epsilon=eps)), args.modes + 1)
    comparison = compare_spectra(decomp, eps, fp, args.modes)
    payload = {
        "config": {
            "potential": args.potential,
            "grid": list(args.grid),
            "n_samples": args.n_samples,
            "epsilon_scale": args.epsilon_scale,
            "seed": args.seed,
            "modes": args.modes,
        },
        "epsilon": eps,
        "comparison": comparison.to_dict(),
        "mode_consistency": [comparison.mode_consistency(j) for j in range(1, args.modes + 1)],
    }
    io.write_json(f"{args.out_prefix}_comparison.json", payload)
    io.write_eigenfunction_csv(f"{args.out_prefix}_fp_eigenfunctions.csv", fp.points, fp.eigenfunctions)


def _saddle_and_minimum(potential, lo, hi):
    x = np.linspace(lo, hi, 20001)
    u = potential(x[:, None])
    minima = np.flatnonzero((u[1:-1] < u[:-2]) & (u[1:-1] <= u[2:])) + 1
    if minima.size < 2:
        raise DiffmapError("potential needs at least two wells on the domain")
    a, b = minima[0], minima[1]
    saddle = x[a + np.argmax(u[a : b + 1])]
    return x[a], saddle


def cmd_exit_time(args) -> None:
    timer = _Timer()
    potential = parse_potential(args.potential)
    lo, hi = args.domain
    minimum, saddle = _saddle_and_minimum(potential, lo, hi)
    config = LangevinConfig(
        diffusion_D=args.diffusion,
        dt=args.dt,
        max_steps=args.max_steps,
        seed=args.seed,
        domain=Box((lo,), (hi,)),
    )
    start_well = Box((lo,), (0.5 * (minimum + saddle),))
    exit_region = Box((saddle + args.margin,), (hi,))
    with timer.stage("langevin"):
        est = mean_exit_time(potential, start_well, exit_region, config, trials=args.trials)
    with timer.stage("fp"):
        grid = PotentialGrid.from_potential(potential, [(lo, hi, args.fp_nodes)])
        mu = fp_eigenpairs(discretize_fp(grid, diffusion=args.diffusion), 3).eigenvalues
    payload = {
        "config": {
            "potential": args.potential,
            "diffusion": args.diffusion,
            "dt": args.dt,
            "trials": args.trials,
            "seed": args.seed,
            "domain": [lo, hi],
            "margin": args.margin,
            "max_steps": args.max_steps,
            "fp_nodes": args.fp_nodes,
        },
        "saddle": saddle,
        "estimate": est.to_dict(),
        "fp_mu1": float(mu[1]),
        "fp_mu2": float(mu[2]),
        "tau_times_mu1": est.mean * abs(float(mu[1])),
    }
    io.write_json(f"{args.out_prefix}_exit.json", payload)


# --- parser ----------------------------------------------------------------


def _add_epsilon(p):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--epsilon", type=float, help="kernel scale (squared length)")
    g.add_argument(
        "--epsilon-rule",
        default="median_sqdist",
        help="median_sqdist (default) or knn_scale[:k]",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="diffmap", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log stage timings")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="draw a synthetic point cloud")
    p.add_argument("spec_json")
    p.add_argument("out_csv")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("embed", help="diffusion map embedding and spectrum")
    p.add_argument("in_csv")
    p.add_argument("out_prefix")
    _add_epsilon(p)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--t", type=float, default=1.0)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("cluster", help="spectral-gap clustering")
    p.add_argument("in_csv")
    p.add_argument("out_prefix")
    _add_epsilon(p)
    p.add_argument("--k", type=_k_arg, default="auto")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--kernel", choices=["gaussian", "self_tuning"], default="gaussian")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("validate-fp", help="graph spectrum against the Fokker-Planck oracle")
    p.add_argument("out_prefix")
    p.add_argument("--potential", default="const")
    p.add_argument("--grid", type=_grid_axis, default=(0.0, 1.0, 400))
    p.add_argument("--n-samples", type=int, default=2000)
    p.add_argument("--epsilon-scale", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--modes", type=int, default=2)
    p.set_defaults(func=cmd_validate_fp)

    p = sub.add_parser("exit-time", help="Langevin mean exit time against the oracle rate")
    p.add_argument("out_prefix")
    p.add_argument("--potential", default="double_well:1,1")
    p.add_argument("--diffusion", type=float, default=0.5)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--trials", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--domain", type=_interval, default=(-2.0, 2.0))
    p.add_argument("--margin", type=float, default=0.0)
    p.add_argument("--max-steps", type=int, default=2_000_000)
    p.add_argument("--fp-nodes", type=int, default=800)
    p.set_defaults(func=cmd_exit_time)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        with _thread_limit():
            args.func(args)
    except DiffmapError as exc:
        print(f"diffmap: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"diffmap: I/O error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
