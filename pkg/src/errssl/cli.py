"""Command-line entry point.

Usage examples:
  errssl classify --dataset synthetic:moons?n=400 --n-labeled 8 --n-valid 20 --p 2
  errssl cluster --dataset data/blobs.csv --sr-sweep 0,20,50,100 --out runs/cluster
  errssl embed --dataset synthetic:blobs --sr 40 --variant all --lambda2-prime 100
  errssl gradcheck
  errssl bench --sizes 250,500,1000 --nk-sweep 25,50,100,200

Every run writes <out>/effective_config.txt; `--config <file>` reads one back.
Flags override file values, which override built-in defaults.
"""

from __future__ import annotations

import argparse
import sys
from collections.abc import Callable, Sequence
from typing import Any

import structlog

from .config.run_config import RunConfig, load_run_config
from .errors import ConfigError
from .models import CommandResult
from .shared import configure_logging
from .tools import bench_impl, classify_impl, cluster_impl, embed_impl, gradcheck_impl

logger = structlog.get_logger(__name__)

COMMANDS: dict[str, Callable[[RunConfig], CommandResult]] = {
    "classify": classify_impl,
    "cluster": cluster_impl,
    "embed": embed_impl,
    "gradcheck": gradcheck_impl,
    "bench": bench_impl,
}


def _flag(parser: Any, *names: str, dest: str, value: bool = True, help_text: str) -> None:
    parser.add_argument(
        *names, dest=dest, action="store_const", const=value, default=None, help=help_text
    )


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value run configuration file")
    common.add_argument("--out", help="Output directory (default: results)")

    data = common.add_argument_group("data")
    data.add_argument("--dataset", help="CSV/libsvm path or synthetic:<name>?key=value&...")
    data.add_argument("--data-format", dest="data_format", choices=["csv", "libsvm"])
    data.add_argument("--label-col", dest="label_col", help="Label column name or index")
    data.add_argument("--n-labeled", dest="n_labeled", type=int)
    data.add_argument("--n-valid", dest="n_valid", type=int)
    _flag(data, "--per-class", dest="per_class", help_text="Split sizes are per class")
    data.add_argument("--seed", "--seeds", dest="seeds", help="Seed, list (0,2,5) or range (0-9)")

    graph = common.add_argument_group("graph")
    graph.add_argument("--knn", type=int, help="kNN neighbourhood size k_N")
    sigma = common.add_mutually_exclusive_group()
    sigma.add_argument("--sigma-x", dest="sigma_x", type=float, help="Graph bandwidth sigma_x^2")
    _flag(sigma, "--adaptive-sigma", dest="adaptive_sigma", help_text="Mean kNN distance as sigma_x^2")
    _flag(graph, "--squared-distance", dest="squared_distance", help_text="Gaussian on squared distances")
    norm = common.add_mutually_exclusive_group()
    _flag(norm, "--normalized", dest="normalized", help_text="Symmetric normalized Laplacian (default)")
    _flag(norm, "--unnormalized", dest="normalized", value=False, help_text="L = D - W")
    graph.add_argument("--p", type=int, help="Laplacian power of the regularizer")
    _flag(graph, "--dump-graph", dest="dump_graph", help_text="Write <out>/graph.txt")

    energy = common.add_argument_group("energy")
    energy.add_argument("--lambda1", type=float)
    energy.add_argument("--lambda2", type=float)
    energy.add_argument("--lambda2-prime", dest="lambda2_prime", type=float, help="lambda2 = lambda2' / s_R")
    energy.add_argument("--lambda3", type=float)
    energy.add_argument("--sigma-f", dest="sigma_f", type=float, help="Relationship bandwidth sigma_f^2")
    energy.add_argument("--cg-steps", dest="cg_steps", type=int)
    energy.add_argument("--grad-tol", dest="grad_tol", type=float)
    energy.add_argument("--nk", type=int, help="Relationship sparsity |N_K|")

    relations = common.add_argument_group("relationship labels")
    source = common.add_mutually_exclusive_group()
    source.add_argument("--relations", help="File of i,j,must|cannot rows")
    source.add_argument("--sr", type=int, help="Number of sampled relation labels s_R")
    relations.add_argument("--sr-sweep", dest="sr_sweep", help="Comma-separated s_R values")
    return common


def _tuning_options(parser: argparse.ArgumentParser, criterion: str) -> None:
    tuning = parser.add_argument_group("tuning", f"(sigma_f^2, lambda2') pairs picked by {criterion}")
    tuning.add_argument("--grid-sigma-f", dest="grid_sigma_f")
    tuning.add_argument("--grid-lambda2-prime", dest="grid_lambda2_prime")
    tuning.add_argument("--tune-sr", dest="tune_sr", type=int, help="Reference s_R (default 250)")


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = argparse.ArgumentParser(
        prog="errssl",
        description="kNN-graph semi-supervised learning with relationship-kernel regularization",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    classify = sub.add_parser("classify", parents=[common], help="IRR vs ERR classification")
    classify.add_argument("--grid-lambda1", dest="grid_lambda1")
    classify.add_argument("--grid-lambda2", dest="grid_lambda2")
    classify.add_argument("--grid-sigma-f", dest="grid_sigma_f")
    classify.add_argument("--grid-knn", dest="grid_knn", help="k_N values tuned with lambda1")
    classify.add_argument("--grid-sigma-x", dest="grid_sigma_x", help="sigma_x^2 values tuned with lambda1")

    cluster = sub.add_parser("cluster", parents=[common], help="Constrained spectral clustering")
    cluster.add_argument("--clusters", type=int, help="Number of clusters k")
    cluster.add_argument("--dim", type=int, help="Embedding columns (default k - 1)")
    cluster.add_argument("--restarts", type=int)
    _flag(cluster, "--plain-init", dest="plain_init", help_text="Uniform k-means seeding")
    _tuning_options(cluster, "normalized cut")

    embed = sub.add_parser("embed", parents=[common], help="Embedding with relation labels")
    embed.add_argument("--dim", type=int, help="Embedding columns (default 2)")
    embed.add_argument("--variant", help="spectral, labels, err or all")
    _tuning_options(embed, "leave-one-out 1-NN error")

    gradcheck = sub.add_parser("gradcheck", parents=[common], help="Finite-difference gradient suite")
    gradcheck.add_argument("--instances", dest="gradcheck_instances", type=int)
    _flag(gradcheck, "--inject-fault", dest="inject_fault", help_text="Flip analytic gradient signs")

    bench = sub.add_parser("bench", parents=[common], help="Timing and |N_K| sweep")
    bench.add_argument("--sizes")
    bench.add_argument("--nk-sweep", dest="nk_sweep")
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    values: dict[str, Any] = {
        k: v for k, v in vars(args).items() if k not in {"config", "adaptive_sigma"}
    }
    config = load_run_config(args.config, values)
    if args.adaptive_sigma:
        config = config.model_copy(update={"sigma_x": None})
    return config


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging()
    try:
        config = resolve_config(args)
    except ConfigError as e:
        print(f"errssl: invalid configuration: {e}", file=sys.stderr)
        return 1

    result = COMMANDS[args.command](config)
    for line in result.summary:
        print(line)
    if not result.success:
        print(f"errssl {args.command} failed: {result.error}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
