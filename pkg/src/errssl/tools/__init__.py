"""Command implementations: each `*_impl(run_config)` returns a CommandResult and never raises."""

from .bench import bench_impl
from .classify import classify_impl
from .cluster import cluster_impl
from .embed import embed_impl
from .gradcheck import gradcheck_impl

__all__ = ["bench_impl", "classify_impl", "cluster_impl", "embed_impl", "gradcheck_impl"]
