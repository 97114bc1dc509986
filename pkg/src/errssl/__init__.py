"""Graph-based semi-supervised classification, clustering and embedding with relationship-kernel smoothness."""

__version__ = "0.1.0"
