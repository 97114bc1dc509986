"""Application layer: use cases orchestrating the numerical core and ports."""
