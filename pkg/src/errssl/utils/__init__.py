"""Numerical helpers shared by the solvers and the gradient checker."""
