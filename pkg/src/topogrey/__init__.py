"""Exact finite computations with grey sets, metric spaces, Katětov towers and groupoids."""

__version__ = "0.1.0"
