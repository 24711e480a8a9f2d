"""Exact cone geometry, concave-function calculus, and heights on the adelic line."""

__all__ = ["divisorial_core", "convex_calculus", "adelic_curve"]
