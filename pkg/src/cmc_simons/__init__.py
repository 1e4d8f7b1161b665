"""Verification toolkit for constant mean curvature surfaces in E(kappa, tau)."""

__version__ = "0.1.0"
