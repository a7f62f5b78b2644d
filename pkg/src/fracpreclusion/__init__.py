"""Exact verification of (fractional) strong matching preclusion for cube-like networks."""
