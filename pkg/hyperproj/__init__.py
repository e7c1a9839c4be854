"""Exact projections onto intersections of affine subspaces and hyperplanes."""
