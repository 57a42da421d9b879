# pyre-strict
"""Denoising attacks and baselines."""
