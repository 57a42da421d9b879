# pyre-strict
"""Metrics, event frames, synthetic scenes and benchmarks."""
