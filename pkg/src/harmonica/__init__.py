"""Sustainability-aware self-adaptation runtime for time-series pipelines."""

__version__ = "0.1.0"
