"""Forgetting-event based noise removal for reaction datasets, with its evaluation metrics."""

__version__ = "0.1.0"
