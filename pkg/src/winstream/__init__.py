"""Streaming win prediction for professional CS:GO with explanations."""

__version__ = "0.1.0"
