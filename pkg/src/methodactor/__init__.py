"""Connections solver pipelines over pluggable text-completion providers."""

__version__ = "0.1.0"
