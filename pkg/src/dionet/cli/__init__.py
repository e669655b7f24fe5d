"""Command line entry points, config loading and model files."""
from .main import main

__all__ = ["main"]
