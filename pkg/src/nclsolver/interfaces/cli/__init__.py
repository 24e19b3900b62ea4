"""
Command-line interface: solve, bench, list and validate
"""

from .main import EXIT_CODES, RunConfig, build_parser, main

__all__ = ["EXIT_CODES", "RunConfig", "build_parser", "main"]
