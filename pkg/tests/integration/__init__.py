"""
Integration tests: full solves and command-line runs
"""
