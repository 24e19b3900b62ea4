"""
Tests Package for the NCL solver
"""
