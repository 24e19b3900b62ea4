"""
Unit tests for the NCL solver building blocks
"""
