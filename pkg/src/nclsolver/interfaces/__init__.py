"""
Interfaces Module - User-facing entry points
"""
