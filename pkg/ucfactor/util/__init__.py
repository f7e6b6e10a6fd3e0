"""Utility modules for ucfactor."""
