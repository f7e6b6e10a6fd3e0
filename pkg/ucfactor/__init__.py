"""ucfactor - Factorizations of unconditionally summable sequences and multiplier symbol splitting."""

__version__ = "1.0.0"
