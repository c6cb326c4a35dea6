"""Linear logic with ordinal-indexed fixed points."""

__version__ = "0.1.0"
