"""Architectural smell detection and smell-based issue/change-proneness prediction."""

__version__ = "0.1.0"
