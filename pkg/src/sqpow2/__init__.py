"""Verification suite for sums of four prime squares and powers of 2."""

__version__ = "0.1.0"
