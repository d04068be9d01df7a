"""Exact ball-packing widths for the two S^2-bundles over S^2."""

from .exact import QuadExt, format_number, parse_number, qx_compare, qx_sign

__version__ = "0.1.0"

__all__ = ["QuadExt", "format_number", "parse_number", "qx_compare", "qx_sign"]
