"""Figure rendering for overlay simulator sweep metrics."""

from .render import SchemaError, read_rows, render, series_for

__all__ = ["SchemaError", "read_rows", "render", "series_for"]
