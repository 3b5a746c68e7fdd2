"""Offline renderer for gdlab trajectory CSV files."""

from .render import CsvFormatError, FigureSpec, Panel, RenderResult, render

__version__ = "0.1.0"
