"""Figure rendering for bms result tables."""

from .render import CsvFormatError, PlotSpec, RenderResult, Series, load_series, render

__all__ = ["CsvFormatError", "PlotSpec", "RenderResult", "Series", "load_series", "render"]
