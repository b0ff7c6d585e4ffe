"""Figure renderer for fullbatch-lb experiment CSVs."""

from .figures import EmptyInputError, FigureSpec, SchemaError, render

__version__ = "0.1.0"
