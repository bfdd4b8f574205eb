"""Figures from gaahsim result files, coupled only through the file formats."""

from .io import SchemaError, Table, read_fit, read_table
from .render import render
from .spec import KINDS, REQUIRED_COLUMNS, FigureSpec, load_spec

__version__ = "0.1.0"

__all__ = [
    "FigureSpec",
    "KINDS",
    "REQUIRED_COLUMNS",
    "SchemaError",
    "Table",
    "load_spec",
    "read_fit",
    "read_table",
    "render",
    "__version__",
]
