"""Diagnostic figures for lagmart replication CSVs."""

__version__ = "0.1.0"

from .density import kde, silverman_bandwidth
from .figures import FigureData, build_all, render
from .records import ReplicationTable, SchemaError, read_table

__all__ = [
    "__version__",
    "kde",
    "silverman_bandwidth",
    "FigureData",
    "build_all",
    "render",
    "ReplicationTable",
    "SchemaError",
    "read_table",
]
