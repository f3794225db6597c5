"""qdiode_figs: figures from qdiode sweep CSV files.

Consumes only the producer's CSV contract (the fixed 14-column schema);
it never imports the simulator.
"""

from .plots import KINDS, PlotSpec, render
from .schema import COLUMNS, Row, SchemaError, read_rows

__version__ = "0.1.0"

__all__ = [
    "COLUMNS",
    "KINDS",
    "PlotSpec",
    "Row",
    "SchemaError",
    "read_rows",
    "render",
    "__version__",
]
