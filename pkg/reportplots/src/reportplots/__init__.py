"""Offline SVG figure generation from cbpsim experiment outputs.

Consumes only the documented external formats (raw.csv, verdict.json);
never imports the simulation package.  Figures are byte-deterministic
functions of their input files.
"""

from .gap_fit import plot_gap_fit
from .growth import plot_growth
from .io import SchemaError

__version__ = "0.1.0"
__all__ = ["plot_gap_fit", "plot_growth", "SchemaError"]
