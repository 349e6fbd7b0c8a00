"""Figure rendering for torusharmonics exports.

This package never imports the numeric core. It consumes the CSV files
the solver CLI writes (field grids, convergence tables, condition-number
sweeps) and renders deterministic PNG figures from them.
"""

from .io import PlotInputError, condition_series, convergence_series, field_grid
from .render import render_condition, render_convergence, render_field, tile_field

__version__ = "0.1.0"

__all__ = [
    "PlotInputError",
    "condition_series",
    "convergence_series",
    "field_grid",
    "render_condition",
    "render_convergence",
    "render_field",
    "tile_field",
]
