"""Deterministic matplotlib rendering of solver exports.

Pure file-to-file transforms: fixed figure geometry, explicit PNG
metadata, no timestamps or environment-dependent styling, so identical
inputs produce byte-identical images on a given matplotlib install.
"""

import matplotlib

matplotlib.use("Agg")

import numpy as np
from matplotlib.figure import Figure

from .io import condition_series, convergence_series, field_grid

PNG_METADATA = {"Software": "torusplots"}
DPI = 150

# Field figures are 6x6 inches with a pixel-square axes box, so an
# equal-aspect square cell fills it exactly; the colorbar sits beside it.
FIELD_SIZE = (6.0, 6.0)
FIELD_RECT = (0.10, 0.10, 0.72, 0.72)
CBAR_RECT = (0.86, 0.10, 0.04, 0.72)

LINE_SIZE = (6.0, 4.5)
LINE_RECT = (0.14, 0.12, 0.80, 0.82)


def tile_field(values, tiles):
    """Periodic tiling of a masked cell grid, tiles x tiles copies."""
    if tiles < 1:
        raise ValueError("tiles must be >= 1")
    data = np.tile(np.ma.filled(values, np.nan), (tiles, tiles))
    return np.ma.masked_invalid(data)


def _save(fig, out_path):
    fig.savefig(out_path, dpi=DPI, metadata=PNG_METADATA)


def render_field(in_path, out_path, tiles=3):
    """Tiled filled-contour view of a field export; holes stay blank."""
    values, (x0, y0, period_x, period_y) = field_grid(in_path)
    tiled = tile_field(values, tiles)
    fig = Figure(figsize=FIELD_SIZE, dpi=DPI)
    ax = fig.add_axes(FIELD_RECT)
    cax = fig.add_axes(CBAR_RECT)
    cmap = matplotlib.colormaps["viridis"].copy()
    cmap.set_bad("white")
    image = ax.imshow(
        tiled, origin="lower", interpolation="nearest", cmap=cmap,
        extent=(x0, x0 + tiles * period_x, y0, y0 + tiles * period_y))
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    fig.colorbar(image, cax=cax)
    _save(fig, out_path)


def _render_lines(m, series, ylabel, out_path, legend):
    fig = Figure(figsize=LINE_SIZE, dpi=DPI)
    ax = fig.add_axes(LINE_RECT)
    for label, logs in series.items():
        points = [(x, y) for x, y in zip(m, logs) if y is not None]
        if not points:
            continue
        ax.plot([p[0] for p in points], [p[1] for p in points],
                marker="o", label=label)
    ax.set_xlabel("degrees of freedom m")
    ax.set_ylabel(ylabel)
    ax.grid(True, alpha=0.3)
    if legend:
        ax.legend()
    _save(fig, out_path)


def render_convergence(in_path, out_path):
    """Error or residual decay against basis size, log10 on the y axis."""
    m, series = convergence_series(in_path)
    _render_lines(m, series, "log10(error)", out_path,
                  legend=len(series) > 1)


def render_condition(in_path, out_path):
    """Condition-number growth of the collocation products."""
    m, series = condition_series(in_path)
    _render_lines(m, series, "log10(condition number)", out_path,
                  legend=True)
