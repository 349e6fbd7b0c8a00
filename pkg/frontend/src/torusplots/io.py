"""CSV ingestion for solver exports.

Inputs are the text artifacts the solver CLI writes: field grids with
header 'x,y,u' and convergence tables with a 'k_max,m,...' header.
Numeric cells are decimal strings at whatever precision the producer ran,
so magnitudes routinely sit far outside float range; anything destined
for a log scale goes through Decimal instead of float.
"""

import csv
from decimal import Decimal, InvalidOperation

import numpy as np


class PlotInputError(Exception):
    """Malformed or unusable input artifact."""


def read_table(path):
    """(header, rows) from a CSV file; every row matches the header width."""
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise PlotInputError(f"{path}: empty file") from None
            rows = list(reader)
    except OSError as e:
        raise PlotInputError(f"{path}: {e.strerror or e}") from None
    width = len(header)
    for lineno, row in enumerate(rows, start=2):
        if len(row) != width:
            raise PlotInputError(
                f"{path}:{lineno}: expected {width} columns, got {len(row)}")
    if not rows:
        raise PlotInputError(f"{path}: no data rows")
    return header, rows


def _as_float(cell, path, what):
    if cell == "nan":
        return np.nan
    try:
        return float(cell)
    except ValueError:
        raise PlotInputError(f"{path}: bad {what} value {cell!r}") from None


def field_grid(path):
    """Masked (ny, nx) array plus cell geometry from an 'x,y,u' export.

    The exporter walks a half-open rectangular grid of the fundamental
    cell, one row per node, holes written as u = nan. Returns
    (values, (x0, y0, period_x, period_y)) with nan cells masked; the
    periods are n * spacing, so tiling the array tiles the torus.
    """
    header, rows = read_table(path)
    if header != ["x", "y", "u"]:
        raise PlotInputError(f"{path}: expected header 'x,y,u'")
    xs = np.array([_as_float(r[0], path, "x") for r in rows])
    ys = np.array([_as_float(r[1], path, "y") for r in rows])
    us = np.array([_as_float(r[2], path, "u") for r in rows])
    if np.isnan(xs).any() or np.isnan(ys).any():
        raise PlotInputError(f"{path}: nan grid coordinate")
    ux = np.unique(xs)
    uy = np.unique(ys)
    nx, ny = len(ux), len(uy)
    if nx < 2 or ny < 2:
        raise PlotInputError(f"{path}: grid must be at least 2x2")
    if nx * ny != len(rows):
        raise PlotInputError(
            f"{path}: {len(rows)} rows do not fill a {nx}x{ny} rectangle "
            "(skew cells are not renderable)")
    dx = np.diff(ux)
    dy = np.diff(uy)
    if (dx.max() - dx.min()) > 1e-9 * dx.max() or \
            (dy.max() - dy.min()) > 1e-9 * dy.max():
        raise PlotInputError(f"{path}: grid spacing is not uniform")
    arr = np.full((ny, nx), np.nan)
    counts = np.zeros((ny, nx), dtype=int)
    ix = np.searchsorted(ux, xs)
    iy = np.searchsorted(uy, ys)
    arr[iy, ix] = us
    np.add.at(counts, (iy, ix), 1)
    if (counts != 1).any():
        raise PlotInputError(f"{path}: duplicate or missing grid nodes")
    geometry = (float(ux[0]), float(uy[0]),
                float(nx * dx[0]), float(ny * dy[0]))
    return np.ma.masked_invalid(arr), geometry


_UNPLOTTABLE = {"", "nan", "inf", "-inf", "+inf"}


def log10_column(header, rows, name, path):
    """log10 of a positive decimal-string column; unusable cells -> None.

    Decimal, not float: exported errors at high precision sit far below
    the smallest positive double.
    """
    j = header.index(name)
    out = []
    for row in rows:
        cell = row[j].strip()
        if cell.lower() in _UNPLOTTABLE:
            out.append(None)
            continue
        try:
            d = Decimal(cell)
        except InvalidOperation:
            raise PlotInputError(
                f"{path}: bad {name} value {cell!r}") from None
        if not d.is_finite() or d <= 0:
            out.append(None)
        else:
            out.append(float(d.log10()))
    return out


def _table_with_status(path, required):
    header, rows = read_table(path)
    for col in required:
        if col not in header:
            raise PlotInputError(f"{path}: missing column '{col}'")
    status = header.index("status")
    kept = [r for r in rows if r[status] == "ok"]
    if not kept:
        raise PlotInputError(f"{path}: no 'ok' rows to plot")
    jm = header.index("m")
    try:
        m = [int(r[jm]) for r in kept]
    except ValueError:
        raise PlotInputError(f"{path}: non-integer m column") from None
    return header, kept, m


def convergence_series(path):
    """(m values, {label: log10 errors}) from a convergence export.

    Laplace sweeps carry one 'sup_error' column; Steklov sweeps carry one
    'res_i' residual column per tracked candidate. Rows whose status is
    not 'ok' are dropped.
    """
    header, rows, m = _table_with_status(path, ("k_max", "m", "status"))
    if "sup_error" in header:
        names = ["sup_error"]
    else:
        names = [c for c in header
                 if c.startswith("res_") and c[4:].isdigit()]
        if not names:
            raise PlotInputError(f"{path}: no error columns found")
    series = {name.replace("_", " "): log10_column(header, rows, name, path)
              for name in names}
    return m, series


def condition_series(path):
    """(m values, {label: log10 cond}) from a condition-column export."""
    header, rows, m = _table_with_status(
        path, ("k_max", "m", "cond_btb", "cond_bta", "status"))
    series = {
        "$B^t B$": log10_column(header, rows, "cond_btb", path),
        "$B^t A$": log10_column(header, rows, "cond_bta", path),
    }
    return m, series
