"""CSV emission.  Floats are written with 17 significant digits."""
from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .reconstruction import ReconstructedState

SNAPSHOT_FIELDS = ("r", "u", "u_tilde", "g", "g_tilde", "w", "z", "mass_aspect")
TIMESERIES_FIELDS = ("t", "l2_u", "g0", "dissipation", "bondi_mass", "energy_budget_residual")
CONVERGENCE_FIELDS = ("N", "h", "E_u", "rate_u", "E_g", "rate_g")


def fmt(x) -> str:
    if x is None or (isinstance(x, float) and np.isnan(x)):
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def write_csv(path, header, rows) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])
    return path


def snapshot_name(t: float) -> str:
    return f"snap_t{float(t):g}.csv"


def snapshot_rows(state: ReconstructedState, points_per_element: int = 20):
    """Uniform plot grid; node values are left limits except at ``r = 0``."""
    p = int(points_per_element)
    xi = -1.0 + 2.0 * np.arange(p + 1) / p
    vals = state.at_reference(xi)
    cols = []
    for name in SNAPSHOT_FIELDS:
        arr = vals[name]
        cols.append(np.concatenate([arr[0, :1], arr[:, 1:].ravel()]))
    return np.column_stack(cols)


def write_snapshot(out_dir, t, state, points_per_element=20) -> Path:
    return write_csv(Path(out_dir) / snapshot_name(t), SNAPSHOT_FIELDS,
                     snapshot_rows(state, points_per_element))


def write_timeseries(out_dir, records) -> Path:
    return write_csv(Path(out_dir) / "timeseries.csv", TIMESERIES_FIELDS,
                     (rec.as_row() for rec in records))


GNUPLOT_STUB = """\
# gnuplot script stub: profiles of u~, g~ and g for every snapshot
set datafile separator ","
set key autotitle columnhead
set multiplot layout 1,3
{plots}
unset multiplot
"""


def write_gnuplot(out_dir, snapshot_files) -> Path:
    files = [Path(f).name for f in snapshot_files]
    plots = []
    for col in ("u_tilde", "g_tilde", "g"):
        parts = ", ".join(f"'{f}' using \"r\":\"{col}\" with lines title '{f}'" for f in files)
        plots.append(f"plot {parts}")
    path = Path(out_dir) / "plot.gp"
    path.write_text(GNUPLOT_STUB.format(plots="\n".join(plots)))
    return path
