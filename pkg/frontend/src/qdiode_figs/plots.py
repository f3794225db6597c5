"""Figure rendering over sweep CSV rows.

One plot kind per producer preset family: theta x delta heatmaps, a
metric-vs-detuning line plot with one curve per photon number, the
coherent-drive plateau curve, and a 2x2 panel comparing all four contrast
metrics along one sweep.  Heatmap color scales are diverging and
symmetric about zero: the sign of the contrast is the device direction,
so zero must sit at the visual midpoint.

Non-converged rows carry NaN metrics; heatmaps mask those cells and line
plots let them break the curve, so refused points are visible as gaps
rather than interpolated over.
"""

from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .schema import SchemaError, read_rows

KINDS = ("heatmap", "line", "plateau", "metric-compare")
METRICS = ("r1", "r2", "r3", "r4")

_DPI = 150


@dataclass(frozen=True)
class PlotSpec:
    """One figure request: a CSV in, an image file out."""

    csv_path: str
    kind: str
    out_path: str
    value: str = "r1"
    title: str = ""
    x_label: str = ""
    y_label: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"plot kind must be one of {KINDS}, got {self.kind!r}")
        if self.value not in METRICS:
            raise ValueError(f"value must be one of {METRICS}, got {self.value!r}")


def _groups(rows):
    """Rows bucketed by photon number, Fock groups first, sorted."""
    by_n = {}
    for row in rows:
        by_n.setdefault(row.n, []).append(row)
    return sorted(by_n.items(), key=lambda kv: (kv[0] is None, kv[0] or 0))


def _label(n):
    return f"n = {n}" if n is not None else "coherent"


def _require(rows, column, kind):
    kept = [r for r in rows if getattr(r, column) is not None]
    if not kept:
        raise SchemaError(
            f"{kind} plot needs {column} values but the column is empty"
        )
    return kept


def _value_array(rows, name):
    return np.array(
        [np.nan if getattr(r, name) is None else getattr(r, name) for r in rows]
    )


def _heatmap(spec, rows, fig):
    rows = _require(rows, "delta_over_gamma", spec.kind)
    rows = _require(rows, "theta_over_2pi", spec.kind)
    groups = _groups(rows)
    axes = fig.subplots(1, len(groups), squeeze=False)[0]
    finite = [
        abs(getattr(r, spec.value))
        for r in rows
        if getattr(r, spec.value) is not None
        and np.isfinite(getattr(r, spec.value))
    ]
    # symmetric about zero even when the data is one-sided
    limit = max(finite) if finite else 1.0
    limit = limit or 1.0
    cmap = plt.get_cmap("RdBu_r").copy()
    cmap.set_bad("0.75")
    mesh = None
    for axis, (n, members) in zip(axes, groups):
        deltas = sorted({r.delta_over_gamma for r in members})
        thetas = sorted({r.theta_over_2pi for r in members})
        index = {
            (r.theta_over_2pi, r.delta_over_gamma): getattr(r, spec.value)
            for r in members
        }
        grid = np.full((len(thetas), len(deltas)), np.nan)
        for i, theta in enumerate(thetas):
            for j, delta in enumerate(deltas):
                cell = index.get((theta, delta))
                if cell is not None:
                    grid[i, j] = cell
        mesh = axis.imshow(
            np.ma.masked_invalid(grid),
            origin="lower",
            aspect="auto",
            extent=(deltas[0], deltas[-1], thetas[0], thetas[-1]),
            cmap=cmap,
            vmin=-limit,
            vmax=limit,
        )
        axis.set_title(_label(n), fontsize=9)
        axis.set_xlabel(spec.x_label or "detuning / decay rate")
    axes[0].set_ylabel(spec.y_label or "propagation phase / 2pi")
    fig.colorbar(mesh, ax=list(axes), label=spec.value, fraction=0.03)


def _line(spec, rows, fig):
    rows = _require(rows, "delta_over_gamma", spec.kind)
    axis = fig.subplots()
    for n, members in _groups(rows):
        members = sorted(members, key=lambda r: r.delta_over_gamma)
        axis.plot(
            [r.delta_over_gamma for r in members],
            _value_array(members, spec.value),
            label=_label(n),
            linewidth=1.2,
        )
    axis.axhline(0.0, color="0.6", linewidth=0.8, linestyle="--")
    axis.set_xlabel(spec.x_label or "detuning / decay rate")
    axis.set_ylabel(spec.y_label or spec.value)
    axis.legend(fontsize=8)


def _plateau(spec, rows, fig):
    rows = _require(rows, "flux_over_gamma", spec.kind)
    axis = fig.subplots()
    rows = sorted(rows, key=lambda r: r.flux_over_gamma)
    axis.semilogx(
        [r.flux_over_gamma for r in rows],
        _value_array(rows, spec.value),
        linewidth=1.2,
    )
    axis.set_xlabel(spec.x_label or "photon flux / decay rate")
    axis.set_ylabel(spec.y_label or spec.value)


def _metric_compare(spec, rows, fig):
    rows = _require(rows, "delta_over_gamma", spec.kind)
    axes = fig.subplots(2, 2, sharex=True)
    for axis, metric in zip(axes.flat, METRICS):
        for n, members in _groups(rows):
            members = sorted(members, key=lambda r: r.delta_over_gamma)
            axis.plot(
                [r.delta_over_gamma for r in members],
                _value_array(members, metric),
                label=_label(n),
                linewidth=1.2,
            )
        axis.axhline(0.0, color="0.6", linewidth=0.8, linestyle="--")
        axis.set_title(metric, fontsize=9)
    for axis in axes[1]:
        axis.set_xlabel(spec.x_label or "detuning / decay rate")
    axes.flat[0].legend(fontsize=8)


_BUILDERS = {
    "heatmap": _heatmap,
    "line": _line,
    "plateau": _plateau,
    "metric-compare": _metric_compare,
}


def _figsize(kind, rows):
    if kind == "heatmap":
        panels = len({r.n for r in rows})
        return (3.2 * panels + 1.4, 3.6)
    if kind == "metric-compare":
        return (7.2, 5.4)
    return (6.4, 4.2)


def _build_figure(spec: PlotSpec, rows):
    """Assemble the figure without touching the filesystem (test hook)."""
    fig = plt.figure(figsize=_figsize(spec.kind, rows))
    _BUILDERS[spec.kind](spec, rows, fig)
    if spec.title:
        fig.suptitle(spec.title)
    return fig


def render(spec: PlotSpec) -> str:
    """Read the CSV, build the figure, write the image file.

    Validation happens before anything is written, so a bad input never
    leaves a file behind.  Returns the output path.
    """
    rows = read_rows(spec.csv_path)
    fig = _build_figure(spec, rows)
    try:
        fig.savefig(spec.out_path, dpi=_DPI)
    finally:
        plt.close(fig)
    return spec.out_path
