"""Turn Monte Carlo summary CSVs into error-versus-sample-size figures.

The input is the CSV written by the simulation harness: one row per
(experiment, estimator, sample size) cell with the cell's RMSE already
computed.  Rendering is pure presentation — every number on the page
comes straight out of the file, nothing is re-estimated here.

Rows are grouped into panels by a chosen column (by default the
experiment id), and within each panel one curve is drawn per estimator.
Both axes default to log scale, where a power-law error decay is a
straight line; a dashed guide with slope -3/4 is drawn for comparison,
that being the decay rate of the estimators' error for boundaries with
Lipschitz smoothness.
"""

import csv
import math
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

GUIDE_SLOPE = -0.75


class SchemaError(ValueError):
    """The CSV lacks a column (or the header itself) that the figure needs."""


@dataclass(frozen=True)
class FigureSpec:
    """What to read, how to split it into panels, where to draw it."""

    csv_paths: tuple
    out_path: str
    panel_key: str = "experiment_id"
    logx: bool = True
    logy: bool = True

    def __post_init__(self):
        object.__setattr__(self, "csv_paths", tuple(self.csv_paths))
        if not self.csv_paths:
            raise ValueError("need at least one CSV path")
        if not str(self.out_path):
            raise ValueError("need an output image path")


@dataclass(frozen=True)
class RenderReport:
    """Counts describing what was drawn, for audits and tests.

    ``curves_per_panel``, ``legend_entries`` and ``xtick_counts`` are
    ordered like ``panel_names``, which follows first appearance in the
    input.
    """

    out_path: str
    panel_count: int
    panel_names: tuple
    curves_per_panel: tuple
    legend_entries: tuple
    xtick_counts: tuple


def _read_rows(path, panel_key):
    """Parse one CSV into (panel, estimator, n, rmse) tuples."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise SchemaError(f"{path}: empty file, no header row")
        missing = [c for c in (panel_key, "estimator", "n", "rmse")
                   if c not in reader.fieldnames]
        if missing:
            raise SchemaError(
                f"{path}: missing required column(s): {', '.join(missing)}")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            try:
                rows.append((row[panel_key], row["estimator"],
                             int(row["n"]), float(row["rmse"])))
            except (TypeError, ValueError):
                raise ValueError(
                    f"{path}: malformed row at line {lineno}") from None
        return rows


def _collect(spec):
    """Nested mapping panel -> estimator -> {n: rmse}; insertion order is
    first appearance, and a repeated (panel, estimator, n) cell is
    overwritten by the later occurrence."""
    panels = {}
    for path in spec.csv_paths:
        for panel, est, n, rmse in _read_rows(path, spec.panel_key):
            panels.setdefault(panel, {}).setdefault(est, {})[n] = rmse
    return panels


def _guide_line(ax, points):
    """Dashed n^(-3/4) reference through the panel's log-log centroid."""
    ns = sorted({n for n, _ in points})
    logc = [math.log(r) - GUIDE_SLOPE * math.log(n)
            for n, r in points if r > 0]
    if len(ns) < 2 or not logc:
        return
    c = math.exp(sum(logc) / len(logc))
    ax.plot([ns[0], ns[-1]], [c * x ** GUIDE_SLOPE for x in (ns[0], ns[-1])],
            linestyle="--", color="0.4", linewidth=1.0, label="_nolegend_")


def render(spec: FigureSpec) -> RenderReport:
    """Draw the figure described by ``spec`` and write it to disk.

    One axes per panel, side by side, in one image file (the extension
    picks the format, .png or .svg).  The x ticks are exactly the
    sample sizes appearing in the panel.  A CSV with a header but no
    data rows yields a single empty axes rather than an error.
    """
    panels = _collect(spec)
    names = tuple(panels)
    count = len(names)
    fig, axes = plt.subplots(1, max(count, 1),
                             figsize=(4.6 * max(count, 1), 3.8),
                             squeeze=False)
    curves, legends, ticks = [], [], []
    for ax, name in zip(axes[0], names):
        estimators = panels[name]
        points = []
        for est, cells in estimators.items():
            ns = sorted(cells)
            ax.plot(ns, [cells[n] for n in ns], marker="o", label=est)
            points.extend((n, cells[n]) for n in ns)
        if spec.logx:
            ax.set_xscale("log")
        if spec.logy:
            ax.set_yscale("log")
        if spec.logx and spec.logy:
            _guide_line(ax, points)
        panel_ns = sorted({n for n, _ in points})
        ax.set_xticks(panel_ns)
        ax.set_xticklabels([str(n) for n in panel_ns])
        ax.minorticks_off()
        ax.set_title(str(name))
        ax.set_xlabel("sample size n")
        ax.set_ylabel("RMSE")
        ax.legend()
        curves.append(len(estimators))
        legends.append(tuple(estimators))
        ticks.append(len(ax.get_xticks()))
    if count == 0:
        axes[0][0].set_title("no data")
        axes[0][0].set_xlabel("sample size n")
        axes[0][0].set_ylabel("RMSE")
    fig.tight_layout()
    fig.savefig(spec.out_path)
    plt.close(fig)
    return RenderReport(out_path=str(spec.out_path), panel_count=count,
                        panel_names=names, curves_per_panel=tuple(curves),
                        legend_entries=tuple(legends),
                        xtick_counts=tuple(ticks))


def render_rmse_panels(csv_paths, panel_key="experiment_id", *, out_path,
                       logx=True, logy=True) -> RenderReport:
    """One-call wrapper: build the ``FigureSpec`` and render it."""
    return render(FigureSpec(csv_paths=tuple(csv_paths), out_path=out_path,
                             panel_key=panel_key, logx=logx, logy=logy))
