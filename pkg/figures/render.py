#!/usr/bin/env python3
"""Render sweep CSV files as scatter-plus-mean-line figures.

Reads one or more CSVs in the sweep schema (header
``pmax,trial,...metrics...,seed_used``), draws one panel per requested
metric with a dot per trial and a line through the per-pmax means, and
writes a raster image.

Usage: render.py --csv sweep.csv [more.csv ...] --metrics re,nmse --out fig.png
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from style import STYLE  # noqa: E402


@dataclass
class FigureSpec:
    csv_paths: list
    metrics: list
    out_path: str
    xlabel: str = "P_max"


@dataclass
class PanelData:
    """Everything one panel draws: trial dots and the per-level mean line."""

    metric: str
    dots_x: list = field(default_factory=list)
    dots_y: list = field(default_factory=list)
    levels: list = field(default_factory=list)
    means: list = field(default_factory=list)


def load_rows(csv_paths):
    """Parse the sweep CSVs; empty metric cells become None."""
    header = None
    rows = []
    for path in csv_paths:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            try:
                file_header = next(reader)
            except StopIteration:
                raise ValueError(f"{path}: empty file") from None
            if header is None:
                header = file_header
            elif file_header != header:
                raise ValueError(f"{path}: header differs from first file")
            for cells in reader:
                rows.append(
                    {
                        name: (float(cell) if cell else None)
                        for name, cell in zip(header, cells)
                    }
                )
    return header, rows


def collect_panel(rows, metric):
    """Dots and per-pmax arithmetic means for one metric column."""
    panel = PanelData(metric)
    by_level = {}
    for row in rows:
        value = row.get(metric)
        if value is None:
            continue
        pmax = row["pmax"]
        panel.dots_x.append(pmax)
        panel.dots_y.append(value)
        by_level.setdefault(pmax, []).append(value)
    for level in sorted(by_level):
        values = by_level[level]
        panel.levels.append(level)
        panel.means.append(sum(values) / len(values))
    return panel


def render(spec: FigureSpec):
    """Draw the figure and write it; returns the per-panel data."""
    header, rows = load_rows(spec.csv_paths)
    for metric in spec.metrics:
        if metric not in header:
            raise KeyError(metric)
    panels = [collect_panel(rows, metric) for metric in spec.metrics]

    width = STYLE["figwidth_per_panel"] * len(panels)
    fig, axes = plt.subplots(
        1, len(panels), figsize=(width, STYLE["figheight"]), squeeze=False
    )
    for ax, panel in zip(axes[0], panels):
        ax.scatter(
            panel.dots_x,
            panel.dots_y,
            s=STYLE["dot_size"],
            c=STYLE["dot_color"],
            alpha=STYLE["dot_alpha"],
            edgecolors="none",
        )
        ax.plot(
            panel.levels,
            panel.means,
            color=STYLE["mean_color"],
            linewidth=STYLE["mean_linewidth"],
            marker=STYLE["mean_marker"],
            markersize=STYLE["mean_markersize"],
            label="mean",
        )
        ax.set_xlabel(spec.xlabel)
        ax.set_ylabel(panel.metric)
        ax.grid(alpha=STYLE["grid_alpha"])
        if panel.levels:
            ax.legend()
    fig.tight_layout()
    fig.savefig(spec.out_path, dpi=STYLE["dpi"])
    plt.close(fig)
    return panels


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="Render sweep CSVs")
    parser.add_argument("--csv", nargs="+", required=True)
    parser.add_argument("--metrics", required=True, help="comma-separated column names")
    parser.add_argument("--out", required=True)
    parser.add_argument("--xlabel", default="P_max")
    args = parser.parse_args(argv)
    spec = FigureSpec(
        csv_paths=args.csv,
        metrics=[m for m in args.metrics.split(",") if m],
        out_path=args.out,
        xlabel=args.xlabel,
    )
    try:
        render(spec)
    except KeyError as exc:
        print(f"render: column {exc.args[0]!r} not in the CSV header", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"render: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
