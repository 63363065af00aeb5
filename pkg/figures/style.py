"""Fixed plot styling; keep all look-and-feel choices in one place."""

STYLE = {
    "dot_color": "#4878cf",
    "dot_alpha": 0.45,
    "dot_size": 14,
    "mean_color": "#d1495b",
    "mean_linewidth": 1.8,
    "mean_marker": "o",
    "mean_markersize": 4,
    "grid_alpha": 0.3,
    "figwidth_per_panel": 4.2,
    "figheight": 3.4,
    "dpi": 120,
}
