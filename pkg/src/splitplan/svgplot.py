"""Static SVG rendering of sweep results, with no plotting dependency.

The CSV written by the experiment runner is the source of truth; this module
only reads it back and draws one polyline per (num_devices, skip_prob)
series, the x axis being the layer count and the y axis the mean cost
difference with its 95% confidence half-width as vertical error bars.  The
output is a self-contained SVG document built from strings, so any external
plotting tool can be used instead by consuming the same CSV.
"""

from __future__ import annotations

import csv
from pathlib import Path

WIDTH = 660
HEIGHT = 420
MARGIN_LEFT = 70
MARGIN_RIGHT = 170
MARGIN_TOP = 30
MARGIN_BOTTOM = 50

PALETTE = (
    "#1f77b4",
    "#d62728",
    "#2ca02c",
    "#9467bd",
    "#ff7f0e",
    "#17becf",
    "#8c564b",
    "#7f7f7f",
)


def _coord(value: float) -> str:
    return f"{value:.2f}"


def _read_series(csv_path: str | Path) -> dict[tuple[int, float], list[tuple[int, float, float]]]:
    """Group CSV rows into (devices, skip_prob) -> sorted (layers, mean, ci)."""
    series: dict[tuple[int, float], list[tuple[int, float, float]]] = {}
    with open(csv_path, newline="", encoding="utf-8") as handle:
        for row in csv.DictReader(handle):
            key = (int(row["num_devices"]), float(row["skip_prob"]))
            series.setdefault(key, []).append(
                (
                    int(row["num_layers"]),
                    float(row["mean_cost_diff"]),
                    float(row["ci95_halfwidth"]),
                )
            )
    for points in series.values():
        points.sort()
    return series


def _ticks(low: float, high: float, count: int = 5) -> list[float]:
    if high <= low:
        return [low]
    step = (high - low) / (count - 1)
    return [low + i * step for i in range(count)]


def render_sweep(csv_path: str | Path) -> str:
    """Build the SVG document for a sweep CSV and return it as text."""
    series = _read_series(csv_path)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" '
        f'height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]
    if not series:
        parts.append(
            f'<text x="{WIDTH / 2:.0f}" y="{HEIGHT / 2:.0f}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="16" fill="#444">no data</text>'
        )
        parts.append("</svg>")
        return "\n".join(parts) + "\n"

    xs = [layers for points in series.values() for layers, _, _ in points]
    lows = [mean - ci for points in series.values() for _, mean, ci in points]
    highs = [mean + ci for points in series.values() for _, mean, ci in points]
    x_min, x_max = min(xs), max(xs)
    y_min, y_max = min(0.0, min(lows)), max(highs)
    if x_max == x_min:
        x_min, x_max = x_min - 1, x_max + 1
    if y_max == y_min:
        y_max = y_min + 1.0

    plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM

    def to_x(value: float) -> float:
        return MARGIN_LEFT + (value - x_min) / (x_max - x_min) * plot_w

    def to_y(value: float) -> float:
        return MARGIN_TOP + (y_max - value) / (y_max - y_min) * plot_h

    axis_y = MARGIN_TOP + plot_h
    parts.append(
        f'<line x1="{MARGIN_LEFT}" y1="{axis_y}" x2="{MARGIN_LEFT + plot_w}" '
        f'y2="{axis_y}" stroke="#333" stroke-width="1"/>'
    )
    parts.append(
        f'<line x1="{MARGIN_LEFT}" y1="{MARGIN_TOP}" x2="{MARGIN_LEFT}" '
        f'y2="{axis_y}" stroke="#333" stroke-width="1"/>'
    )
    for value in sorted(set(xs)):
        x = to_x(value)
        parts.append(
            f'<line x1="{_coord(x)}" y1="{axis_y}" x2="{_coord(x)}" '
            f'y2="{axis_y + 5}" stroke="#333" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{_coord(x)}" y="{axis_y + 20}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="11" fill="#333">{value}</text>'
        )
    for value in _ticks(y_min, y_max):
        y = to_y(value)
        parts.append(
            f'<line x1="{MARGIN_LEFT - 5}" y1="{_coord(y)}" x2="{MARGIN_LEFT}" '
            f'y2="{_coord(y)}" stroke="#333" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{MARGIN_LEFT - 9}" y="{_coord(y + 4)}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11" fill="#333">{value:.3g}</text>'
        )
    parts.append(
        f'<text x="{MARGIN_LEFT + plot_w / 2:.0f}" y="{HEIGHT - 12}" '
        f'text-anchor="middle" font-family="sans-serif" font-size="13" '
        f'fill="#333">layers</text>'
    )
    parts.append(
        f'<text x="16" y="{MARGIN_TOP + plot_h / 2:.0f}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="13" fill="#333" '
        f'transform="rotate(-90 16 {MARGIN_TOP + plot_h / 2:.0f})">'
        f"mean cost difference</text>"
    )

    legend_x = MARGIN_LEFT + plot_w + 18
    for row, key in enumerate(sorted(series)):
        devices, skip_prob = key
        color = PALETTE[row % len(PALETTE)]
        points = series[key]
        coords = " ".join(
            f"{_coord(to_x(layers))},{_coord(to_y(mean))}" for layers, mean, _ in points
        )
        parts.append(
            f'<polyline points="{coords}" fill="none" stroke="{color}" '
            f'stroke-width="1.5"/>'
        )
        for layers, mean, ci in points:
            x, y = to_x(layers), to_y(mean)
            if ci > 0.0:
                top, bottom = to_y(mean + ci), to_y(mean - ci)
                parts.append(
                    f'<line x1="{_coord(x)}" y1="{_coord(top)}" x2="{_coord(x)}" '
                    f'y2="{_coord(bottom)}" stroke="{color}" stroke-width="1"/>'
                )
                for cap in (top, bottom):
                    parts.append(
                        f'<line x1="{_coord(x - 3)}" y1="{_coord(cap)}" '
                        f'x2="{_coord(x + 3)}" y2="{_coord(cap)}" '
                        f'stroke="{color}" stroke-width="1"/>'
                    )
            parts.append(
                f'<circle cx="{_coord(x)}" cy="{_coord(y)}" r="2.5" fill="{color}"/>'
            )
        label_y = MARGIN_TOP + 12 + row * 18
        parts.append(
            f'<line x1="{legend_x}" y1="{label_y - 4}" x2="{legend_x + 18}" '
            f'y2="{label_y - 4}" stroke="{color}" stroke-width="1.5"/>'
        )
        parts.append(
            f'<text x="{legend_x + 24}" y="{label_y}" font-family="sans-serif" '
            f'font-size="11" fill="#333">devices={devices}, skip={skip_prob:g}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_sweep_svg(csv_path: str | Path, svg_path: str | Path) -> None:
    """Render the sweep CSV to an SVG file, leaving the CSV untouched."""
    Path(svg_path).write_text(render_sweep(csv_path), encoding="utf-8")
