"""Particle-count growth figures: log N(x) against x, one line per seed."""

from __future__ import annotations

import warnings

import numpy as np

from . import svg
from .io import read_csv_columns

WIDTH = 560
HEIGHT = 400
MARGIN = 52
LINE_COLOR = "#3182bd"
FIT_COLOR = "#d62728"


def plot_growth(raw_csv, out_svg, x_range: tuple[float, float] | None = None) -> str:
    """Draw log N(x) for every seeded sample with the median fitted slope.

    The slope annotation repeats the per-seed least-squares slopes' median,
    computed from the slope column, and the growth parameter a the samples
    were drawn with.  ``x_range`` restricts the drawn window; parts outside
    the data are clipped with a warning.  Returns the SVG text.
    """
    columns = read_csv_columns(raw_csv, ["seed", "slope", "a", "x", "log_count"])
    seeds = np.asarray(columns["seed"])
    xs = np.asarray(columns["x"])
    logs = np.asarray(columns["log_count"])

    x_lo, x_hi = float(xs.min()), float(xs.max())
    if x_range is not None:
        lo, hi = float(x_range[0]), float(x_range[1])
        if lo < x_lo or hi > x_hi:
            warnings.warn(
                f"requested x-range [{lo}, {hi}] exceeds the data window "
                f"[{x_lo}, {x_hi}]; clipping",
                stacklevel=2,
            )
        x_lo, x_hi = max(lo, x_lo), min(hi, x_hi)
        if not x_hi > x_lo:
            raise ValueError("x-range does not intersect the data window")

    keep = (xs >= x_lo) & (xs <= x_hi)
    y_lo, y_hi = float(logs[keep].min()), float(logs[keep].max())

    sx = svg.Scale(x_lo, x_hi, MARGIN, WIDTH - 16)
    sy = svg.Scale(y_lo, y_hi, HEIGHT - MARGIN, 24)

    elements: list[str] = []
    slopes = {}
    for seed in np.unique(seeds):
        mask = (seeds == seed) & keep
        if not mask.any():
            continue
        slopes[seed] = columns["slope"][int(np.nonzero(seeds == seed)[0][0])]
        points = sorted(zip(xs[mask], logs[mask]))
        elements.append(
            svg.polyline(((sx(x), sy(y)) for x, y in points), LINE_COLOR, width=0.8, opacity=0.35)
        )

    median_slope = float(np.median(list(slopes.values())))
    a_value = columns["a"][0]
    # reference line with the median slope through the window midpoint
    mid_x = 0.5 * (x_lo + x_hi)
    mid_y = 0.5 * (y_lo + y_hi)
    ref = [
        (x_lo, mid_y + median_slope * (x_lo - mid_x)),
        (x_hi, mid_y + median_slope * (x_hi - mid_x)),
    ]
    elements.append(svg.polyline([(sx(x), sy(y)) for x, y in ref], FIT_COLOR, width=1.6))

    elements.append(svg.line(MARGIN, 24, MARGIN, HEIGHT - MARGIN))
    elements.append(svg.line(MARGIN, HEIGHT - MARGIN, WIDTH - 16, HEIGHT - MARGIN))
    for tick in sx.ticks(6):
        elements.append(svg.line(sx(tick), HEIGHT - MARGIN, sx(tick), HEIGHT - MARGIN + 4))
        elements.append(svg.text(sx(tick), HEIGHT - MARGIN + 16, f"{tick:.1f}", size=9, anchor="middle"))
    for tick in sy.ticks(6):
        elements.append(svg.line(MARGIN - 4, sy(tick), MARGIN, sy(tick)))
        elements.append(svg.text(MARGIN - 6, sy(tick) + 3, f"{tick:.1f}", size=9, anchor="end"))

    elements.append(svg.text(MARGIN, 14, f"median slope={median_slope!r} target a={a_value!r}", size=11))
    elements.append(
        svg.text(WIDTH - 16, 14, f"{len(slopes)} seeds", size=10, fill="#555555", anchor="end")
    )

    content = svg.document(WIDTH, HEIGHT, elements)
    with open(out_svg, "w", encoding="utf-8", newline="") as fh:
        fh.write(content)
    return content
