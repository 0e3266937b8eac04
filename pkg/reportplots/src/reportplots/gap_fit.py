"""Gap-marginal histograms overlaid with their theoretical exponential density."""

from __future__ import annotations

import math

import numpy as np

from . import svg
from .io import gap_ks_checks, read_csv_columns, read_verdict

PANEL_W = 320
PANEL_H = 260
MARGIN = 46
N_BINS = 40
BAR_COLOR = "#9ecae1"
CURVE_COLOR = "#d62728"


def _panel(elements, offset_x, samples, gap_index, rate, pvalue):
    x0, y0 = offset_x + MARGIN, 24
    plot_w, plot_h = PANEL_W - MARGIN - 12, PANEL_H - 24 - MARGIN

    x_max = float(np.max(samples))
    edges = np.linspace(0.0, x_max, N_BINS + 1)
    counts, _ = np.histogram(samples, bins=edges)
    density = counts / (len(samples) * (edges[1] - edges[0]))

    curve_x = np.linspace(0.0, x_max, 129)
    curve_y = rate * np.exp(-rate * curve_x)
    y_max = max(float(density.max()), float(curve_y.max())) * 1.08

    sx = svg.Scale(0.0, x_max, x0, x0 + plot_w)
    sy = svg.Scale(0.0, y_max, y0 + plot_h, y0)

    for i in range(N_BINS):
        if density[i] > 0:
            top = sy(density[i])
            elements.append(
                svg.rect(sx(edges[i]), top, sx(edges[i + 1]) - sx(edges[i]), sy(0.0) - top, BAR_COLOR)
            )
    elements.append(svg.polyline(zip(sx(curve_x), sy(curve_y)), CURVE_COLOR, width=1.8))

    # frame and ticks
    elements.append(svg.line(x0, y0, x0, y0 + plot_h))
    elements.append(svg.line(x0, y0 + plot_h, x0 + plot_w, y0 + plot_h))
    for tick in sx.ticks():
        elements.append(svg.line(sx(tick), y0 + plot_h, sx(tick), y0 + plot_h + 4))
        elements.append(svg.text(sx(tick), y0 + plot_h + 16, f"{tick:.2f}", size=9, anchor="middle"))
    for tick in sy.ticks():
        elements.append(svg.line(x0 - 4, sy(tick), x0, sy(tick)))
        elements.append(svg.text(x0 - 6, sy(tick) + 3, f"{tick:.2f}", size=9, anchor="end"))

    # annotations quote the verdict values verbatim
    elements.append(svg.text(x0, 14, f"gap {gap_index}: rate={rate!r}", size=11))
    elements.append(svg.text(x0, y0 + 12, f"KS p={pvalue!r}", size=10, fill="#555555"))


def plot_gap_fit(raw_csv, verdict_json, out_svg) -> str:
    """Histogram each KS-tested gap column with its fitted density curve.

    Panels follow the ks-gap checks of the verdict; rate and p-value
    annotations repeat the verdict JSON values exactly.  Returns the SVG
    text (also written to ``out_svg``).
    """
    verdict = read_verdict(verdict_json)
    checks = gap_ks_checks(verdict)
    required = [f"gap_{i + 1}" for i in range(len(checks))]
    columns = read_csv_columns(raw_csv, required)

    elements: list[str] = []
    for panel, check in enumerate(checks):
        gap_index = panel + 1
        samples = np.asarray(columns[f"gap_{gap_index}"])
        _panel(
            elements,
            panel * PANEL_W,
            samples,
            gap_index,
            check["rate"],
            check["pvalue"],
        )
    width = PANEL_W * len(checks)
    content = svg.document(width, PANEL_H, elements)
    with open(out_svg, "w", encoding="utf-8", newline="") as fh:
        fh.write(content)
    return content


def expected_curve(rate: float, x: float) -> float:
    """Density of the fitted exponential, for cross-checks."""
    return rate * math.exp(-rate * x)
