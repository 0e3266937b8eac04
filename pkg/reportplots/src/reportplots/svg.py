"""Minimal deterministic SVG string building.

Figures are pure functions of their inputs: fixed canvas sizes, coordinates
formatted with fixed precision, no timestamps or generator metadata, so the
same data always produces the same bytes.
"""

from __future__ import annotations

from xml.sax.saxutils import escape

FONT = "monospace"


def fmt(value: float) -> str:
    text = f"{value:.2f}"
    return "0.00" if text == "-0.00" else text


def rect(x, y, w, h, fill: str, stroke: str = "none") -> str:
    return (
        f'<rect x="{fmt(x)}" y="{fmt(y)}" width="{fmt(w)}" height="{fmt(h)}" '
        f'fill="{fill}" stroke="{stroke}"/>'
    )


def line(x1, y1, x2, y2, stroke: str = "#444444", width: float = 1.0) -> str:
    return (
        f'<line x1="{fmt(x1)}" y1="{fmt(y1)}" x2="{fmt(x2)}" y2="{fmt(y2)}" '
        f'stroke="{stroke}" stroke-width="{fmt(width)}"/>'
    )


def polyline(points, stroke: str, width: float = 1.5, opacity: float = 1.0) -> str:
    coords = " ".join(f"{fmt(x)},{fmt(y)}" for x, y in points)
    return (
        f'<polyline points="{coords}" fill="none" stroke="{stroke}" '
        f'stroke-width="{fmt(width)}" stroke-opacity="{fmt(opacity)}"/>'
    )


def text(x, y, content: str, size: int = 12, fill: str = "#111111", anchor: str = "start") -> str:
    return (
        f'<text x="{fmt(x)}" y="{fmt(y)}" font-family="{FONT}" font-size="{size}" '
        f'fill="{fill}" text-anchor="{anchor}">{escape(content)}</text>'
    )


def document(width: int, height: int, elements: list[str]) -> str:
    body = "\n".join(elements)
    return (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">\n'
        f'{rect(0, 0, width, height, "#ffffff")}\n'
        f"{body}\n"
        "</svg>\n"
    )


class Scale:
    """Affine map from data coordinates to a pixel interval."""

    def __init__(self, lo: float, hi: float, pix_lo: float, pix_hi: float):
        if hi <= lo:
            hi = lo + 1.0
        self.lo, self.hi = lo, hi
        self.pix_lo, self.pix_hi = pix_lo, pix_hi

    def __call__(self, value: float) -> float:
        frac = (value - self.lo) / (self.hi - self.lo)
        return self.pix_lo + frac * (self.pix_hi - self.pix_lo)

    def ticks(self, count: int = 5) -> list[float]:
        step = (self.hi - self.lo) / (count - 1)
        return [self.lo + i * step for i in range(count)]
