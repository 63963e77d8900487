"""Minimal self-contained SVG scatter/fit plots (no renderer dependencies).

Output is deterministic: fixed canvas, %.6g coordinate formatting, element
order fixed by input order.
"""

from pathlib import Path

WIDTH, HEIGHT = 640, 480
MARGIN = 60


def _fmt(x):
    return f"{x:.6g}"


def _ticks(lo, hi, count=5):
    span = hi - lo
    if span <= 0:
        return [lo]
    step = span / (count - 1)
    return [lo + i * step for i in range(count)]


def scatter_plot(path, points, curves=(), title="", xlabel="", ylabel=""):
    """Scatter with error bars plus overlay curves.

    points: iterable of (x, y, yerr); curves: iterable of (label, [(x, y)..]).
    """
    points = list(points)
    xs = [p[0] for p in points] + [q[0] for _, c in curves for q in c]
    ys = [p[1] + p[2] for p in points] + [p[1] - p[2] for p in points]
    ys += [q[1] for _, c in curves for q in c]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    x_pad = 0.05 * (x_hi - x_lo or 1.0)
    y_pad = 0.05 * (y_hi - y_lo or 1.0)
    x_lo, x_hi = x_lo - x_pad, x_hi + x_pad
    y_lo, y_hi = y_lo - y_pad, y_hi + y_pad

    def sx(x):
        return MARGIN + (x - x_lo) / (x_hi - x_lo) * (WIDTH - 2 * MARGIN)

    def sy(y):
        return HEIGHT - MARGIN - (y - y_lo) / (y_hi - y_lo) * (HEIGHT - 2 * MARGIN)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" '
        f'height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH // 2}" y="24" text-anchor="middle" '
        f'font-size="16">{title}</text>',
    ]
    # axes
    parts.append(
        f'<line x1="{MARGIN}" y1="{HEIGHT - MARGIN}" x2="{WIDTH - MARGIN}" '
        f'y2="{HEIGHT - MARGIN}" stroke="black"/>'
    )
    parts.append(
        f'<line x1="{MARGIN}" y1="{MARGIN}" x2="{MARGIN}" '
        f'y2="{HEIGHT - MARGIN}" stroke="black"/>'
    )
    for t in _ticks(x_lo + x_pad, x_hi - x_pad):
        parts.append(
            f'<text x="{_fmt(sx(t))}" y="{HEIGHT - MARGIN + 20}" '
            f'text-anchor="middle" font-size="11">{_fmt(t)}</text>'
        )
    for t in _ticks(y_lo + y_pad, y_hi - y_pad):
        parts.append(
            f'<text x="{MARGIN - 8}" y="{_fmt(sy(t) + 4)}" '
            f'text-anchor="end" font-size="11">{_fmt(t)}</text>'
        )
    parts.append(
        f'<text x="{WIDTH // 2}" y="{HEIGHT - 12}" text-anchor="middle" '
        f'font-size="13">{xlabel}</text>'
    )
    parts.append(
        f'<text x="16" y="{HEIGHT // 2}" text-anchor="middle" font-size="13" '
        f'transform="rotate(-90 16 {HEIGHT // 2})">{ylabel}</text>'
    )
    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"]
    for idx, (label, curve) in enumerate(curves):
        color = colors[idx % len(colors)]
        coords = " ".join(f"{_fmt(sx(x))},{_fmt(sy(y))}" for x, y in curve)
        parts.append(
            f'<polyline points="{coords}" fill="none" stroke="{color}" '
            f'stroke-width="1.5"/>'
        )
        parts.append(
            f'<text x="{WIDTH - MARGIN - 4}" y="{MARGIN + 16 * (idx + 1)}" '
            f'text-anchor="end" font-size="12" fill="{color}">{label}</text>'
        )
    for x, y, err in points:
        if err > 0:
            parts.append(
                f'<line x1="{_fmt(sx(x))}" y1="{_fmt(sy(y - err))}" '
                f'x2="{_fmt(sx(x))}" y2="{_fmt(sy(y + err))}" '
                f'stroke="#333" stroke-width="1"/>'
            )
        parts.append(
            f'<circle cx="{_fmt(sx(x))}" cy="{_fmt(sy(y))}" r="3.5" '
            f'fill="#1f77b4" stroke="black" stroke-width="0.5"/>'
        )
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n", encoding="utf-8")
