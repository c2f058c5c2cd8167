"""Minimal deterministic SVG line plots.

Output is a pure function of the data: fixed styling, no timestamps,
coordinates rounded to a fixed precision. Good enough for CDF curves
and pattern cuts; not a plotting library.
"""

import math

_PALETTE = ["#1f6fb2", "#c4502e", "#3a8a4d", "#7d5ba6", "#a08020", "#555555"]

_MARGIN_L = 62.0
_MARGIN_R = 16.0
_MARGIN_T = 34.0
_MARGIN_B = 46.0


def _finite_points(x, y):
    pts = []
    for xv, yv in zip(x, y):
        xv = float(xv)
        yv = float(yv)
        if math.isfinite(xv) and math.isfinite(yv):
            pts.append((xv, yv))
    return pts


def _bounds(values):
    lo = min(values)
    hi = max(values)
    if lo == hi:
        lo -= 0.5
        hi += 0.5
    pad = 0.05 * (hi - lo)
    return lo - pad, hi + pad


def _ticks(lo, hi, n=5):
    return [lo + (hi - lo) * i / (n - 1) for i in range(n)]


def _fmt(v):
    return f"{v:.6g}"


def line_plot(path, series, title="", xlabel="", ylabel="", width=640, height=420):
    """Write an SVG polyline chart.

    series is a list of (label, x values, y values); non-finite points
    are dropped. Empty series after filtering are drawn as nothing but
    keep their legend entry.
    """
    plotted = [(label, _finite_points(x, y)) for label, x, y in series]
    all_pts = [p for _, pts in plotted for p in pts]
    if all_pts:
        x_lo, x_hi = _bounds([p[0] for p in all_pts])
        y_lo, y_hi = _bounds([p[1] for p in all_pts])
    else:
        x_lo, x_hi, y_lo, y_hi = 0.0, 1.0, 0.0, 1.0

    plot_w = width - _MARGIN_L - _MARGIN_R
    plot_h = height - _MARGIN_T - _MARGIN_B

    def sx(v):
        return _MARGIN_L + (v - x_lo) / (x_hi - x_lo) * plot_w

    def sy(v):
        return _MARGIN_T + plot_h - (v - y_lo) / (y_hi - y_lo) * plot_h

    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        '<g font-family="sans-serif" font-size="12" fill="#222222">',
    ]
    if title:
        lines.append(
            f'<text x="{width / 2:.1f}" y="20" text-anchor="middle" '
            f'font-size="14">{title}</text>'
        )

    # frame and ticks
    lines.append(
        f'<rect x="{_MARGIN_L:.1f}" y="{_MARGIN_T:.1f}" width="{plot_w:.1f}" '
        f'height="{plot_h:.1f}" fill="none" stroke="#888888"/>'
    )
    for tx in _ticks(x_lo, x_hi):
        px = sx(tx)
        lines.append(
            f'<line x1="{px:.2f}" y1="{_MARGIN_T + plot_h:.1f}" x2="{px:.2f}" '
            f'y2="{_MARGIN_T + plot_h + 5:.1f}" stroke="#888888"/>'
        )
        lines.append(
            f'<text x="{px:.2f}" y="{_MARGIN_T + plot_h + 18:.1f}" '
            f'text-anchor="middle">{_fmt(tx)}</text>'
        )
    for ty in _ticks(y_lo, y_hi):
        py = sy(ty)
        lines.append(
            f'<line x1="{_MARGIN_L - 5:.1f}" y1="{py:.2f}" x2="{_MARGIN_L:.1f}" '
            f'y2="{py:.2f}" stroke="#888888"/>'
        )
        lines.append(
            f'<text x="{_MARGIN_L - 8:.1f}" y="{py + 4:.2f}" '
            f'text-anchor="end">{_fmt(ty)}</text>'
        )
    if xlabel:
        lines.append(
            f'<text x="{_MARGIN_L + plot_w / 2:.1f}" y="{height - 10:.1f}" '
            f'text-anchor="middle">{xlabel}</text>'
        )
    if ylabel:
        lines.append(
            f'<text x="16" y="{_MARGIN_T + plot_h / 2:.1f}" text-anchor="middle" '
            f'transform="rotate(-90 16 {_MARGIN_T + plot_h / 2:.1f})">{ylabel}</text>'
        )

    for si, (label, pts) in enumerate(plotted):
        color = _PALETTE[si % len(_PALETTE)]
        if pts:
            coords = " ".join(f"{sx(px):.2f},{sy(py):.2f}" for px, py in pts)
            lines.append(
                f'<polyline points="{coords}" fill="none" stroke="{color}" '
                'stroke-width="1.5"/>'
            )
        if label:
            ly = _MARGIN_T + 14 + 16 * si
            lx = _MARGIN_L + plot_w - 130
            lines.append(
                f'<line x1="{lx:.1f}" y1="{ly - 4:.1f}" x2="{lx + 18:.1f}" '
                f'y2="{ly - 4:.1f}" stroke="{color}" stroke-width="1.5"/>'
            )
            lines.append(f'<text x="{lx + 24:.1f}" y="{ly:.1f}">{label}</text>')

    lines.append("</g>")
    lines.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
