"""Self-contained SVG emission for method comparison plots.

The files are written directly (no plotting toolkit, no font metrics), with
fixed coordinate formatting, so repeated runs produce byte-identical output
that CI can diff.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

WIDTH, HEIGHT = 720, 440
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 64, 160, 28, 44

COLORS = {
    "measurement": "#9467bd",
    "dmd": "#1f77b4",
    "mz-dmd": "#d62728",
    "t-model": "#2ca02c",
    "projection": "#7f7f7f",
}
_FALLBACK_COLORS = ("#8c564b", "#e377c2", "#17becf", "#bcbd22")


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def _series_color(name: str, index: int) -> str:
    return COLORS.get(name, _FALLBACK_COLORS[index % len(_FALLBACK_COLORS)])


def emit_plot(times, series: dict, path, ylabel: str = "y") -> None:
    """Write one SVG comparing the given series over a common time axis.

    ``series`` maps a method name to ``(values, variance_or_None)``; methods
    with a variance get a shaded band at mean +- sqrt(variance).
    """
    times = np.asarray(times, dtype=float).ravel()
    if times.size < 2:
        raise ValueError("need at least two time points to plot")

    lo, hi = np.inf, -np.inf
    for values, var in series.values():
        values = np.asarray(values, dtype=float).ravel()
        lo = min(lo, values.min())
        hi = max(hi, values.max())
        if var is not None:
            band = np.sqrt(np.asarray(var, dtype=float).ravel())
            lo = min(lo, (values - band).min())
            hi = max(hi, (values + band).max())
    if hi <= lo:
        hi = lo + 1.0
    pad = 0.05 * (hi - lo)
    lo, hi = lo - pad, hi + pad

    t0, t1 = float(times[0]), float(times[-1])
    plot_w = WIDTH - MARGIN_L - MARGIN_R
    plot_h = HEIGHT - MARGIN_T - MARGIN_B

    def px(t):
        return MARGIN_L + (t - t0) / (t1 - t0) * plot_w

    def py(v):
        return MARGIN_T + (hi - v) / (hi - lo) * plot_h

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{plot_w}" height="{plot_h}" '
        f'fill="none" stroke="#333333" stroke-width="1"/>',
    ]

    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        tx = t0 + frac * (t1 - t0)
        out.append(
            f'<text x="{_fmt(px(tx))}" y="{HEIGHT - MARGIN_B + 18}" font-size="11" '
            f'font-family="monospace" text-anchor="middle">{tx:.3g}</text>'
        )
        vy = lo + frac * (hi - lo)
        out.append(
            f'<text x="{MARGIN_L - 6}" y="{_fmt(py(vy) + 4)}" font-size="11" '
            f'font-family="monospace" text-anchor="end">{vy:.3g}</text>'
        )
    out.append(
        f'<text x="{MARGIN_L + plot_w / 2:.1f}" y="{HEIGHT - 8}" font-size="12" '
        f'font-family="monospace" text-anchor="middle">t</text>'
    )
    out.append(
        f'<text x="16" y="{MARGIN_T + plot_h / 2:.1f}" font-size="12" '
        f'font-family="monospace" text-anchor="middle">{ylabel}</text>'
    )

    # bands first so the lines draw on top of them
    for index, (name, (values, var)) in enumerate(series.items()):
        if var is None:
            continue
        values = np.asarray(values, dtype=float).ravel()
        band = np.sqrt(np.asarray(var, dtype=float).ravel())
        upper = [f"{_fmt(px(t))},{_fmt(py(v))}" for t, v in zip(times, values + band)]
        lower = [
            f"{_fmt(px(t))},{_fmt(py(v))}"
            for t, v in zip(times[::-1], (values - band)[::-1])
        ]
        color = _series_color(name, index)
        out.append(
            f'<path d="M {" L ".join(upper + lower)} Z" fill="{color}" '
            f'fill-opacity="0.2" stroke="none"/>'
        )

    for index, (name, (values, _)) in enumerate(series.items()):
        values = np.asarray(values, dtype=float).ravel()
        pts = " ".join(f"{_fmt(px(t))},{_fmt(py(v))}" for t, v in zip(times, values))
        color = _series_color(name, index)
        out.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>'
        )

    legend_x = WIDTH - MARGIN_R + 12
    for index, name in enumerate(series):
        y = MARGIN_T + 16 + 20 * index
        color = _series_color(name, index)
        out.append(
            f'<line x1="{legend_x}" y1="{y}" x2="{legend_x + 24}" y2="{y}" '
            f'stroke="{color}" stroke-width="2"/>'
        )
        out.append(
            f'<text x="{legend_x + 30}" y="{y + 4}" font-size="12" '
            f'font-family="monospace">{name}</text>'
        )

    out.append("</svg>")
    Path(path).write_text("\n".join(out) + "\n")
