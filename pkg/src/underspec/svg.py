"""Heatmap of a probability grid as a standalone SVG document.

Cells are axis-aligned rectangles on a log-n horizontal axis and a linear
difference axis. Colours come from a fixed 9-stop sequential ramp (the
ColorBrewer YlOrRd stops), linearly blended between stops over [0, 0.5].
The threshold contour is drawn solid; a comparison contour, when given,
dashed.
"""
import math
from xml.sax.saxutils import escape

YLORRD = ("#ffffcc", "#ffeda0", "#fed976", "#feb24c", "#fd8d3c",
          "#fc4e2a", "#e31a1c", "#bd0026", "#800026")
INVALID_FILL = "#d9d9d9"
COLOR_MAX = 0.5

WIDTH, HEIGHT = 640, 420
LEFT, RIGHT, TOP, BOTTOM = 70, 90, 40, 55


def _hex(c):
    return tuple(int(c[i:i + 2], 16) for i in (1, 3, 5))


def ramp(p, stops=YLORRD, vmax=COLOR_MAX):
    """Colour for probability ``p``; values at or above ``vmax`` get the last stop."""
    if math.isnan(p):
        return INVALID_FILL
    t = min(max(p / vmax, 0.0), 1.0) * (len(stops) - 1)
    i = min(int(t), len(stops) - 2)
    f = t - i
    lo, hi = _hex(stops[i]), _hex(stops[i + 1])
    return "#%02x%02x%02x" % tuple(round(a + (b - a) * f) for a, b in zip(lo, hi))


def _edges(values, log):
    """Cell boundaries: midpoints between centres, mirrored at the ends."""
    v = [math.log10(x) for x in values] if log else list(values)
    if len(v) == 1:
        half = 0.5 if log else max(abs(v[0]) * 0.5, 0.005)
        return [v[0] - half, v[0] + half]
    mids = [(a + b) / 2 for a, b in zip(v, v[1:])]
    return [v[0] - (mids[0] - v[0])] + mids + [v[-1] + (v[-1] - mids[-1])]


def _f(x):
    return f"{x:.2f}"


def _polyline(points, dashed):
    if len(points) < 2:
        return ""
    path = " ".join(f"{_f(x)},{_f(y)}" for x, y in points)
    dash = ' stroke-dasharray="6,4"' if dashed else ""
    return f'<polyline points="{path}" fill="none" stroke="#08306b" stroke-width="2"{dash}/>'


def render_heatmap(result, comparison=None, title=None):
    """SVG text for a ``GridResult``; ``comparison`` supplies the dashed contour."""
    spec = result.spec
    ns, ds = spec.n_values, spec.delta_values
    xe, ye = _edges(ns, True), _edges(ds, False)
    pw, ph = WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM

    def sx(logn):
        return LEFT + (logn - xe[0]) / (xe[-1] - xe[0]) * pw

    def sy(d):
        return TOP + ph - (d - ye[0]) / (ye[-1] - ye[0]) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
           f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">',
           f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>']
    if title:
        out.append(f'<text x="{WIDTH / 2}" y="20" text-anchor="middle" font-size="13">{escape(title)}</text>')

    for i in range(len(ds)):
        y0, y1 = sy(ye[i + 1]), sy(ye[i])
        for j in range(len(ns)):
            x0, x1 = sx(xe[j]), sx(xe[j + 1])
            out.append(f'<rect x="{_f(x0)}" y="{_f(y0)}" width="{_f(x1 - x0)}" '
                       f'height="{_f(y1 - y0)}" fill="{ramp(float(result.probs[i, j]))}"/>')

    def contour_points(contour):
        return [(sx(math.log10(n)), sy(d)) for n, d in zip(ns, contour) if d is not None]

    if comparison is not None:
        out.append(_polyline(contour_points(comparison.contour), dashed=True))
    out.append(_polyline(contour_points(result.contour), dashed=False))

    # axes
    x_axis = TOP + ph
    out.append(f'<line x1="{LEFT}" y1="{x_axis}" x2="{LEFT + pw}" y2="{x_axis}" stroke="black"/>')
    out.append(f'<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{x_axis}" stroke="black"/>')
    for k in range(math.ceil(xe[0]), math.floor(xe[-1]) + 1):
        x = sx(k)
        out.append(f'<line x1="{_f(x)}" y1="{x_axis}" x2="{_f(x)}" y2="{x_axis + 5}" stroke="black"/>')
        out.append(f'<text x="{_f(x)}" y="{x_axis + 18}" text-anchor="middle">{10 ** k:g}</text>')
    out.append(f'<text x="{LEFT + pw / 2}" y="{HEIGHT - 12}" text-anchor="middle">test-set size n</text>')
    for d in _nice_ticks(ye[0], ye[-1]):
        y = sy(d)
        out.append(f'<line x1="{LEFT - 5}" y1="{_f(y)}" x2="{LEFT}" y2="{_f(y)}" stroke="black"/>')
        out.append(f'<text x="{LEFT - 8}" y="{_f(y + 4)}" text-anchor="end">{d:g}</text>')
    out.append(f'<text x="18" y="{TOP + ph / 2}" text-anchor="middle" '
               f'transform="rotate(-90 18 {TOP + ph / 2})">observed difference</text>')

    # colour bar
    bx, bw = WIDTH - RIGHT + 20, 14
    steps = len(YLORRD)
    for k in range(steps):
        y0 = TOP + ph * (steps - 1 - k) / steps
        out.append(f'<rect x="{bx}" y="{_f(y0)}" width="{bw}" height="{_f(ph / steps)}" '
                   f'fill="{YLORRD[k]}"/>')
    out.append(f'<text x="{bx + bw + 4}" y="{TOP + 4}">&#8805;{COLOR_MAX:g}</text>')
    out.append(f'<text x="{bx + bw + 4}" y="{TOP + ph}">0</text>')
    out.append("</svg>")
    return "\n".join(line for line in out if line) + "\n"


def _nice_ticks(lo, hi, target=5):
    span = hi - lo
    if span <= 0:
        return []
    raw = span / target
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=10 * mag)
    start = math.ceil(lo / step) * step
    ticks = []
    k = 0
    while start + k * step <= hi + 1e-12:
        ticks.append(round(start + k * step, 10))
        k += 1
    return ticks
