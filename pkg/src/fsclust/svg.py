"""Minimal static SVG charts: log-log Fisher-Shannon scatter and silhouette curves."""
import math
from xml.sax.saxutils import escape

PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f"]
MARKERS = ["circle", "triangle", "square", "diamond"]

W, H = 560, 440
LEFT, RIGHT, TOP, BOTTOM = 70, 20, 40, 55


def _fmt(v):
    return f"{v:.2f}".rstrip("0").rstrip(".")


def _num(v):
    return f"{v:.6g}"


def _log_ticks(lo, hi):
    a, b = math.floor(math.log10(lo)), math.ceil(math.log10(hi))
    mults = (1,) if b - a >= 2 else (1, 2, 5)
    ticks = [m * 10.0**e for e in range(a, b + 1) for m in mults]
    return [t for t in ticks if lo <= t <= hi] or [lo, hi]


def _lin_ticks(lo, hi, count=5):
    step = (hi - lo) / count
    mag = 10 ** math.floor(math.log10(step))
    step = min((s * mag for s in (1, 2, 5, 10) if s * mag >= step), default=step)
    first = math.ceil(lo / step) * step
    out = []
    t = first
    while t <= hi + 1e-12:
        out.append(round(t, 12))
        t += step
    return out


def _header(title, xlabel, ylabel):
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="11">',
        f'<rect width="{W}" height="{H}" fill="white"/>',
        f'<text x="{W / 2}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<text x="{(LEFT + W - RIGHT) / 2}" y="{H - 12}" text-anchor="middle">{escape(xlabel)}</text>',
        f'<text x="16" y="{(TOP + H - BOTTOM) / 2}" text-anchor="middle" transform="rotate(-90 16 {(TOP + H - BOTTOM) / 2})">{escape(ylabel)}</text>',
        f'<rect x="{LEFT}" y="{TOP}" width="{W - LEFT - RIGHT}" height="{H - TOP - BOTTOM}" fill="none" stroke="black"/>',
    ]


def _axes(parts, xticks, yticks, sx, sy, fmt):
    for t in xticks:
        x = sx(t)
        parts.append(f'<line x1="{_num(x)}" y1="{H - BOTTOM}" x2="{_num(x)}" y2="{H - BOTTOM + 5}" stroke="black"/>')
        parts.append(f'<text x="{_num(x)}" y="{H - BOTTOM + 18}" text-anchor="middle">{fmt(t)}</text>')
    for t in yticks:
        y = sy(t)
        parts.append(f'<line x1="{LEFT - 5}" y1="{_num(y)}" x2="{LEFT}" y2="{_num(y)}" stroke="black"/>')
        parts.append(f'<text x="{LEFT - 8}" y="{_num(y + 4)}" text-anchor="end">{fmt(t)}</text>')


def _marker(kind, x, y, color, r=5):
    if kind == "circle":
        return f'<circle cx="{_num(x)}" cy="{_num(y)}" r="{r}" fill="{color}"/>'
    if kind == "square":
        return f'<rect x="{_num(x - r)}" y="{_num(y - r)}" width="{2 * r}" height="{2 * r}" fill="{color}"/>'
    if kind == "triangle":
        pts = f"{_num(x)},{_num(y - r)} {_num(x - r)},{_num(y + r)} {_num(x + r)},{_num(y + r)}"
    else:
        pts = f"{_num(x)},{_num(y - r)} {_num(x - r)},{_num(y)} {_num(x)},{_num(y + r)} {_num(x + r)},{_num(y)}"
    return f'<polygon points="{pts}" fill="{color}"/>'


def _padded_log_range(values):
    lo, hi = min(values), max(values)
    la, lb = math.log10(lo), math.log10(hi)
    pad = max(0.1 * (lb - la), 0.05)
    return 10 ** (la - pad), 10 ** (lb + pad)


def fs_plane_svg(points, labels=None, title="Fisher-Shannon plane"):
    """Log-log scatter of (SEP, FIM); colour and marker shape encode the cluster label."""
    xs = [p.sep for p in points]
    ys = [p.fim for p in points]
    x0, x1 = _padded_log_range(xs)
    y0, y1 = _padded_log_range(ys)
    pw, ph = W - LEFT - RIGHT, H - TOP - BOTTOM

    def sx(v):
        return LEFT + pw * (math.log10(v) - math.log10(x0)) / (math.log10(x1) - math.log10(x0))

    def sy(v):
        return H - BOTTOM - ph * (math.log10(v) - math.log10(y0)) / (math.log10(y1) - math.log10(y0))

    parts = _header(title, "Shannon entropy power", "Fisher information measure")
    _axes(parts, _log_ticks(x0, x1), _log_ticks(y0, y1), sx, sy, lambda t: f"{t:g}")
    # isoperimetric bound N * I = 1
    xa, xb = max(x0, 1 / y1), min(x1, 1 / y0)
    if xa < xb:
        parts.append(
            f'<line x1="{_num(sx(xa))}" y1="{_num(sy(1 / xa))}" x2="{_num(sx(xb))}" y2="{_num(sy(1 / xb))}" '
            'stroke="gray" stroke-dasharray="4 3"/>'
        )
    for i, p in enumerate(points):
        lab = 0 if labels is None else int(labels[i])
        x, y = sx(p.sep), sy(p.fim)
        parts.append(_marker(MARKERS[lab % len(MARKERS)], x, y, PALETTE[lab % len(PALETTE)]))
        parts.append(f'<text x="{_num(x + 7)}" y="{_num(y - 6)}">{escape(p.id)}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def silhouette_svg(curves, title="Average silhouette width"):
    """Average silhouette against k; ``curves`` maps a series name to ``{k: value}``."""
    ks = sorted({k for c in curves.values() for k in c})
    vals = [v for c in curves.values() for v in c.values()]
    if not ks:
        ks, vals = [2, 3], [0.0, 1.0]
    k0, k1 = min(ks) - 0.5, max(ks) + 0.5
    v0, v1 = min(0.0, min(vals)), max(1.0, max(vals))
    pw, ph = W - LEFT - RIGHT, H - TOP - BOTTOM

    def sx(v):
        return LEFT + pw * (v - k0) / (k1 - k0)

    def sy(v):
        return H - BOTTOM - ph * (v - v0) / (v1 - v0)

    parts = _header(title, "number of clusters k", "average silhouette width")
    _axes(parts, ks, _lin_ticks(v0, v1), sx, sy, lambda t: f"{t:g}" if float(t).is_integer() else _fmt(t))
    for j, (name, c) in enumerate(curves.items()):
        color = PALETTE[j % len(PALETTE)]
        pts = sorted(c.items())
        path = " ".join(f"{_num(sx(k))},{_num(sy(v))}" for k, v in pts)
        parts.append(f'<polyline points="{path}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        for k, v in pts:
            parts.append(_marker(MARKERS[j % len(MARKERS)], sx(k), sy(v), color, r=4))
        parts.append(f'<text x="{W - RIGHT - 8}" y="{TOP + 16 + 14 * j}" text-anchor="end" fill="{color}">{escape(str(name))}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
