"""Minimal SVG rendering of utility polygons."""

from xml.sax.saxutils import escape

import numpy as np

WIDTH = 480
HEIGHT = 400
PAD = 48


def _fmt(x: float) -> str:
    return f"{x:.3f}"


def render(layers, title: str = "") -> str:
    """``layers`` is a list of (vertices, style) with style keys stroke, fill, dashed, label."""
    pts = np.concatenate([np.asarray(v, dtype=float).reshape(-1, 2) for v, _ in layers])
    lo = pts.min(axis=0)
    hi = pts.max(axis=0)
    span = np.where(hi - lo > 0, hi - lo, 1.0)
    lo = lo - 0.05 * span
    span = span * 1.1

    def xy(p):
        x = PAD + (p[0] - lo[0]) / span[0] * (WIDTH - 2 * PAD)
        y = HEIGHT - PAD - (p[1] - lo[1]) / span[1] * (HEIGHT - 2 * PAD)
        return f"{_fmt(x)},{_fmt(y)}"

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        '<rect width="100%" height="100%" fill="white"/>',
        f'<line x1="{PAD}" y1="{HEIGHT - PAD}" x2="{WIDTH - PAD}" y2="{HEIGHT - PAD}" stroke="black"/>',
        f'<line x1="{PAD}" y1="{PAD}" x2="{PAD}" y2="{HEIGHT - PAD}" stroke="black"/>',
        f'<text x="{WIDTH / 2}" y="{HEIGHT - 12}" text-anchor="middle" font-size="13">consumer utility</text>',
        f'<text x="14" y="{HEIGHT / 2}" text-anchor="middle" font-size="13" transform="rotate(-90 14 {HEIGHT / 2})">producer utility</text>',
    ]
    for k in (0, 1):
        for t in np.linspace(lo[k], lo[k] + span[k], 5):
            p = (t, lo[1]) if k == 0 else (lo[0], t)
            x, y = xy(p).split(",")
            if k == 0:
                out.append(f'<text x="{x}" y="{float(y) + 16:.3f}" text-anchor="middle" font-size="10">{t:.3g}</text>')
            else:
                out.append(f'<text x="{float(x) - 6:.3f}" y="{y}" text-anchor="end" font-size="10">{t:.3g}</text>')
    if title:
        out.append(f'<text x="{WIDTH / 2}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>')
    for verts, style in layers:
        v = np.asarray(verts, dtype=float).reshape(-1, 2)
        dash = ' stroke-dasharray="6,4"' if style.get("dashed") else ""
        stroke = style.get("stroke", "black")
        fill = style.get("fill", "none")
        if len(v) == 1:
            x, y = xy(v[0]).split(",")
            out.append(f'<circle cx="{x}" cy="{y}" r="3" fill="{stroke}"/>')
        else:
            pts_attr = " ".join(xy(p) for p in v)
            out.append(f'<polygon points="{pts_attr}" fill="{fill}" fill-opacity="0.25" stroke="{stroke}"{dash}/>')
        if style.get("label"):
            x, y = xy(v.mean(axis=0)).split(",")
            out.append(f'<text x="{x}" y="{y}" font-size="12" fill="{stroke}">{escape(style["label"])}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
