"""Text and SVG pictures of Newton diagrams."""

from __future__ import annotations

from fractions import Fraction

from .newton import NewtonDiagram


def _staircase_height(d: NewtonDiagram, a: Fraction) -> Fraction | None:
    vs = d.vertices
    for (a1, b1), (a2, b2) in zip(vs, vs[1:]):
        if a1 <= a <= a2:
            return b1 + (b2 - b1) * (a - a1) / Fraction(a2 - a1)
    return None


def ascii_diagram(d: NewtonDiagram, support: set[tuple[int, int]] | None = None) -> str:
    """Lattice picture: '#' vertices, '*' other points on a face, 'o' support, '.' below."""
    width = max(a for a, _ in d.vertices) + 1
    height = max(b for _, b in d.vertices) + 1
    on_face = {p for f in d.faces() for p in f.lattice_points()}
    lines = []
    for b in range(height, -1, -1):
        row = [f"{b:>3} "]
        for a in range(width + 1):
            if (a, b) in d.vertices:
                ch = "#"
            elif (a, b) in on_face:
                ch = "*"
            elif support and (a, b) in support:
                ch = "o"
            elif not d.contains((a, b)):
                ch = "."
            else:
                ch = " "
            row.append(ch + " ")
        lines.append("".join(row).rstrip())
    lines.append("    " + " ".join(str(a % 10) for a in range(width + 1)))
    lines.append("vertices " + str(d))
    return "\n".join(lines) + "\n"


def svg_diagram(d: NewtonDiagram, cell: int = 32) -> str:
    width = max(a for a, _ in d.vertices) + 2
    height = max(b for _, b in d.vertices) + 2
    margin = cell

    def px(a: float, b: float) -> tuple[float, float]:
        return margin + a * cell, margin + (height - b) * cell

    w_px, h_px = 2 * margin + width * cell, 2 * margin + height * cell
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w_px}" height="{h_px}" '
        f'viewBox="0 0 {w_px} {h_px}">',
        f'<rect width="{w_px}" height="{h_px}" fill="white"/>',
    ]
    x0, y0 = px(0, 0)
    xe, _ = px(width, 0)
    _, yt = px(0, height)
    out.append(f'<line x1="{x0}" y1="{y0}" x2="{xe}" y2="{y0}" stroke="black"/>')
    out.append(f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{yt}" stroke="black"/>')
    for a in range(width + 1):
        for b in range(height + 1):
            cx, cy = px(a, b)
            fill = "#bbbbbb" if d.contains((a, b)) else "#eeeeee"
            out.append(f'<circle cx="{cx}" cy="{cy}" r="2" fill="{fill}"/>')
    pts = " ".join("{},{}".format(*px(a, b)) for a, b in d.vertices)
    out.append(f'<polyline points="{pts}" fill="none" stroke="#c0392b" stroke-width="2"/>')
    for a, b in d.vertices:
        cx, cy = px(a, b)
        out.append(f'<circle cx="{cx}" cy="{cy}" r="4" fill="#c0392b"/>')
        out.append(f'<text x="{cx + 5}" y="{cy - 5}" font-family="monospace" '
                   f'font-size="12">({a},{b})</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
