"""Deterministic SVG drawings of solved trees.

Terminals (sources and the sink) are filled circles, Steiner points are open
circles, edges are lines annotated with their flow.  The viewport is fitted
to the bounding box of all nodes with a 10% margin, and all numbers are
formatted with a fixed precision, so identical trees yield byte-identical
files.
"""

from __future__ import annotations

from .trees import SolvedTree

WIDTH = 640.0
MARGIN_FRACTION = 0.10
NODE_RADIUS = 5.0


def _fmt(value: float) -> str:
    return f"{value:.4f}"


def render_svg(tree: SolvedTree) -> str:
    points = tree.all_positions()
    xs = [p.x for p in points]
    ys = [p.y for p in points]
    span_x = max(xs) - min(xs)
    span_y = max(ys) - min(ys)
    span = max(span_x, span_y, 1e-9)
    margin = MARGIN_FRACTION * span
    scale = WIDTH / (span + 2.0 * margin)
    height = (span_y + 2.0 * margin) * scale
    x0 = min(xs) - margin
    y1 = max(ys) + margin

    def to_screen(p):
        return (p.x - x0) * scale, (y1 - p.y) * scale  # y grows downward on screen

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{_fmt(WIDTH)}" height="{_fmt(height)}" '
        f'viewBox="0 0 {_fmt(WIDTH)} {_fmt(height)}">',
    ]
    topo = tree.topology
    for child in topo.edge_children():
        ax, ay = to_screen(tree.position(child))
        bx, by = to_screen(tree.position(topo.parents[child]))
        lines.append(
            f'  <line class="edge" x1="{_fmt(ax)}" y1="{_fmt(ay)}" '
            f'x2="{_fmt(bx)}" y2="{_fmt(by)}" stroke="#444444" stroke-width="1.5"/>'
        )
        mx, my = (ax + bx) / 2.0, (ay + by) / 2.0
        lines.append(
            f'  <text class="flow" x="{_fmt(mx + 4.0)}" y="{_fmt(my - 4.0)}" '
            f'font-size="11" fill="#666666">{tree.flows[child]:.6g}</text>'
        )
    for node in range(topo.n_nodes):
        cx, cy = to_screen(tree.position(node))
        if topo.is_terminal(node):
            lines.append(
                f'  <circle class="terminal" cx="{_fmt(cx)}" cy="{_fmt(cy)}" '
                f'r="{_fmt(NODE_RADIUS)}" fill="#222222"/>'
            )
        else:
            lines.append(
                f'  <circle class="steiner" cx="{_fmt(cx)}" cy="{_fmt(cy)}" '
                f'r="{_fmt(NODE_RADIUS)}" fill="#ffffff" stroke="#222222" stroke-width="1.5"/>'
            )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
