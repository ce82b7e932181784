"""Static SVG rendering of patches with optional edge overlays.

Layout is a purely cosmetic radial embedding: BFS layers sit on circles
whose radii shrink geometrically (a disk-like look for fast-growing
patches), and every vertex receives an angular wedge inside its parent's,
split among children in rotation order. Coordinates carry no mathematical
meaning; the combinatorics is the contract.
"""

from __future__ import annotations

import math
from collections import deque

from .planar import RotationGraph

__all__ = ["radial_layout", "render_svg"]


def radial_layout(g: RotationGraph, root: int = 0, rho: float = 0.72):
    """Positions in the unit disk: BFS-tree wedge layout with geometrically
    shrinking layer radii."""
    parent = {root: None}
    children = {v: [] for v in range(g.n)}
    order = [root]
    depth = {root: 0}
    q = deque([root])
    while q:
        v = q.popleft()
        rot = [int(w) for w in g.rotation(v)]
        if parent[v] is not None:
            k = rot.index(parent[v])
            rot = rot[k + 1:] + rot[:k]
        for w in rot:
            if w not in parent:
                parent[w] = v
                depth[w] = depth[v] + 1
                children[v].append(w)
                order.append(w)
                q.append(w)
    weight = {v: 1 for v in range(g.n)}
    for v in reversed(order):
        if children[v]:
            weight[v] = sum(weight[c] for c in children[v])
    max_depth = max(depth.values()) if depth else 1
    radii = [0.0]
    for k in range(1, max_depth + 1):
        radii.append(radii[-1] + rho ** (k - 1))
    scale = radii[-1] or 1.0
    radii = [r / scale for r in radii]

    pos = {}
    span = {root: (0.0, 2 * math.pi)}
    for v in order:
        lo, hi = span[v]
        theta = 0.5 * (lo + hi)
        r = radii[depth[v]]
        pos[v] = (r * math.cos(theta), r * math.sin(theta))
        total = sum(weight[c] for c in children[v]) or 1
        cur = lo
        for c in children[v]:
            frac = weight[c] / total
            span[c] = (cur, cur + frac * (hi - lo))
            cur += frac * (hi - lo)
    return pos


def render_svg(g: RotationGraph, path, overlay_edges=None, root: int = 0,
               size: int = 900, comment: str = ""):
    """Write an SVG: patch edges in gray, overlay edges (e.g. an embedded
    tree) in red on top."""
    pos = radial_layout(g, root=root)
    pad = 0.06 * size
    half = size / 2 - pad

    def xy(v):
        x, y = pos[v]
        return (size / 2 + half * x, size / 2 - half * y)

    overlay = set()
    for (a, b) in (overlay_edges or []):
        overlay.add((a, b) if a < b else (b, a))
    lines = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" '
             f'height="{size}" viewBox="0 0 {size} {size}">']
    if comment:
        lines.append(f"<!-- {comment} -->")
    lines.append('<rect width="100%" height="100%" fill="white"/>')
    seen = set()
    for v in range(g.n):
        for w in g.rotation(v):
            w = int(w)
            key = (v, w) if v < w else (w, v)
            if key in seen or key in overlay:
                continue
            seen.add(key)
            x1, y1 = xy(key[0])
            x2, y2 = xy(key[1])
            lines.append(f'<line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" '
                         f'y2="{y2:.2f}" stroke="#9a9a9a" stroke-width="0.8"/>')
    for (a, b) in sorted(overlay):
        x1, y1 = xy(a)
        x2, y2 = xy(b)
        lines.append(f'<line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" '
                     f'y2="{y2:.2f}" stroke="#cc1111" stroke-width="2.0"/>')
    lines.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(lines))
        fh.write("\n")
