"""Deterministic SVG emission for the half-plane pictures.

Three scene builders: coset tilings of a congruence fundamental domain
with the fixed arcs drawn bold, the two cocompact reflection polygons
(Klein disc chords next to the half-plane chamber), and the nodal sign
field with the boundary fixed curve on top.  Everything is written by
hand into path/rect elements with fixed formatting, so identical
inputs give identical bytes.
"""

from __future__ import annotations

import math
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

__all__ = [
    "SvgScene",
    "fundamental_domain_scene",
    "vinberg_scene",
    "nodal_scene",
    "tree_dot",
]

_POS_FILL = "#e9c46a"
_NEG_FILL = "#6d93b8"
_TILE_STROKE = "#8a8a8a"
_FIX_STROKE = "#111111"


def _f(x: float) -> str:
    s = format(float(x), ".6f")
    return "0.000000" if s == "-0.000000" else s


class SvgScene:
    """Fixed-size canvas with a half-plane window mapped onto it."""

    def __init__(self, width: int, height: int,
                 window: Tuple[float, float, float, float] = (0., 1., 0., 1.)):
        self.width = int(width)
        self.height = int(height)
        self.x0, self.x1, self.y0, self.y1 = (float(v) for v in window)
        self.elements: List[str] = []

    def to_px(self, x: float, y: float) -> Tuple[float, float]:
        u = (x - self.x0) / (self.x1 - self.x0) * self.width
        v = (self.y1 - y) / (self.y1 - self.y0) * self.height
        return u, v

    def polyline(self, pts: Iterable[Tuple[float, float]], stroke: str,
                 width: float, opacity: float = 1.0) -> None:
        coords = " ".join("{},{}".format(_f(u), _f(v))
                          for u, v in (self.to_px(x, y) for x, y in pts))
        self.elements.append(
            f'<polyline points="{coords}" fill="none" stroke="{stroke}" '
            f'stroke-width="{_f(width)}" stroke-opacity="{_f(opacity)}" '
            f'stroke-linejoin="round" stroke-linecap="round"/>')

    def rect(self, x: float, y: float, w: float, h: float,
             fill: str) -> None:
        u0, v0 = self.to_px(x, y + h)
        u1, v1 = self.to_px(x + w, y)
        self.elements.append(
            f'<rect x="{_f(u0)}" y="{_f(v0)}" width="{_f(u1 - u0)}" '
            f'height="{_f(v1 - v0)}" fill="{fill}"/>')

    def circle(self, cx: float, cy: float, r_units: float, stroke: str,
               width: float) -> None:
        u, v = self.to_px(cx, cy)
        rpx = r_units / (self.x1 - self.x0) * self.width
        self.elements.append(
            f'<circle cx="{_f(u)}" cy="{_f(v)}" r="{_f(rpx)}" fill="none" '
            f'stroke="{stroke}" stroke-width="{_f(width)}"/>')

    def text(self, x: float, y: float, s: str, size: int = 12,
             fill: str = "#333333") -> None:
        u, v = self.to_px(x, y)
        self.elements.append(
            f'<text x="{_f(u)}" y="{_f(v)}" font-size="{size}" '
            f'font-family="sans-serif" fill="{fill}">{s}</text>')

    def raw(self, element: str) -> None:
        self.elements.append(element)

    def to_string(self) -> str:
        head = (f'<svg xmlns="http://www.w3.org/2000/svg" '
                f'width="{self.width}" height="{self.height}" '
                f'viewBox="0 0 {self.width} {self.height}">')
        return "\n".join([head, *self.elements, "</svg>"]) + "\n"

    def write(self, path: str) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_string())


# -- congruence domain with bold fixed arcs --------------------------------------

_RHO_L = complex(-0.5, math.sqrt(3.0) / 2.0)
_RHO_R = complex(0.5, math.sqrt(3.0) / 2.0)


def _moebius(mat, z: complex) -> complex:
    a, b, c, d = mat.to_floats()
    return (a * z + b) / (c * z + d)


def _template_edges(y_top: float, n: int = 28) -> List[List[complex]]:
    """Boundary of the standard triangle, verticals truncated at y_top."""
    ts = np.linspace(math.pi / 3, 2 * math.pi / 3, n)
    arc = [complex(math.cos(t), math.sin(t)) for t in ts]
    ladder = np.geomspace(math.sqrt(3.0) / 2.0, y_top, n)
    left = [complex(-0.5, y) for y in ladder]
    right = [complex(0.5, y) for y in ladder]
    return [arc, left, right]


def fundamental_domain_scene(fs, table, width: int = 720,
                             height: int = 560) -> SvgScene:
    """Coset tiles of the level-N domain, fixed arcs bold, labels on
    arcs, joint words in the corner."""
    edges = _template_edges(y_top=60.0)
    pts_all: List[complex] = []
    tiles: List[List[List[complex]]] = []
    for rep in table.reps:
        tile = []
        for edge in edges:
            img = [_moebius(rep, z) for z in edge]
            tile.append(img)
            pts_all.extend(p for p in img if abs(p) < 50)
        tiles.append(tile)
    xs = [p.real for p in pts_all]
    x_lo, x_hi = min(xs) - 0.08, max(xs) + 0.08
    y_hi = 1.45
    scene = SvgScene(width, height, (x_lo, x_hi, -0.02, y_hi))
    scene.raw(f'<rect width="{width}" height="{height}" fill="#ffffff"/>')
    for tile in tiles:
        for img in tile:
            pts = [(p.real, min(p.imag, y_hi + 1.0)) for p in img]
            scene.polyline(pts, _TILE_STROKE, 0.8)
    for arc in fs.arcs:
        samples = arc.sample(80, margin=0.002)
        pts = [(p.x, min(p.y, y_hi + 1.0)) for p in samples]
        scene.polyline(pts, _FIX_STROKE, 3.0)
        mid = samples[len(samples) // 2]
        scene.text(mid.x + 0.015, min(mid.y, y_hi - 0.05) + 0.02,
                   arc.label, size=13, fill="#000000")
    joints = "; ".join(f"{j.arc_from}.{j.end_from}~{j.arc_to}.{j.end_to}"
                       for j in fs.joints)
    scene.text(x_lo + 0.03, y_hi - 0.05, f"level {fs.level}", size=14)
    if joints:
        scene.text(x_lo + 0.03, y_hi - 0.12, f"joints: {joints}", size=11)
    return scene


# -- cocompact chamber: Klein disc and half-plane panels -------------------------

def vinberg_scene(group, width: int = 900, height: int = 480) -> SvgScene:
    """Left: unit Klein disc with the root walls as chords.  Right: the
    half-plane chamber with its mirror arcs bold and named."""
    from .vinberg import _klein_constraint

    scene = SvgScene(width, height, (0.0, 2.1, 0.0, 1.12))
    scene.raw(f'<rect width="{width}" height="{height}" fill="#ffffff"/>')
    # Klein panel occupies window x in [0, 1], centered at (0.5, 0.56)
    cx, cy, r = 0.5, 0.56, 0.42

    def disc_xy(X: float, Y: float) -> Tuple[float, float]:
        return cx + r * X, cy + r * Y

    scene.circle(cx, cy, r, "#444444", 1.5)
    for root in group.roots:
        a, b, c = _klein_constraint(group.form, root.v)
        nrm = math.hypot(a, b)
        d = c / nrm
        ux, uy = a / nrm, b / nrm
        if abs(d) >= 1.0:
            continue
        half = math.sqrt(1.0 - d * d)
        p1 = (d * ux - half * uy, d * uy + half * ux)
        p2 = (d * ux + half * uy, d * uy - half * ux)
        scene.polyline([disc_xy(*p1), disc_xy(*p2)], _FIX_STROKE, 2.5)
        mx, my = disc_xy(0.55 * (p1[0] + p2[0]), 0.55 * (p1[1] + p2[1]))
        lbl = "({},{},{})".format(*root.v)
        scene.raw(f'<text x="{_f(mx)}" y="{_f(my)}" font-size="11" '
                  f'font-family="sans-serif" fill="#333333">{lbl}</text>')
    scene.text(0.08, 1.04, f"Klein disc, form "
               f"(-{group.form.a1},{group.form.a2},{group.form.a3})",
               size=14)

    # half-plane panel occupies window x in [1.1, 2.1]
    ch = group.chamber
    verts = [complex(v.x, v.y) for v in ch.vertices]
    span = max(abs(v.real) for v in verts) + 0.3
    top = max(v.imag for v in verts) + 0.35

    def hp(x: float, y: float) -> Tuple[float, float]:
        return 1.1 + (x + span) / (2 * span), 0.04 + y / top

    k = len(verts)
    for i, wall in enumerate(ch.walls):
        z1, z2 = verts[i - 1], verts[i]
        seg = _geodesic_polyline(wall, z1, z2, 40)
        scene.polyline([hp(p.real, p.imag) for p in seg], "#777777", 1.2)
    for arc in group.arcs:
        z1 = complex(arc.start.x, arc.start.y)
        z2 = complex(arc.end.x, arc.end.y)
        seg = _geodesic_polyline(arc.geodesic, z1, z2, 40)
        scene.polyline([hp(p.real, p.imag) for p in seg], _FIX_STROKE, 3.0)
        mid = seg[len(seg) // 2]
        u, v = hp(mid.real, mid.imag)
        scene.raw(f'<text x="{_f(u * width / 2.1 + 5)}" '
                  f'y="{_f((1 - v / 1.12) * height - 5)}" font-size="13" '
                  f'font-family="sans-serif" fill="#000000">{arc.name}</text>')
    orders = ",".join(str(o) for o in ch.orders)
    scene.text(1.16, 1.04, f"half-plane chamber, corner orders ({orders})",
               size=14)
    return scene


def _geodesic_polyline(geod, z1: complex, z2: complex,
                       n: int) -> List[complex]:
    if geod.kind == "vertical":
        ys = np.linspace(z1.imag, z2.imag, n)
        x = float(geod.x0)
        return [complex(x, y) for y in ys]
    c = float(geod.center)
    rr = float(geod.radius)
    t1 = math.atan2(z1.imag, z1.real - c)
    t2 = math.atan2(z2.imag, z2.real - c)
    ts = np.linspace(t1, t2, n)
    return [complex(c + rr * math.cos(t), rr * math.sin(t)) for t in ts]


# -- nodal field ------------------------------------------------------------------

def nodal_scene(graph, width: int = 720, height: int = 640) -> SvgScene:
    """Sign field of the form as row run-length rectangles, boundary
    fixed curve bold on top (axis, seam, and circle arc through the
    corners)."""
    quo, _, xs, ys = graph._internals
    ny, nx = quo.ny, quo.nx
    dx = xs[1] - xs[0]
    dy = ys[1] - ys[0]
    y_lo = max(ys[0] - dy, 0.82)
    y_hi = ys[-1] + dy
    scene = SvgScene(width, height, (-0.54, 0.54, y_lo - 0.02, y_hi + 0.02))
    scene.raw(f'<rect width="{width}" height="{height}" fill="#ffffff"/>')
    for i in range(ny):
        j = 0
        while j < nx:
            if not quo.keep[i, j]:
                j += 1
                continue
            s = quo.signs[i, j]
            j0 = j
            while j < nx and quo.keep[i, j] and quo.signs[i, j] == s:
                j += 1
            scene.rect(xs[j0] - dx / 2, ys[i] - dy / 2, (j - j0) * dx, dy,
                       _POS_FILL if s > 0 else _NEG_FILL)
    # boundary fixed curve: axis above i, both seams, circle arc
    scene.polyline([(0.0, 1.0), (0.0, y_hi)], _FIX_STROKE, 2.4)
    corner = math.sqrt(3.0) / 2.0
    scene.polyline([(0.5, corner), (0.5, y_hi)], _FIX_STROKE, 2.4)
    scene.polyline([(-0.5, corner), (-0.5, y_hi)], _FIX_STROKE, 2.4)
    ts = np.linspace(math.pi / 3, 2 * math.pi / 3, 80)
    scene.polyline([(math.cos(t), math.sin(t)) for t in ts],
                   _FIX_STROKE, 2.4)
    scene.text(-0.52, y_hi - 0.015,
               "t={} N={} N_in={}".format(
                   format(graph.t, ".12g"), graph.n_domains, graph.n_inert),
               size=13)
    return scene


def tree_dot(graph) -> str:
    """Adjacency tree in DOT, nodes labeled by sign and orbit type."""
    lines = ["graph nodal_tree {", "  node [fontname=\"sans-serif\"];"]
    for d in graph.domains:
        tag = "inert" if d.inert else f"split/{d.partner}"
        shape = "circle" if d.inert else "box"
        sgn = "+" if d.sign > 0 else "-"
        lines.append(
            f'  d{d.id} [label="{d.id}{sgn} {tag}\\n{d.pixels}px" '
            f'shape={shape}];')
    for a, b in graph.edges:
        lines.append(f"  d{a} -- d{b};")
    lines.append("}")
    return "\n".join(lines) + "\n"
