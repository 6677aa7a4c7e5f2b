"""Nodal domains of an even form on the quotient of the standard
fundamental domain.

The strip |x| <= 1/2 above the unit circle is pixelated up to a cap
height where the first expansion term dominates; side columns are
glued by the unit translation, the bottom staircase is folded onto
itself by the inversion (phi is even, so the sign field is mirror
symmetric and the fold is consistent), and everything above the cap
joins one of two cusp components whose signs follow the leading
cosine.  Flood fill on that quotient yields the nodal domains; the
mirror involution x -> -x classifies each as inert (fixed) or split
(swapped with a partner).  The same identifications drive an exact
Euler-characteristic computation on the pixel complex, so the
compactified surface being a sphere is checked with integers, not
heuristics.

Domain adjacency is recorded per shared nodal edge.  On a sphere cut
by disjoint simple closed curves the adjacency graph is a tree and
each edge corresponds to exactly one nodal oval, so ovals are carried
as adjacent domain pairs; crossings of the boundary fixed curve are
assigned to ovals by local sign queries next to each refined zero.

A small synthetic-surface kit (pillow sphere, torus, handle sums)
builds closed cell meshes with explicit disjoint cutting families to
exercise the domain-count lower bound by actual cutting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Set, Tuple

import numpy as np
from scipy import ndimage

from .maass import (MaassForm, SignChangeRecord, dominance_height,
                    maass_evaluate, maass_grid_eval)

__all__ = [
    "NodalDomain",
    "NodalGraph",
    "OvalReport",
    "nodal_graph",
    "oval_intersection_check",
    "domain_count_bound",
    "pillow_mesh",
    "torus_mesh",
    "handle_mesh",
    "mesh_euler_characteristic",
    "block_perimeter_oval",
    "torus_column_oval",
    "torus_row_oval",
    "tube_ring_oval",
    "cut_and_count",
]

_CORNER_Y = math.sqrt(3.0) / 2.0


@dataclass(frozen=True)
class NodalDomain:
    id: int
    sign: int
    pixels: int
    inert: bool
    partner: Optional[int]
    touches_cap: bool

    def as_dict(self) -> dict:
        return {"id": self.id, "sign": self.sign, "pixels": self.pixels,
                "tag": "inert" if self.inert else "split",
                "partner": self.partner, "touches_cap": self.touches_cap}


@dataclass(frozen=True)
class NodalGraph:
    t: float
    grid_n: int
    y_cap: float
    domains: Tuple[NodalDomain, ...]
    edges: Tuple[Tuple[int, int], ...]
    genus: int
    euler_chi: int
    n_domains: int
    n_inert: int
    n_split: int
    avg_connectivity: float
    is_tree: bool
    inert_connected: bool
    near_nodal_pixels: int
    small_domains: Tuple[int, ...]
    cap_leak: bool

    def as_dict(self) -> dict:
        return {
            "t": self.t, "grid_n": self.grid_n, "y_cap": self.y_cap,
            "genus": self.genus, "euler_chi": self.euler_chi,
            "counts": {"N": self.n_domains, "N_in": self.n_inert,
                       "N_split": self.n_split},
            "avg_connectivity": self.avg_connectivity,
            "is_tree": self.is_tree,
            "inert_connected": self.inert_connected,
            "near_nodal_pixels": self.near_nodal_pixels,
            "small_domains": list(self.small_domains),
            "cap_leak": self.cap_leak,
            "domains": [d.as_dict() for d in self.domains],
            "edges": [list(e) for e in self.edges],
        }


@dataclass(frozen=True)
class OvalReport:
    """Crossings of the boundary fixed curve, tallied per nodal oval."""
    n_phi: int
    once: int
    twice: int
    per_oval: Tuple[Tuple[Tuple[int, int], int], ...]
    all_assigned: bool
    max_per_oval: int
    flagged: Tuple[str, ...]

    def as_dict(self) -> dict:
        return {"n_phi": self.n_phi, "once": self.once, "twice": self.twice,
                "accounting_ok": self.once + 2 * self.twice == self.n_phi,
                "per_oval": [[list(k), v] for k, v in self.per_oval],
                "all_assigned": self.all_assigned,
                "max_per_oval": self.max_per_oval,
                "flagged": list(self.flagged)}


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, a: int) -> int:
        p = self.parent
        while p[a] != a:
            p[a] = p[p[a]]
            a = p[a]
        return a

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


# -- quotient pixel complex ------------------------------------------------------

class _Quotient:
    """Sign field on the pixel quotient plus everything derived from it:
    domain labels, mirror action, adjacency, Euler characteristic.

    Pixel (row i, col j): row 0 at the bottom, row ny-1 is the cap row;
    the sign field must already be mirror symmetric in j."""

    def __init__(self, signs: np.ndarray, keep: np.ndarray):
        if signs.shape != keep.shape:
            raise ValueError("sign and keep arrays must match")
        self.ny, self.nx = signs.shape
        if self.nx % 2:
            raise ValueError("need an even column count for the fold")
        if not np.array_equal(keep, keep[:, ::-1]):
            raise ValueError("keep mask must be mirror symmetric")
        if not np.array_equal(signs[keep], signs[:, ::-1][keep]):
            raise ValueError("sign field must be mirror symmetric")
        if not keep[-1].all():
            raise ValueError("cap row must be fully kept")
        self.signs = signs
        self.keep = keep
        self._label()
        self._mirror_map()
        self._adjacency()

    def _label(self) -> None:
        four = ndimage.generate_binary_structure(2, 1)
        pos, n_pos = ndimage.label(self.keep & (self.signs > 0), four)
        neg, n_neg = ndimage.label(self.keep & (self.signs < 0), four)
        lab = np.where(self.keep,
                       np.where(self.signs > 0, pos, neg + n_pos), 0)
        self.lab = lab
        uf = _UnionFind(n_pos + n_neg + 1)
        top = self.ny - 1
        # cusp cap: the top row continues into the neighborhood above,
        # where same-sign strips are connected
        for j in range(1, self.nx):
            if self.signs[top, j] == self.signs[top, j - 1]:
                uf.union(lab[top, j - 1], lab[top, j])
        # side gluing by the unit translation
        left_ok = self.keep[:, 0] & self.keep[:, -1] \
            & (self.signs[:, 0] == self.signs[:, -1])
        for i in np.nonzero(left_ok)[0]:
            uf.union(lab[i, 0], lab[i, -1])
        # staircase fold: a pixel with a dropped neighbor is glued to
        # its mirror, which carries the same sign
        stair = self._staircase_pixels()
        for i, j in zip(*np.nonzero(stair)):
            uf.union(lab[i, j], lab[i, self.nx - 1 - j])
        self.roots = np.array([uf.find(k)
                               for k in range(n_pos + n_neg + 1)])

    def _staircase_pixels(self) -> np.ndarray:
        keep = self.keep
        dropped = ~keep
        stair = np.zeros_like(keep)
        stair[1:, :] |= keep[1:, :] & dropped[:-1, :]
        stair[:, 1:] |= keep[:, 1:] & dropped[:, :-1]
        stair[:, :-1] |= keep[:, :-1] & dropped[:, 1:]
        return stair

    def _mirror_map(self) -> None:
        rr = self.roots[self.lab]
        src = rr[self.keep]
        dst = rr[:, ::-1][self.keep]
        pairs = np.unique(np.stack([src, dst], axis=1), axis=0)
        if len(np.unique(pairs[:, 0])) != len(pairs):
            raise RuntimeError("mirror action is not well defined on "
                               "domains")
        self.mirror = {int(a): int(b) for a, b in pairs}

    def _adjacency(self) -> None:
        rr = self.roots[self.lab]
        keep, signs = self.keep, self.signs
        pair_list = []

        def cross(mask, a_roots, b_roots):
            if not mask.any():
                return
            a = a_roots[mask]
            b = b_roots[mask]
            pair_list.append(np.stack([np.minimum(a, b),
                                       np.maximum(a, b)], axis=1))

        horiz = keep[:, 1:] & keep[:, :-1] & (signs[:, 1:] != signs[:, :-1])
        cross(horiz, rr[:, :-1], rr[:, 1:])
        vert = keep[1:, :] & keep[:-1, :] & (signs[1:, :] != signs[:-1, :])
        cross(vert, rr[:-1, :], rr[1:, :])
        wrap = keep[:, 0] & keep[:, -1] & (signs[:, 0] != signs[:, -1])
        cross(wrap, rr[:, 0], rr[:, -1])
        if pair_list:
            allp = np.unique(np.concatenate(pair_list, axis=0), axis=0)
            self.adjacency = {(int(a), int(b)) for a, b in allp}
        else:
            self.adjacency = set()

    def root_at(self, i: int, j: int) -> int:
        return int(self.roots[self.lab[i, j]])

    def euler_characteristic(self) -> int:
        """V - E + F of the compactified quotient complex, as exact
        integers.  Faces are the kept pixels plus one cusp disk glued
        along the cap row's top edge cycle."""
        ny, nx = self.ny, self.nx
        ii, jj = np.nonzero(self.keep)
        npix = len(ii)
        w = nx + 1

        def hkey(ix, iy):
            return 2 * (iy * w + ix)

        def vkey(ix, iy):
            return 2 * (iy * w + ix) + 1

        bottom = hkey(jj, ii)
        tope = hkey(jj, ii + 1)
        lefte = vkey(jj, ii)
        righte = vkey(jj + 1, ii)
        # the side gluing makes column 0 and column nx the same line
        lefte = np.where(jj == 0, vkey(np.full_like(jj, nx), ii), lefte)
        raw = np.concatenate([bottom, tope, lefte, righte])
        uniq, counts = np.unique(raw, return_counts=True)
        single = uniq[counts == 1]
        # multiplicity-one edges are the cap row's top edges (which
        # bound the cusp face and stay) and the staircase (which folds
        # onto its mirror)
        is_v = (single % 2).astype(bool)
        iy = single // 2 // w
        cusp_edge = (~is_v) & (iy == ny)
        stair = single[~cusp_edge]
        s_v = (stair % 2).astype(bool)
        s_iy = stair // 2 // w
        s_ix = stair // 2 % w
        mirror = np.where(s_v, vkey(nx - s_ix, s_iy),
                          hkey(nx - s_ix - 1, s_iy))
        drop = stair[mirror < stair]
        edge_set = set(uniq.tolist()) - set(drop.tolist())
        n_edges = len(edge_set)

        def vid(ix, iy):
            return iy * w + ix

        corners = np.concatenate([
            vid(jj, ii), vid(jj + 1, ii), vid(jj, ii + 1),
            vid(jj + 1, ii + 1)])
        vset = np.unique(corners)
        index = {int(v): k for k, v in enumerate(vset)}
        uf = _UnionFind(len(vset))

        def uni(va, vb):
            ka = index.get(int(va))
            kb = index.get(int(vb))
            if ka is not None and kb is not None:
                uf.union(ka, kb)

        for y in range(ny + 1):
            uni(vid(0, y), vid(nx, y))
        for e in stair.tolist():
            ev = bool(e % 2)
            eiy = e // 2 // w
            eix = e // 2 % w
            if ev:
                ends = [(eix, eiy), (eix, eiy + 1)]
            else:
                ends = [(eix, eiy), (eix + 1, eiy)]
            for (ax, ay) in ends:
                uni(vid(ax, ay), vid(nx - ax, ay))
        n_vertices = len({uf.find(k) for k in range(len(vset))})
        return int(n_vertices - n_edges + (npix + 1))


def _symmetric_xs(nx: int) -> np.ndarray:
    half = (np.arange(nx // 2) + 0.5) / nx
    return np.concatenate([-half[::-1], half])


def _grid_field(form: MaassForm, grid_n: int, y_cap: float
                ) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray,
                           int]:
    nx = grid_n + (grid_n % 2)
    ny = grid_n
    y_bot = 0.85
    xs = _symmetric_xs(nx)
    ys = y_bot + (y_cap - y_bot) * (np.arange(ny) + 0.5) / ny
    vals = maass_grid_eval(form, xs, ys)
    # the form is even; make the mirror symmetry exact in bits
    vals = 0.5 * (vals + vals[:, ::-1])
    keep = (xs[None, :] ** 2 + ys[:, None] ** 2) >= 1.0
    # refinement pass: pixels in the lowest percentile of |phi| get a
    # 2 x 2 subgrid vote; a split vote keeps the center sign and is
    # flagged as near-nodal.  Votes run on the right half and mirror.
    absv = np.abs(vals[keep])
    q = np.quantile(absv, 0.01)
    low_i, low_j = np.nonzero(keep & (np.abs(vals) < q)
                              & (np.arange(nx)[None, :] >= nx // 2))
    n_flags = 0
    if len(low_i):
        dx = 1.0 / nx
        dy = (y_cap - y_bot) / ny
        offs = [(-0.25, -0.25), (-0.25, 0.25), (0.25, -0.25), (0.25, 0.25)]
        sub = np.empty((4, len(low_i)))
        for k, (ox, oy) in enumerate(offs):
            sub[k] = maass_evaluate(form, xs[low_j] + ox * dx,
                                    ys[low_i] + oy * dy)
        unanimous = np.abs(np.sign(sub).sum(axis=0)) == 4
        vals[low_i[unanimous], low_j[unanimous]] = sub[0, unanimous]
        vals[low_i[unanimous], nx - 1 - low_j[unanimous]] = \
            sub[0, unanimous]
        n_flags = 2 * int((~unanimous).sum())
    signs = np.where(vals >= 0, 1, -1)
    return signs, keep, xs, ys, n_flags


def nodal_graph(form: MaassForm, grid_n: int = 600) -> NodalGraph:
    """Flood-fill nodal decomposition on the pixel quotient.

    The cap height comes from the first-mode dominance ladder, so the
    top row's signs follow the leading cosine and the two cusp
    components close up correctly.  Reported alongside the domain
    counts: the exact Euler characteristic of the quotient complex,
    tree structure of the adjacency graph, connectivity of the inert
    part, and the resolution flags (near-nodal pixels, domains under
    ten pixels, a cap row that flips anywhere besides the quarter
    points)."""
    if grid_n < 200:
        raise ValueError("grid_n must be at least 200")
    y_cap = dominance_height(form)
    signs, keep, xs, ys, n_flags = _grid_field(form, grid_n, y_cap)
    quo = _Quotient(signs, keep)

    # a sane cap row flips exactly twice, at the quarter points
    top = signs[-1]
    flips = int(np.sum(top[1:] != top[:-1])) + int(top[0] != top[-1])
    cap_leak = flips != 2

    rr = quo.roots[quo.lab]
    kept_roots = rr[keep]
    root_ids, first_idx, counts = np.unique(
        kept_roots, return_index=True, return_counts=True)
    renum = {int(r): k for k, r in enumerate(root_ids)}
    kept_signs = signs[keep]
    cap_roots = {renum[int(r)] for r in np.unique(rr[-1])}

    domains = []
    for k, r in enumerate(root_ids):
        mr = renum[quo.mirror[int(r)]]
        domains.append(NodalDomain(
            id=k, sign=int(kept_signs[first_idx[k]]),
            pixels=int(counts[k]),
            inert=(mr == k), partner=None if mr == k else mr,
            touches_cap=k in cap_roots))
    edges = sorted({(renum[a], renum[b]) for a, b in quo.adjacency})

    n = len(domains)
    n_in = sum(1 for d in domains if d.inert)
    chi = quo.euler_characteristic()
    genus = (2 - chi) // 2

    adj: Dict[int, List[int]] = {d.id: [] for d in domains}
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)

    def component(start: int, allowed: Set[int]) -> Set[int]:
        seen = {start}
        stack = [start]
        while stack:
            u = stack.pop()
            for v in adj[u]:
                if v in allowed and v not in seen:
                    seen.add(v)
                    stack.append(v)
        return seen

    all_ids = {d.id for d in domains}
    is_tree = (len(component(domains[0].id, all_ids)) == n
               and len(edges) == n - 1)
    inert_ids = {d.id for d in domains if d.inert}
    inert_connected = (not inert_ids or
                       component(next(iter(inert_ids)), inert_ids)
                       == inert_ids)

    graph = NodalGraph(
        t=form.t, grid_n=grid_n, y_cap=y_cap,
        domains=tuple(domains), edges=tuple(edges),
        genus=genus, euler_chi=chi,
        n_domains=n, n_inert=n_in, n_split=n - n_in,
        avg_connectivity=2.0 * len(edges) / n if n else 0.0,
        is_tree=is_tree, inert_connected=inert_connected,
        near_nodal_pixels=n_flags,
        small_domains=tuple(d.id for d in domains if d.pixels < 10),
        cap_leak=cap_leak)
    object.__setattr__(graph, "_internals", (quo, renum, xs, ys))
    return graph


# -- oval crossings of the boundary fixed curve ----------------------------------

def _pair_at(quo: _Quotient, renum: Dict[int, int], i: int, j: int,
             i2: int, j2: int) -> Optional[Tuple[int, int]]:
    if not (quo.keep[i, j] and quo.keep[i2, j2]):
        return None
    if quo.signs[i, j] == quo.signs[i2, j2]:
        return None
    a = renum[quo.root_at(i, j)]
    b = renum[quo.root_at(i2, j2)]
    return (a, b) if a < b else (b, a)


def oval_intersection_check(graph: NodalGraph,
                            record: SignChangeRecord) -> OvalReport:
    """Assign each refined zero of phi on the boundary fixed curve to
    the nodal oval through it.  On a sphere cut by disjoint simple
    closed curves every oval separates exactly the two domains it
    borders, so the oval is read off from the local domain pair next
    to the zero.  Checks that every crossed oval is mirror invariant
    and crossed at most twice, and that the once/twice tallies
    reproduce the total boundary count."""
    quo, renum, xs, ys = graph._internals
    ny, nx = quo.ny, quo.nx
    dy = ys[1] - ys[0]
    flags: List[str] = []
    tally: Dict[Tuple[int, int], int] = {}

    def note(pair: Optional[Tuple[int, int]], where: str) -> None:
        if pair is None:
            flags.append(f"unassigned zero on {where}")
            return
        tally[pair] = tally.get(pair, 0) + 1

    def vertical_flip_pair(col: int, y0: float
                           ) -> Optional[Tuple[int, int]]:
        i = int(round((y0 - ys[0]) / dy))
        for k in range(max(i - 2, 0), min(i + 2, ny - 1)):
            p = _pair_at(quo, renum, k, col, k + 1, col)
            if p is not None:
                return p
        return None

    for y0 in record.zeros.get("imaginary-axis", ()):
        right = vertical_flip_pair(nx // 2, y0)
        left = vertical_flip_pair(nx // 2 - 1, y0)
        if right != left:
            flags.append(f"axis zero at y={y0:.6f}: mirror columns "
                         "disagree (near-tangency at this resolution)")
        note(right, "imaginary-axis")

    for y0 in record.zeros.get("half-line", ()):
        outer = vertical_flip_pair(nx - 1, y0)
        inner = vertical_flip_pair(0, y0)
        if outer != inner:
            flags.append(f"half-line zero at y={y0:.6f}: seam columns "
                         "disagree (near-tangency at this resolution)")
        note(outer, "half-line")

    stair = quo._staircase_pixels()
    s_i, s_j = np.nonzero(stair)
    sx = xs[s_j]
    sy = ys[s_i]
    for th in record.zeros.get("unit-circle-arc", ()):
        px, py = math.cos(th), math.sin(th)
        best = None
        best_d = math.inf
        order = np.argsort((sx - px) ** 2 + (sy - py) ** 2)[:40]
        for k in order:
            i, j = int(s_i[k]), int(s_j[k])
            for (i2, j2) in ((i, j + 1), (i, j - 1), (i + 1, j),
                             (i - 1, j)):
                if 0 <= i2 < ny and 0 <= j2 < nx:
                    p = _pair_at(quo, renum, i, j, i2, j2)
                    if p is not None:
                        d = (xs[j] - px) ** 2 + (ys[i] - py) ** 2
                        if d < best_d:
                            best, best_d = p, d
        note(best, "unit-circle-arc")

    if record.cusp_sign_change:
        topi = ny - 1
        p = None
        for j in range(nx - 1):
            p = _pair_at(quo, renum, topi, j, topi, j + 1)
            if p is not None:
                break
        note(p, "cusp")

    mirror_of = {renum[r]: renum[m] for r, m in quo.mirror.items()}
    for pair in tally:
        a, b = pair
        if {mirror_of[a], mirror_of[b]} != {a, b}:
            flags.append(f"oval {pair} crossed the fixed curve but is "
                         "not mirror invariant")
    once = sum(1 for v in tally.values() if v == 1)
    twice = sum(1 for v in tally.values() if v == 2)
    max_per = max(tally.values()) if tally else 0
    assigned = once + 2 * twice == record.n_phi and \
        not any(f.startswith("unassigned") for f in flags)
    return OvalReport(
        n_phi=record.n_phi, once=once, twice=twice,
        per_oval=tuple(sorted(tally.items())),
        all_assigned=assigned, max_per_oval=max_per,
        flagged=tuple(flags))


def domain_count_bound(n_ovals: int, genus: int) -> int:
    """Lower bound for the number of complementary domains of a
    disjoint system of simple closed curves on a closed orientable
    surface: cutting along a curve either splits one component in two
    or spends a handle."""
    if n_ovals < 0 or genus < 0:
        raise ValueError("counts must be nonnegative")
    return n_ovals - genus + 1


# -- synthetic closed meshes for the cutting oracle ------------------------------

def pillow_mesh(n: int) -> dict:
    """Two n x n sheets sewn along the rim: a cell mesh of the
    sphere."""
    cells = [("T", i, j) for i in range(n) for j in range(n)] + \
            [("B", i, j) for i in range(n) for j in range(n)]
    edges = []
    for s in ("T", "B"):
        for i in range(n):
            for j in range(n):
                if i + 1 < n:
                    edges.append(((s, i, j), (s, i + 1, j),
                                  (s, "v", i, j)))
                if j + 1 < n:
                    edges.append(((s, i, j), (s, i, j + 1),
                                  (s, "h", i, j)))
    for j in range(n):
        edges.append((("T", 0, j), ("B", 0, j), ("rim", "n", j)))
        edges.append((("T", n - 1, j), ("B", n - 1, j), ("rim", "s", j)))
    for i in range(n):
        edges.append((("T", i, 0), ("B", i, 0), ("rim", "w", i)))
        edges.append((("T", i, n - 1), ("B", i, n - 1), ("rim", "e", i)))
    return {"cells": cells, "edges": edges, "genus": 0, "n": n}


def torus_mesh(n: int) -> dict:
    """n x n grid with both directions wrapped."""
    cells = [(i, j) for i in range(n) for j in range(n)]
    edges = []
    for i in range(n):
        for j in range(n):
            edges.append(((i, j), ((i + 1) % n, j), ("v", i, j)))
            edges.append(((i, j), (i, (j + 1) % n), ("h", i, j)))
    return {"cells": cells, "edges": edges, "genus": 1, "n": n}


def handle_mesh(genus: int, n: int, tube_len: int = 3) -> dict:
    """Torus with genus-1 extra handles: each handle removes two cells
    and joins the square holes by a tube of 4-cell rings."""
    if genus < 1:
        raise ValueError("handle_mesh starts from a torus")
    if n < 4 * genus + 4:
        raise ValueError("mesh too small for that many handles")
    base = torus_mesh(n)
    cells = set(base["cells"])
    edges = list(base["edges"])

    def ring_sides(c):
        i, j = c
        return [((i - 1) % n, j), (i, (j + 1) % n),
                ((i + 1) % n, j), (i, (j - 1) % n)]

    for h in range(genus - 1):
        ca = (1, 2 + 4 * h)
        cb = (n - 2, 2 + 4 * h)
        for c in (ca, cb):
            cells.remove(c)
        edges = [e for e in edges if e[0] in cells and e[1] in cells]
        for r in range(tube_len):
            for s in range(4):
                cell = ("tube", h, r, s)
                cells.add(cell)
                edges.append((cell, ("tube", h, r, (s + 1) % 4),
                              ("tube-ring", h, r, s)))
                if r + 1 < tube_len:
                    edges.append((cell, ("tube", h, r + 1, s),
                                  ("tube-run", h, r, s)))
        for s, nb in enumerate(ring_sides(ca)):
            edges.append((("tube", h, 0, s), nb, ("tube-enda", h, s)))
        for s, nb in enumerate(ring_sides(cb)):
            edges.append((("tube", h, tube_len - 1, s), nb,
                          ("tube-endb", h, s)))
    return {"cells": sorted(cells, key=repr), "edges": edges,
            "genus": genus, "n": n}


def mesh_euler_characteristic(mesh: dict) -> int:
    """V - E + F by explicit corner and edge counts; implemented for
    the plain pillow and torus, where the corner lattice is clean."""
    n = mesh["n"]
    if mesh["genus"] == 1:
        return n * n - 2 * n * n + n * n
    if mesh["genus"] == 0:
        v = 2 * (n + 1) * (n + 1) - 4 * n
        e = 4 * n * (n + 1) - 4 * n
        f = 2 * n * n
        return v - e + f
    raise ValueError("explicit corner count only for pillow and torus")


def torus_column_oval(mesh: dict, j: int) -> Set[tuple]:
    """Dual circle crossing every rightward adjacency out of column j;
    non-separating on the torus."""
    return {("h", i, j) for i in range(mesh["n"])}


def torus_row_oval(mesh: dict, i: int) -> Set[tuple]:
    return {("v", i, j) for j in range(mesh["n"])}


def block_perimeter_oval(mesh: dict, sheet, i0: int, j0: int,
                         h: int, w: int) -> Set[tuple]:
    """Adjacency keys crossing the perimeter of a cell block: a simple
    separating loop when the block stays away from rims, wraps and
    holes.  For the pillow pass sheet="T" or "B"; for tori pass
    sheet=None."""
    cells = {(i, j) for i in range(i0, i0 + h) for j in range(j0, j0 + w)}
    keys = set()
    for (a, b, key) in mesh["edges"]:
        aa, bb = a, b
        if sheet is not None:
            if not (isinstance(a, tuple) and a[0] == sheet
                    and isinstance(b, tuple) and b[0] == sheet):
                continue
            aa, bb = a[1:], b[1:]
        if (aa in cells) != (bb in cells):
            keys.add(key)
    return keys


def tube_ring_oval(mesh: dict, h: int, r: int) -> Set[tuple]:
    """Cross-section of handle h between rings r and r+1;
    non-separating."""
    return {("tube-run", h, r, s) for s in range(4)}


def cut_and_count(mesh: dict, ovals: Sequence[Set[tuple]]) -> int:
    """Number of components after removing every adjacency crossed by
    the curve system.  The curves must be pairwise disjoint, which for
    these meshes means their key sets do not intersect."""
    allkeys: Set[tuple] = set()
    for o in ovals:
        if allkeys & o:
            raise ValueError("cutting curves are not disjoint")
        allkeys |= o
    index = {c: k for k, c in enumerate(mesh["cells"])}
    uf = _UnionFind(len(index))
    for (a, b, key) in mesh["edges"]:
        if key not in allkeys:
            uf.union(index[a], index[b])
    return len({uf.find(k) for k in range(len(index))})
