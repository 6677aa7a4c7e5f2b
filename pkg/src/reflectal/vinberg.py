"""Reflection groups of anisotropic ternary forms on the hyperbolic plane.

The form -a1*x1^2 + x2^2 + x3^2 cuts a two-sheeted hyperboloid whose
upper sheet is a hyperbolic plane; integral vectors of positive norm
with the crystallographic property act by reflections.  The classical
two-stage search finds the walls of a fundamental chamber: first a
chamber for the finite symmetry group of the tangent plane at the
basepoint, then the remaining walls in increasing distance, stopping
as soon as the chamber is compact.

Chambers map through the projective disc to polygons in the upper
half-plane.  For a1 = 3 the chamber is a (2,4,6) triangle and the
doubled domain a (2,6,6) triangle; for a1 = 7 a quadrilateral with an
auxiliary fifth geodesic orthogonal to two of the walls.  Everything
downstream of the root search is exact sympy arithmetic: geodesic
equations, corner points, group identities, quadratic field data.
Floats appear only in sampling checks and display.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import sympy as sp

from .exact import as_float, exact_eq, exact_sign, sym
from .geometry import (
    IDENTITY,
    S_MAT,
    SIGMA,
    Geodesic,
    HPoint,
    Mat2,
    Motion,
    boundary_apply,
    geodesic_through_boundary,
)

__all__ = [
    "TernaryForm",
    "RootVector",
    "vinberg_roots",
    "roots_to_halfplane",
    "ReflectionPolygon",
    "MirrorArc",
    "CocompactGroup",
    "build_group_p3",
    "build_group_p7",
    "closure_partition",
    "conjugated_closure_maps",
    "pslr_to_sof",
    "motion_to_sof",
    "quaternion_norm",
    "quaternion_norm_one_embed",
    "classify_even_four",
    "in_gamma_f_family",
    "kind_swap_rep",
    "parity_swap_rep",
]


# -- forms and roots ---------------------------------------------------------

@dataclass(frozen=True)
class TernaryForm:
    """Diagonal form -a1*x1^2 + a2*x2^2 + a3*x3^2 of signature (-,+,+).

    Anisotropy over the rationals is the caller's responsibility; the
    constructor certifies it against a short list of small moduli and
    refuses forms with no visible local obstruction.
    """

    a1: int
    a2: int = 1
    a3: int = 1

    def __post_init__(self):
        if self.a1 <= 0 or self.a2 <= 0 or self.a3 <= 0:
            raise ValueError("coefficients must be positive")
        if all(self._primitive_zero_mod(n) for n in (8, 9, 25, 49)):
            raise ValueError("no local obstruction found mod 8, 9, 25, 49; "
                             "cannot certify anisotropy")

    def ip(self, u: Sequence[int], v: Sequence[int]) -> int:
        return (-self.a1 * u[0] * v[0] + self.a2 * u[1] * v[1]
                + self.a3 * u[2] * v[2])

    def value(self, v: Sequence[int]) -> int:
        return self.ip(v, v)

    def gram(self) -> sp.Matrix:
        return sp.diag(-self.a1, self.a2, self.a3)

    def _primitive_zero_mod(self, n: int) -> bool:
        for v in itertools.product(range(n), repeat=3):
            if math.gcd(math.gcd(v[0], v[1]), math.gcd(v[2], n)) != 1:
                continue
            if self.value(v) % n == 0:
                return True
        return False


@dataclass(frozen=True)
class RootVector:
    """Primitive integer vector of positive norm defining a wall."""

    v: Tuple[int, int, int]
    form: TernaryForm

    def __post_init__(self):
        g = math.gcd(math.gcd(abs(self.v[0]), abs(self.v[1])), abs(self.v[2]))
        if g != 1:
            raise ValueError(f"root {self.v} is not primitive")
        if self.normsq <= 0:
            raise ValueError(f"root {self.v} has non-positive norm")

    @property
    def normsq(self) -> int:
        return self.form.value(self.v)

    def is_crystallographic(self) -> bool:
        """2(e_i, v)/(v, v) integral for every basis vector."""
        nn = self.normsq
        coef = (-self.form.a1, self.form.a2, self.form.a3)
        return all((2 * c * x) % nn == 0 for c, x in zip(coef, self.v))

    def reflection(self) -> sp.Matrix:
        """x -> x - 2(x,v)/(v,v) v as an exact rational matrix."""
        nn = self.normsq
        coef = (-self.form.a1, self.form.a2, self.form.a3)
        m = sp.eye(3)
        for i in range(3):
            for j in range(3):
                m[i, j] -= sp.Rational(2 * coef[j] * self.v[j], nn) * self.v[i]
        g = self.form.gram()
        if sp.expand(m.T * g * m - g) != sp.zeros(3, 3):
            raise AssertionError("reflection does not preserve the form")
        if sp.expand(m * m - sp.eye(3)) != sp.zeros(3, 3):
            raise AssertionError("reflection is not an involution")
        return m

    def halfplane_geodesic(self) -> Geodesic:
        return _root_geodesic(self.form, self.v)

    def serialize(self) -> dict:
        return {"v": list(self.v), "normsq": self.normsq}


def _klein_constraint(form: TernaryForm,
                      v: Sequence[int]) -> Tuple[int, int, int]:
    """Half-space (v, x) <= 0 in scaled disc coordinates.

    With (X, Y) = sqrt(a1) * (x, y), where the disc coordinate x is
    the third coordinate ratio and y the second (the pairing that
    matches the wall geodesics of both sample forms), the condition
    reads A*X + B*Y <= C over the integers.
    """
    if form.a2 != 1 or form.a3 != 1:
        raise ValueError("disc reduction implemented for a2 = a3 = 1")
    return (v[2], v[1], form.a1 * v[0])


def _klein_boundary_exact(x, y):
    """Unit-circle point to the real line, exactly; None means inf."""
    if exact_eq(x, 0):
        return None if exact_sign(y) > 0 else sp.Integer(0)
    return sp.radsimp(sp.simplify((1 + y) / x))


def _root_geodesic(form: TernaryForm, v: Sequence[int]) -> Geodesic:
    """Exact wall geodesic in the upper half-plane."""
    A, B, C = _klein_constraint(form, v)
    rt = sp.sqrt(form.a1)
    nx, ny, rhs = sp.Integer(A), sp.Integer(B), sp.Rational(C) / rt
    n = sp.sqrt(nx ** 2 + ny ** 2)
    d = rhs / n
    if exact_sign(d ** 2 - 1) >= 0:
        raise ValueError(f"wall of {tuple(v)} misses the disc")
    ux, uy = nx / n, ny / n
    h = sp.sqrt(sp.radsimp(1 - d ** 2))
    e1 = _klein_boundary_exact(sp.radsimp(d * ux - h * uy),
                               sp.radsimp(d * uy + h * ux))
    e2 = _klein_boundary_exact(sp.radsimp(d * ux + h * uy),
                               sp.radsimp(d * uy - h * ux))
    return geodesic_through_boundary(e1, e2, exact=True)


def _cone_unbounded(cons: List[Tuple[int, int, int]]) -> bool:
    """Whether {A*X + B*Y <= C} admits a nonzero recession direction."""
    normals = [(a, b) for a, b, _ in cons]
    cands = set()
    for a, b in normals:
        cands.update([(-b, a), (b, -a)])
    for d in cands:
        if d != (0, 0) and all(a * d[0] + b * d[1] <= 0 for a, b in normals):
            return True
    return False


def _polygon_vertices(cons: List[Tuple[int, int, int]]):
    """Feasible pairwise intersections of the constraint lines, as
    ((i, j), (X, Y)) with exact rational coordinates."""
    out = []
    for i, j in itertools.combinations(range(len(cons)), 2):
        a1, b1, c1 = cons[i]
        a2, b2, c2 = cons[j]
        det = a1 * b2 - a2 * b1
        if det == 0:
            continue
        X = Fraction(c1 * b2 - c2 * b1, det)
        Y = Fraction(a1 * c2 - a2 * c1, det)
        if all(a * X + b * Y <= c for a, b, c in cons):
            out.append(((i, j), (X, Y)))
    return out


def _chamber_compact(form: TernaryForm, roots: List[RootVector]) -> bool:
    """Compact in the disc: bounded constraint polygon with every
    vertex strictly inside X^2 + Y^2 = a1."""
    cons = [_klein_constraint(form, r.v) for r in roots]
    if len(cons) < 3 or _cone_unbounded(cons):
        return False
    verts = _polygon_vertices(cons)
    if not verts:
        return False
    return all(X * X + Y * Y < form.a1 for _, (X, Y) in verts)


def _stage_one_roots(form: TernaryForm, box: int) -> List[RootVector]:
    """Walls through the basepoint: the chamber of the finite
    reflection group of the tangent plane x1 = 0 that contains the
    fixed generic direction (0, 2, 1).

    The chamber is the intersection of all mirror half-planes oriented
    toward the interior direction; its walls are exactly the mirrors
    whose boundary ray stays feasible for every other mirror.
    """
    interior = (0, 2, 1)
    cands: List[RootVector] = []
    for v2 in range(-box, box + 1):
        for v3 in range(-box, box + 1):
            if (v2, v3) == (0, 0) or math.gcd(abs(v2), abs(v3)) != 1:
                continue
            v = (0, v2, v3)
            if form.value(v) <= 0:
                continue
            r = RootVector(v, form)
            if r.is_crystallographic() and form.ip(v, interior) < 0:
                cands.append(r)
    normals = [(form.a2 * r.v[1], form.a3 * r.v[2]) for r in cands]
    walls = []
    for r, (na, nb) in zip(cands, normals):
        for d in ((-nb, na), (nb, -na)):
            if all(ma * d[0] + mb * d[1] <= 0 for ma, mb in normals):
                walls.append(r)
                break
    walls.sort(key=lambda r: (r.normsq, r.v))
    return walls


def vinberg_roots(form: TernaryForm,
                  basepoint: Tuple[int, int, int] = (1, 0, 0),
                  max_roots: int = 16,
                  box: int = 12) -> List[RootVector]:
    """Two-stage wall search for the integral reflection group.

    Stage one takes the walls through the basepoint.  Stage two runs
    over primitive crystallographic vectors of positive norm in a
    coefficient box, in non-decreasing (v, w0)^2 / (v, v); a candidate
    is accepted when its product with every accepted root is <= 0.
    The search stops once the chamber is compact in the disc; if the
    box is exhausted first it raises with the partial list attached.
    """
    if basepoint != (1, 0, 0):
        raise NotImplementedError("stage one assumes basepoint (1, 0, 0)")
    if form.value(basepoint) >= 0:
        raise ValueError("basepoint must have negative norm")
    roots = _stage_one_roots(form, box)

    cands: List[RootVector] = []
    for v1 in range(1, box + 1):
        for v2 in range(-box, box + 1):
            for v3 in range(-box, box + 1):
                v = (v1, v2, v3)
                if math.gcd(math.gcd(v1, abs(v2)), abs(v3)) != 1:
                    continue
                if form.value(v) <= 0:
                    continue
                r = RootVector(v, form)
                if r.is_crystallographic():
                    cands.append(r)
    w0 = basepoint
    cands.sort(key=lambda r: (Fraction(form.ip(r.v, w0) ** 2, r.normsq),
                              r.normsq, r.v))
    for r in cands:
        if _chamber_compact(form, roots):
            return roots
        if len(roots) >= max_roots:
            break
        if all(form.ip(r.v, s.v) <= 0 for s in roots):
            roots.append(r)
    if _chamber_compact(form, roots):
        return roots
    err = RuntimeError(
        f"chamber not compact within coefficient box {box}; "
        f"partial root list {[r.v for r in roots]}")
    err.partial = roots  # type: ignore[attr-defined]
    raise err


def roots_to_halfplane(form: TernaryForm,
                       roots: Sequence[RootVector]) -> List[Geodesic]:
    """Wall geodesics, exact, in root order."""
    return [_root_geodesic(form, r.v) for r in roots]


# -- chamber polygon ---------------------------------------------------------

def _circle_data(g: Geodesic):
    if g.kind != "circle":
        raise ValueError("not a circle")
    return sym(g.p1), sp.expand(sym(g.p2) ** 2)


def _geodesic_intersection(g1: Geodesic, g2: Geodesic) -> HPoint:
    """Exact intersection of two crossing geodesics in the half-plane."""
    if g1.kind == "vertical" and g2.kind == "vertical":
        raise ValueError("vertical geodesics do not cross")
    if g1.kind == "vertical":
        g1, g2 = g2, g1
    if g2.kind == "vertical":
        x = sym(g2.p1)
        c, r2 = _circle_data(g1)
        ysq = sp.radsimp(sp.expand(r2 - (x - c) ** 2))
        if exact_sign(ysq) <= 0:
            raise ValueError("geodesics do not cross")
        return HPoint.exact_point(x, sp.sqrt(ysq))
    c1, r1 = _circle_data(g1)
    c2, r2 = _circle_data(g2)
    if exact_eq(c1, c2):
        raise ValueError("concentric geodesics do not cross")
    x = sp.radsimp((r1 - r2 + c2 ** 2 - c1 ** 2) / (2 * (c2 - c1)))
    ysq = sp.radsimp(sp.expand(r1 - (x - c1) ** 2))
    if exact_sign(ysq) <= 0:
        raise ValueError("geodesics do not cross")
    return HPoint.exact_point(x, sp.sqrt(ysq))


def _angle_cos(g1: Geodesic, g2: Geodesic):
    """Exact cosine of the angle between two crossing geodesics."""
    if g1.kind == "vertical" and g2.kind == "vertical":
        raise ValueError("vertical geodesics do not cross")
    if g1.kind == "vertical":
        g1, g2 = g2, g1
    if g2.kind == "vertical":
        c, r2 = _circle_data(g1)
        return sp.radsimp(sp.Abs(sym(g2.p1) - c) / sp.sqrt(r2))
    c1, r1 = _circle_data(g1)
    c2, r2 = _circle_data(g2)
    return sp.radsimp(sp.Abs((c1 - c2) ** 2 - r1 - r2)
                      / (2 * sp.sqrt(r1) * sp.sqrt(r2)))


def _match_corner_order(cosv) -> int:
    """n with angle pi/n, recognized exactly; n <= 12."""
    for n in range(2, 13):
        if exact_eq(cosv, sp.cos(sp.pi / n)):
            return n
    raise AssertionError(f"corner cosine {cosv} is not cos(pi/n), n <= 12")


def _numeric_tangent_angle(g1: Geodesic, g2: Geodesic, z: complex) -> float:
    def tangent(g: Geodesic) -> complex:
        if g.kind == "vertical":
            return 1j
        return 1j * (z - complex(as_float(g.p1)))

    t1, t2 = tangent(g1), tangent(g2)
    c = abs((t1.real * t2.real + t1.imag * t2.imag) / (abs(t1) * abs(t2)))
    return math.acos(min(1.0, c))


@dataclass
class ReflectionPolygon:
    """Compact chamber: walls in cyclic order, exact corner points,
    corner orders n_i (interior angle pi/n_i), and wall reflections.

    vertices[i] is the corner between walls[i] and walls[i+1].
    """

    form: TernaryForm
    roots: List[RootVector]
    walls: List[Geodesic]
    vertices: List[HPoint]
    orders: List[int]
    reflections: List[Motion]

    @classmethod
    def from_roots(cls, form: TernaryForm,
                   roots: Sequence[RootVector]) -> "ReflectionPolygon":
        roots = list(roots)
        cons = [_klein_constraint(form, r.v) for r in roots]
        verts = _polygon_vertices(cons)
        if len(verts) != len(roots):
            raise ValueError("chamber is not a compact simple polygon")
        cx = sum(float(X) for _, (X, Y) in verts) / len(verts)
        cy = sum(float(Y) for _, (X, Y) in verts) / len(verts)
        verts.sort(key=lambda item: math.atan2(float(item[1][1]) - cy,
                                               float(item[1][0]) - cx))
        order: List[int] = []
        n = len(verts)
        for k in range(n):
            shared = set(verts[k][0]) & set(verts[(k + 1) % n][0])
            if len(shared) != 1:
                raise ValueError("polygon edge structure is degenerate")
            order.append(shared.pop())
        roots_o = [roots[i] for i in order]
        walls = [_root_geodesic(form, r.v) for r in roots_o]
        vertices, orders = [], []
        for i in range(n):
            g1, g2 = walls[i], walls[(i + 1) % n]
            pt = _geodesic_intersection(g1, g2)
            if not (g1.contains(pt) and g2.contains(pt)):
                raise AssertionError("corner drifts off its walls")
            vertices.append(pt)
            orders.append(_match_corner_order(_angle_cos(g1, g2)))
        refl = [g.reflection() for g in walls]
        poly = cls(form, roots_o, walls, vertices, orders, refl)
        poly._check()
        return poly

    def _check(self) -> None:
        n = len(self.walls)
        for i in range(n):
            g1, g2 = self.walls[i], self.walls[(i + 1) % n]
            a = _numeric_tangent_angle(g1, g2, complex(self.vertices[i].z))
            if abs(a - math.pi / self.orders[i]) > 1e-9:
                raise AssertionError(
                    f"corner angle {a} differs from pi/{self.orders[i]}")
        if self.area() <= 1e-9:
            raise AssertionError("polygon area is not positive")
        for i in range(n):
            m = self.reflections[i] @ self.reflections[(i + 1) % n]
            power = m
            for _ in range(self.orders[i] - 1):
                power = power @ m
            if power.reverses or not power.mat.proj_eq(IDENTITY):
                raise AssertionError(
                    f"corner relation of order {self.orders[i]} fails")

    def area(self) -> float:
        k = len(self.orders)
        return (k - 2) * math.pi - sum(math.pi / n for n in self.orders)

    def serialize(self) -> dict:
        return {
            "roots": [r.serialize() for r in self.roots],
            "walls": [g.serialize() for g in self.walls],
            "vertices": [v.serialize() for v in self.vertices],
            "corner_orders": list(self.orders),
            "area": self.area(),
        }


# -- mirror arcs and the two cocompact groups --------------------------------

def _arc_sample(geod: Geodesic, z1: complex, z2: complex, t: float) -> complex:
    """Float point on the geodesic between z1 and z2 at parameter t."""
    if geod.kind == "vertical":
        x0 = as_float(geod.p1)
        y = z1.imag ** (1 - t) * z2.imag ** t
        return complex(x0, y)
    c = as_float(geod.p1)
    r = as_float(geod.p2)
    a1 = math.atan2(z1.imag, z1.real - c)
    a2 = math.atan2(z2.imag, z2.real - c)
    a = a1 + (a2 - a1) * t
    return complex(c + r * math.cos(a), r * math.sin(a))


@dataclass
class MirrorArc:
    """Arc of the mirror circuit on the doubled domain.

    The witness is a holomorphic group element w with w(sigma z) = z
    for every z on the arc; its word spells w in the group generators.
    """

    name: str
    geodesic: Geodesic
    start: HPoint
    end: HPoint
    witness: Motion
    witness_word: List[str]

    def verify_samples(self, n: int = 100, tol: float = 1e-9) -> None:
        if self.witness.reverses:
            raise AssertionError("witness must be holomorphic")
        if len(self.witness_word) > 12:
            raise AssertionError("witness word too long")
        z1, z2 = self.start.z, self.end.z
        for k in range(n):
            t = (k + 0.5) / n
            z = _arc_sample(self.geodesic, z1, z2, t)
            back = self.witness.apply_complex(complex(-z.real, z.imag))
            if abs(back - z) > tol * max(1.0, abs(z)):
                raise AssertionError(
                    f"arc {self.name}: witness fails at {z}")

    def serialize(self) -> dict:
        return {
            "name": self.name,
            "geodesic": self.geodesic.serialize(),
            "start": self.start.serialize(),
            "end": self.end.serialize(),
            "witness_word": list(self.witness_word),
        }


@dataclass
class CocompactGroup:
    """Reflection data for one of the two compact quotients.

    generators: holomorphic generators of the orientation-preserving
    group; reflections: the wall reflections of the chamber; arcs: the
    mirror circuit of the doubled domain with joints gluing arc ends;
    closures: one holomorphic element per mirror geodesic swapping or
    fixing its ideal feet, certifying the closed geodesic downstairs.
    """

    p: int
    form: TernaryForm
    roots: List[RootVector]
    chamber: ReflectionPolygon
    generators: Dict[str, Motion]
    reflections: Dict[str, Motion]
    arcs: List[MirrorArc]
    joints: List[Tuple[str, str, Motion, List[str]]]
    closures: Dict[str, dict]
    domain_orders: List[int]
    extras: Dict[str, object] = field(default_factory=dict)

    def verify_fixed_arcs(self, n: int = 100) -> None:
        """Sample every arc against its witness and walk the circuit:
        consecutive arcs either share an endpoint or are glued by a
        joint whose element carries one free end to the other."""
        for arc in self.arcs:
            arc.verify_samples(n)
        by_name = {a.name: a for a in self.arcs}
        for a_from, a_to, w, word in self.joints:
            if w.reverses:
                raise AssertionError("joint witness must be holomorphic")
            if len(word) > 12:
                raise AssertionError("joint word too long")
            src, dst = by_name[a_from], by_name[a_to]
            if not w.apply(src.end).same_point(dst.start):
                raise AssertionError(f"joint {a_from}->{a_to} misses")
        glued = {(a, b) for a, b, _, _ in self.joints}
        k = len(self.arcs)
        for i in range(k):
            src = self.arcs[i]
            dst = self.arcs[(i + 1) % k]
            if src.end.same_point(dst.start):
                continue
            if (src.name, dst.name) not in glued:
                raise AssertionError(
                    f"circuit breaks between {src.name} and {dst.name}")

    def serialize(self) -> dict:
        return {
            "p": self.p,
            "chamber": self.chamber.serialize(),
            "domain_corner_orders": list(self.domain_orders),
            "arcs": [a.serialize() for a in self.arcs],
            "joints": [{"from": a, "to": b, "word": word}
                       for a, b, _, word in self.joints],
            "closures": {k: {kk: vv for kk, vv in v.items() if kk != "motion"}
                         for k, v in self.closures.items()},
        }


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise AssertionError(msg)


def _require_boundary(m: Mat2, x, target, msg: str) -> None:
    img = boundary_apply(m, x)
    if target is None:
        _require(img is None, msg)
        return
    _require(img is not None and exact_eq(sym(img), sym(target)), msg)


def _motion_pow(m: Motion, n: int) -> Motion:
    out = m
    for _ in range(n - 1):
        out = out @ m
    return out


_GROUP_CACHE: Dict[int, "CocompactGroup"] = {}


def build_group_p3() -> CocompactGroup:
    """Reflection group of -3x1^2 + x2^2 + x3^2, all data exact.

    The chamber is a (2,4,6) triangle; the doubled domain a (2,6,6)
    triangle whose mirror circuit is the closed triangle of arcs on
    the axis, the wall circle through i, and the outer circle.
    """
    if 3 in _GROUP_CACHE:
        return _GROUP_CACHE[3]
    form = TernaryForm(3)
    roots = vinberg_roots(form)
    _require([r.v for r in roots] == [(0, 0, -1), (0, -1, 1), (1, 3, 0)],
             "unexpected root list for a1 = 3")
    geos = roots_to_halfplane(form, roots)
    rr = (1 + sp.sqrt(3)) / sp.sqrt(2)        # outer radius, rr^2 = 2+sqrt(3)
    ss = 1 + sp.sqrt(2)                       # positive foot of the i-wall
    _require(geos[0].kind == "vertical" and exact_eq(geos[0].p1, 0),
             "axis wall mismatch")
    _require(exact_eq(geos[1].p1, 1) and exact_eq(geos[1].p2, sp.sqrt(2)),
             "i-wall mismatch")
    _require(exact_eq(geos[2].p1, 0) and exact_eq(geos[2].p2 ** 2, 2 + sp.sqrt(3)),
             "outer wall mismatch")

    chamber = ReflectionPolygon.from_roots(form, roots)
    _require(sorted(chamber.orders) == [2, 4, 6], "chamber is not (2,4,6)")

    g_axis, g_inner, g_outer = geos
    r_axis = SIGMA
    r_inner = g_inner.reflection()
    r_outer = g_outer.reflection()

    u_mot = r_axis @ r_inner
    v_mot = r_axis @ r_outer
    _require(u_mot.mat.proj_eq(Mat2(1, 1, -1, 1)), "axis*inner product drifts")
    _require(v_mot.mat.proj_eq(Mat2(0, -rr ** 2, 1, 0)),
             "axis*outer product drifts")
    # orientation-reversing conjugation inverts one generator, fixes the other
    _require(u_mot.hat().mat.proj_eq(u_mot.mat.inverse()),
             "mirror conjugation of the first generator fails")
    _require(v_mot.hat().mat.proj_eq(v_mot.mat),
             "mirror conjugation of the second generator fails")
    _require(_motion_pow(u_mot, 4).mat.proj_eq(IDENTITY), "order of u is not 4")
    _require(_motion_pow(v_mot, 2).mat.proj_eq(IDENTITY), "order of v is not 2")
    _require(_motion_pow(u_mot.inverse() @ v_mot, 6).mat.proj_eq(IDENTITY),
             "order of u^-1 v is not 6")
    _require((u_mot @ u_mot).mat.proj_eq(S_MAT), "u^2 is not the half-turn at i")

    # half-turn closing the outer mirror: p = (v u)^-3 swaps its feet
    p_mat = (v_mot.mat @ u_mot.mat).inverse()
    p_mat = p_mat @ p_mat @ p_mat
    target = Mat2(1, -(1 + sp.sqrt(3)), sp.sqrt(3) - 1, -1)
    _require(p_mat.proj_eq(target), "outer closure element mismatch")
    _require(exact_eq(sym(sp.sqrt(2) * rr), 1 + sp.sqrt(3)),
             "field identity sqrt(2)*r = 1+sqrt(3) fails")
    _require_boundary(p_mat, rr, -rr, "outer closure does not swap feet")
    _require_boundary((u_mot @ u_mot).mat, ss, 1 - sp.sqrt(2),
                      "axis half-turn does not swap inner feet")
    _require_boundary(v_mot.mat, sp.Integer(0), None,
                      "outer generator does not send 0 to inf")

    # corners of the doubled domain
    c_i = HPoint.exact_point(0, 1)
    c_ir = HPoint.exact_point(0, rr)
    c_w = HPoint.exact_point((1 + sp.sqrt(3)) / 2, (1 + sp.sqrt(3)) / 2)
    for pt, gs in ((c_i, (g_axis, g_inner)), (c_ir, (g_axis, g_outer)),
                   (c_w, (g_inner, g_outer))):
        _require(all(g.contains(pt) for g in gs), "domain corner off its walls")

    arcs = [
        MirrorArc("axis", g_axis, c_i, c_ir, Motion(IDENTITY), []),
        MirrorArc("outer", g_outer, c_ir, c_w, v_mot.inverse(), ["V^-1"]),
        MirrorArc("inner", g_inner, c_w, c_i, u_mot.inverse(), ["U^-1"]),
    ]
    closures = {
        "axis": {"motion": v_mot, "word": ["V"], "maps": "0 -> inf"},
        "inner": {"motion": u_mot @ u_mot, "word": ["U", "U"],
                  "maps": "1+sqrt(2) -> 1-sqrt(2)"},
        "outer": {"motion": Motion(p_mat), "word": ["(VU)^-3"],
                  "maps": "r -> -r"},
    }

    group = CocompactGroup(
        p=3, form=form, roots=roots, chamber=chamber,
        generators={"U": u_mot, "V": v_mot},
        reflections={"axis": r_axis, "inner": r_inner, "outer": r_outer},
        arcs=arcs, joints=[],
        closures=closures,
        domain_orders=[2, 6, 6],
        extras={"outer_radius": rr, "inner_foot": ss,
                "outer_closure": Motion(p_mat)},
    )
    group.verify_fixed_arcs()
    _verify_sof_bridge(group)
    _GROUP_CACHE[3] = group
    return group


def build_group_p7() -> CocompactGroup:
    """Reflection group of -7x1^2 + x2^2 + x3^2, all data exact.

    The chamber is a quadrilateral with corner orders (4,2,4,2).  The
    doubled domain's mirror circuit runs along the axis, the outer
    circle, and the wall circle through i, closed by a rotation that
    exchanges the outer and inner free corners across the auxiliary
    orthogonal geodesic.
    """
    if 7 in _GROUP_CACHE:
        return _GROUP_CACHE[7]
    form = TernaryForm(7)
    roots = vinberg_roots(form)
    _require([r.v for r in roots]
             == [(0, 0, -1), (0, -1, 1), (1, 3, 0), (1, 2, 2)],
             "unexpected root list for a1 = 7")
    geos = roots_to_halfplane(form, roots)
    rt7 = sp.sqrt(7)
    eta = 2 + rt7
    eta_c = 2 - rt7
    theta = (3 + rt7) / sp.sqrt(2)            # theta^2 = 8 + 3*sqrt(7)
    _require(geos[0].kind == "vertical" and exact_eq(geos[0].p1, 0),
             "axis wall mismatch")
    _require(exact_eq(geos[1].p1, 1) and exact_eq(geos[1].p2, sp.sqrt(2)),
             "i-wall mismatch")
    _require(exact_eq(geos[2].p1, 0)
             and exact_eq(geos[2].p2 ** 2, 8 + 3 * rt7),
             "outer wall mismatch")
    _require(exact_eq(geos[3].p1, 2 * eta / 3)
             and exact_eq(geos[3].p2, eta / 3),
             "slant wall mismatch")

    chamber = ReflectionPolygon.from_roots(form, roots)
    _require(sorted(chamber.orders) == [2, 2, 4, 4],
             "chamber is not a (2,2,4,4) quadrilateral")

    g_axis, g_inner, g_outer, g_slant = geos
    r_axis = SIGMA
    r_inner = g_inner.reflection()
    r_outer = g_outer.reflection()
    r_slant = g_slant.reflection()
    _require(r_slant.mat.proj_eq(Mat2(2, -eta, -eta_c, -2)),
             "slant reflection matrix mismatch")

    u_mot = r_axis @ r_inner
    v_mot = r_axis @ r_outer
    x_mat = Mat2(1 / sp.sqrt(2), -eta / sp.sqrt(2),
                 -eta_c / sp.sqrt(2), -1 / sp.sqrt(2))
    _require(exact_eq(sym(x_mat.det()), 1), "rotation matrix not unimodular")
    x_mot = Motion(x_mat)
    _require(_motion_pow(x_mot, 2).mat.proj_eq(IDENTITY),
             "rotation is not an involution")

    # the involution conjugates the slant wall to the axis and the
    # outer wall to the inner one
    _require((x_mot @ r_axis @ x_mot).proj_eq(r_slant),
             "slant reflection is not the conjugated axis reflection")
    _require((x_mot @ r_inner @ x_mot).proj_eq(r_outer),
             "outer reflection is not the conjugated inner reflection")
    # product relation tying all four generators
    rel = u_mot @ x_mot @ v_mot @ x_mot.hat()
    _require(not rel.reverses and rel.mat.proj_eq(IDENTITY),
             "u x v x~ is not the identity")
    # the slant rotation r_axis r_slant equals (r_axis x)^2 and x~ x
    lhs = r_axis @ r_slant
    mid = (r_axis @ x_mot) @ (r_axis @ x_mot)
    rhs = x_mot.hat() @ x_mot
    _require(lhs.proj_eq(mid) and lhs.proj_eq(rhs),
             "slant rotation factorizations fail")

    # auxiliary geodesic orthogonal to inner and outer walls
    center_e = (7 + 3 * rt7) / 2
    radsq_e = (40 + 15 * rt7) / 2
    g_cross = Geodesic("circle", center_e, sp.sqrt(radsq_e), exact=True)
    c1, r1 = _circle_data(g_inner)
    c2, r2 = _circle_data(g_cross)
    _require(exact_eq((c1 - c2) ** 2, r1 + r2), "cross not orthogonal to inner")
    c1, r1 = _circle_data(g_outer)
    _require(exact_eq((c1 - c2) ** 2, r1 + r2), "cross not orthogonal to outer")
    fix_pt = HPoint.exact_point(eta / 3, sp.sqrt(2) * eta / 3)
    _require(g_cross.contains(fix_pt), "rotation center off the cross circle")
    img = x_mot.apply(fix_pt)
    _require(img.same_point(fix_pt), "rotation does not fix its center")
    e_lo = center_e - sp.sqrt(radsq_e)
    e_hi = center_e + sp.sqrt(radsq_e)
    _require_boundary(x_mat, e_hi, e_lo, "rotation does not swap cross feet")

    # free corners of the doubled domain, exchanged by the rotation
    t_inner = _geodesic_intersection(g_inner, g_cross)
    t_outer = _geodesic_intersection(g_outer, g_cross)
    _require(x_mot.apply(t_inner).same_point(t_outer),
             "rotation does not exchange the free corners")

    c_i = HPoint.exact_point(0, 1)
    c_it = HPoint.exact_point(0, theta)
    _require(g_outer.contains(c_it), "outer wall misses i*theta")

    arcs = [
        MirrorArc("axis", g_axis, c_i, c_it, Motion(IDENTITY), []),
        MirrorArc("outer", g_outer, c_it, t_outer, v_mot.inverse(), ["V^-1"]),
        MirrorArc("inner", g_inner, t_inner, c_i, u_mot.inverse(), ["U^-1"]),
    ]
    # the rotation squares to the (projective) identity, so it also
    # carries the outer free corner back to the inner one
    joints = [("outer", "inner", x_mot, ["X"])]

    s_mot = u_mot @ u_mot
    _require(s_mot.mat.proj_eq(S_MAT), "axis half-turn mismatch")
    w_outer = x_mot @ s_mot @ x_mot
    w_inner = x_mot @ v_mot @ x_mot
    shift_outer = w_outer @ v_mot
    shift_inner = w_inner @ s_mot
    _require_boundary(shift_outer.mat, theta, theta,
                      "outer shift moves a foot")
    _require_boundary(shift_outer.mat, -theta, -theta,
                      "outer shift moves a foot")
    ss = 1 + sp.sqrt(2)
    _require_boundary(shift_inner.mat, ss, ss, "inner shift moves a foot")
    _require_boundary(shift_inner.mat, 1 - sp.sqrt(2), 1 - sp.sqrt(2),
                      "inner shift moves a foot")

    closures = {
        "axis": {"motion": v_mot, "word": ["V"], "maps": "0 -> inf"},
        "inner": {"motion": s_mot, "word": ["U", "U"],
                  "maps": "1+sqrt(2) -> 1-sqrt(2)"},
        "outer": {"motion": v_mot, "word": ["V"], "maps": "theta -> -theta"},
        "cross": {"motion": x_mot, "word": ["X"],
                  "maps": "swaps the cross feet"},
    }
    _require_boundary(v_mot.mat, theta, -theta,
                      "outer closure does not swap feet")

    group = CocompactGroup(
        p=7, form=form, roots=roots, chamber=chamber,
        generators={"U": u_mot, "V": v_mot, "X": x_mot},
        reflections={"axis": r_axis, "inner": r_inner,
                     "outer": r_outer, "slant": r_slant},
        arcs=arcs, joints=joints,
        closures=closures,
        domain_orders=[2, 2, 4, 4, 2],
        extras={"cross": g_cross, "theta": theta, "eta": eta,
                "rotation_center": fix_pt,
                "outer_shift": shift_outer, "inner_shift": shift_inner},
    )
    group.verify_fixed_arcs()
    _verify_sof_bridge(group)
    _GROUP_CACHE[7] = group
    return group


# -- closure maps along the axis and their conjugates ------------------------

def closure_partition(tau, y_range: Tuple[float, float]) -> List[dict]:
    """Partition of an axis range into fundamental intervals.

    The cyclic group generated by z -> tau^2 z (tau > 1) has the arc
    {iy : 1 <= y <= tau} as fundamental domain once the half-turn at
    i*tau^(k+1/2)-level flips are included: on [tau^k, tau^(k+1)] the
    map is z -> tau^(-k) z for even k and z -> -tau^(k+1)/z for odd k.
    Each entry carries the exact motion; the algebra against the
    half-turn/scale generators is certified symbolically.
    """
    _closure_symbolic_check()
    tau_s = sym(tau)
    tau_f = as_float(tau)
    if tau_f <= 1:
        raise ValueError("tau must exceed 1")
    y_lo, y_hi = y_range
    if not 0 < y_lo <= y_hi:
        raise ValueError("bad y range")
    k_lo = math.floor(math.log(y_lo) / math.log(tau_f) + 1e-12)
    k_hi = math.ceil(math.log(y_hi) / math.log(tau_f) - 1e-12)
    out = []
    for k in range(k_lo, k_hi):
        if k % 2 == 0:
            l = k // 2
            mat = Mat2(tau_s ** (-l), 0, 0, tau_s ** l)
            kind = "scale"
        else:
            l = (k - 1) // 2
            mat = Mat2(0, -tau_s ** (l + 1), tau_s ** (-l - 1), 0)
            kind = "flip"
        seg = {
            "k": k,
            "interval": (tau_f ** k, tau_f ** (k + 1)),
            "kind": kind,
            "power": l,
            "motion": Motion(mat),
        }
        y_mid = math.sqrt(seg["interval"][0] * seg["interval"][1])
        img = Motion(mat).apply_complex(complex(0.0, y_mid))
        if not (abs(img.real) < 1e-9 and 1 - 1e-9 <= img.imag <= tau_f + 1e-9):
            raise AssertionError("partition map misses the fundamental arc")
        out.append(seg)
    return out


def _closure_symbolic_check() -> None:
    """(half-turn * scale)^l and scale*(...)^l in closed form."""
    t = sp.Symbol("_tau", positive=True)
    s = Mat2(0, -1, 1, 0)
    v = Mat2(0, -t, 1 / t, 0)
    sv = s @ v
    acc = IDENTITY
    for l in range(0, 4):
        if l > 0:
            acc = acc @ sv
        _require(acc.proj_eq(Mat2(t ** (-l), 0, 0, t ** l)),
                 "even closure map closed form fails")
        _require((v @ acc).proj_eq(Mat2(0, -t ** (l + 1), t ** (-l - 1), 0)),
                 "odd closure map closed form fails")


def conjugated_closure_maps(arc: str, p: int = 3) -> dict:
    """Closure data for the non-axis mirror arcs, by conjugation.

    A fractional-linear change of variable carries the mirror circle
    to the axis; conjugating the axis half-turn and the flip at height
    q recovers the intrinsic closure elements of the arc.  Only the
    first group (p = 3) carries the worked identities.
    """
    if p != 3:
        raise NotImplementedError("conjugated closure maps tabulated for p=3")
    group = build_group_p3()
    u_mot = group.generators["U"]
    v_mot = group.generators["V"]
    rr = sym(group.extras["outer_radius"])
    ss = sym(group.extras["inner_foot"])
    p_mat = group.extras["outer_closure"].mat
    s_sq = u_mot.mat @ u_mot.mat

    if arc == "outer":
        conj = Mat2(1 / rr, 1, -1 / rr, 1)
        # feet of the outer circle go to 0 and inf
        _require_boundary(conj, -rr, sp.Integer(0), "conjugation misses 0")
        _require(boundary_apply(conj, rr) is None, "conjugation misses inf")
        flip = Mat2(0, -ss, 1 / ss, 0)
        lhs1 = conj.inverse() @ s_sq @ conj
        _require(lhs1.proj_eq(v_mot.mat),
                 "conjugated half-turn is not the outer generator")
        lhs2 = conj.inverse() @ flip @ conj
        _require(lhs2.proj_eq(p_mat),
                 "conjugated flip is not the outer closure element")
        return {"conjugator": conj, "half_turn": Mat2(*lhs1.entries()),
                "flip_height": ss, "flip_image": Mat2(*lhs2.entries())}

    if arc == "inner":
        conj = Mat2(ss, 1, -1, ss)
        _require_boundary(conj, 1 - sp.sqrt(2), sp.Integer(0),
                          "conjugation misses 0")
        _require(boundary_apply(conj, ss) is None, "conjugation misses inf")
        lhs1 = conj.inverse() @ s_sq @ conj
        _require(lhs1.proj_eq(S_MAT),
                 "conjugation does not commute with the half-turn")
        # height of the free corner of the inner arc
        corner = HPoint.exact_point((1 + sp.sqrt(3)) / 2, (1 + sp.sqrt(3)) / 2)
        img = Motion(conj).apply(corner)
        _require(exact_eq(img.xs, 0), "corner does not land on the axis")
        q = img.ys
        flip = Mat2(0, -q, 1 / q, 0)
        lhs2 = conj.inverse() @ flip @ conj
        _require(lhs2.proj_eq(p_mat),
                 "conjugated corner flip is not the closure element")
        q1 = sp.radsimp((ss ** 2 * q + 1 / q) / (ss * (q - 1 / q)))
        q2 = sp.radsimp((ss ** 2 / q + q) / (ss * (q - 1 / q)))
        _require(exact_eq(q1, 1 + sp.sqrt(3)), "first closure entry mismatch")
        _require(exact_eq(q2, sp.sqrt(3) - 1), "second closure entry mismatch")
        _require(exact_eq(q1, sp.sqrt(2) * rr) and exact_eq(q2, sp.sqrt(2) / rr),
                 "closure entries do not match the outer radius")
        return {"conjugator": conj, "half_turn": Mat2(*lhs1.entries()),
                "flip_height": q, "flip_image": Mat2(*lhs2.entries()),
                "entries": (1 + sp.sqrt(3), sp.sqrt(3) - 1)}

    raise ValueError("arc must be 'inner' or 'outer'")


# -- three-dimensional representation and the quaternion layer ---------------

_SWAP23 = sp.Matrix([[1, 0, 0], [0, 0, 1], [0, 1, 0]])


def pslr_to_sof(m: Mat2, p: int) -> sp.Matrix:
    """Quadratic image of a unimodular 2x2 matrix in the special
    orthogonal group of -p x1^2 + x2^2 + x3^2.

    The matrix must have determinant exactly 1 (not just up to sign).
    """
    det = sym(m.det())
    if not exact_eq(det, 1):
        raise ValueError("matrix must have determinant 1")
    a, b, c, d = (sym(t) for t in m.entries())
    rt = sp.sqrt(p)
    rows = [
        [(a ** 2 + b ** 2 + c ** 2 + d ** 2) / 2,
         (a * b + c * d) / rt,
         (a ** 2 - b ** 2 + c ** 2 - d ** 2) / (2 * rt)],
        [rt * (a * c + b * d),
         a * d + b * c,
         a * c - b * d],
        [rt * (a ** 2 + b ** 2 - c ** 2 - d ** 2) / 2,
         a * b - c * d,
         (a ** 2 - b ** 2 - c ** 2 + d ** 2) / 2],
    ]
    out = sp.Matrix(rows).applyfunc(lambda e: sp.radsimp(sp.expand(e)))
    g = sp.diag(-p, 1, 1)
    if sp.expand(out.T * g * out - g) != sp.zeros(3, 3):
        raise AssertionError("image does not preserve the form")
    return out


def motion_to_sof(mot: Motion, p: int) -> sp.Matrix:
    """Extension of the quadratic map to mirror motions, in the wall
    coordinate pairing.

    The quadratic map pairs the disc coordinates with (x2, x3) in the
    transposed order relative to the wall dictionary; conjugating by
    the coordinate swap aligns the two, and a mirror motion factors
    through the axis reflection, which flips the third coordinate.
    """
    mat = mot.mat
    if mot.reverses:
        mat = mat @ SIGMA.mat
    det = sym(mat.det())
    # nested radical scales (sqrt of a quadratic surd) must be denested
    # or the entries never leave sympy's sqrt-of-sqrt normal form
    scale = sp.sqrtdenest(sp.sqrt(sp.radsimp(det)))
    mat = mat * (sp.Integer(1) / scale)
    out = _SWAP23 * pslr_to_sof(mat, p) * _SWAP23
    if mot.reverses:
        out = out * sp.diag(1, 1, -1)
    return out.applyfunc(lambda e: sp.radsimp(sp.expand(sp.sqrtdenest(e))))


def _verify_sof_bridge(group: CocompactGroup) -> None:
    """Wall reflections map to the root reflection matrices."""
    order = {"axis": 0, "inner": 1, "outer": 2, "slant": 3}
    for name, mot in group.reflections.items():
        root = group.roots[order[name]]
        img = motion_to_sof(mot, group.p)
        want = root.reflection()
        diff = (img - want).applyfunc(lambda e: sp.radsimp(sp.expand(e)))
        if diff != sp.zeros(3, 3):
            raise AssertionError(
                f"wall {name}: quadratic image differs from root reflection")


def quaternion_norm(u: Sequence, p: int):
    """u0^2 + u1^2 - p u2^2 - p u3^2, exactly."""
    u = [sym(t) for t in u]
    return sp.expand(u[0] ** 2 + u[1] ** 2 - p * u[2] ** 2 - p * u[3] ** 2)


def quaternion_norm_one_embed(u: Sequence, p: int) -> Mat2:
    """Unit of the rational quaternion algebra (-1, p) as a 2x2 matrix.

    Requires norm exactly 1; lands in the even first-kind family with
    quadruple (2u0, -2u3, -2u1, 2u2).
    """
    n = quaternion_norm(u, p)
    if not exact_eq(n, 1):
        raise ValueError(f"quaternion norm is {n}, not 1")
    u = [sym(t) for t in u]
    rt = sp.sqrt(p)
    m = Mat2(u[0] - rt * u[3], -u[1] + rt * u[2],
             u[1] + rt * u[2], u[0] + rt * u[3])
    _require(exact_eq(sym(m.det()), 1), "embedded unit not unimodular")
    kind = classify_even_four(m, p)
    _require(kind is not None and kind["kind"] == "first"
             and kind["parity"] == "even",
             "embedded unit not in the even first-kind family")
    return m


def _as_integer(e) -> Optional[int]:
    e = sp.nsimplify(sp.radsimp(sp.expand(e)))
    if e.is_Integer:
        return int(e)
    return None


def classify_even_four(m: Mat2, p: int) -> Optional[dict]:
    """Integer quadruple classification of a unimodular matrix.

    First kind: [[(a+s b)/2, (c+s d)/2], [(-c+s d)/2, (a-s b)/2]] with
    s = sqrt(p) and a^2 - p b^2 + c^2 - p d^2 = 4; second kind has
    bottom row [(c-s d)/2, (-a+s b)/2] and norm -4.  The quadruple
    must be integral with all entries of equal parity.  Returns None
    when the matrix fits neither shape.

    Matrices with determinant other than 1 are rescaled first; the
    quadruple is only well defined up to a global sign.
    """
    det = sym(m.det())
    if exact_sign(det) <= 0:
        return None
    al, be, ga, de = (sym(t) for t in m.entries())
    if not exact_eq(det, 1):
        scale = sp.sqrtdenest(sp.sqrt(sp.radsimp(det)))
        al, be, ga, de = (sp.radsimp(sp.expand(sp.sqrtdenest(t / scale)))
                          for t in (al, be, ga, de))
    rt = sp.sqrt(p)
    for kind in ("first", "second"):
        if kind == "first":
            a = _as_integer(al + de)
            b = _as_integer((al - de) / rt)
            c = _as_integer(be - ga)
            d = _as_integer((be + ga) / rt)
            want = 4
        else:
            a = _as_integer(al - de)
            b = _as_integer((al + de) / rt)
            c = _as_integer(be + ga)
            d = _as_integer((be - ga) / rt)
            want = -4
        if None in (a, b, c, d):
            continue
        if len({x % 2 for x in (a, b, c, d)}) != 1:
            continue
        norm = a * a - p * b * b + c * c - p * d * d
        if norm != want:
            continue
        parity = "even" if a % 2 == 0 else "odd"
        return {"kind": kind, "parity": parity, "quad": (a, b, c, d)}
    return None


def in_gamma_f_family(m: Mat2, p: int, coset_rep: Optional[Mat2] = None
                      ) -> Optional[dict]:
    """Classify m, or its translate by the extra coset, in the
    half-integral quadruple family."""
    direct = classify_even_four(m, p)
    if direct is not None:
        direct["coset"] = "main"
        return direct
    if coset_rep is not None:
        moved = classify_even_four(coset_rep.inverse() @ m, p)
        if moved is not None:
            moved["coset"] = "extra"
            return moved
    return None


def _odd_pair(target: int) -> Tuple[int, int]:
    for e1 in range(1, int(math.isqrt(target)) + 1, 2):
        rem = target - e1 * e1
        if rem <= 0:
            continue
        e2 = math.isqrt(rem)
        if e2 * e2 == rem and e2 % 2 == 1:
            return (max(e1, e2), min(e1, e2))
    raise ValueError(f"no odd two-square split of {target}")


def kind_swap_rep(p: int) -> Mat2:
    """Second-kind unit with odd quadruple: e1^2 + e2^2 = 2(p-2)."""
    e1, e2 = _odd_pair(2 * (p - 2))
    rt = sp.sqrt(p)
    m = Mat2((e1 + rt) / 2, (e2 + rt) / 2, (e2 - rt) / 2, (-e1 + rt) / 2)
    _require(exact_eq(sym(m.det()), 1), "kind-swap unit not unimodular")
    cls = classify_even_four(m, p)
    _require(cls is not None and cls["kind"] == "second"
             and cls["parity"] == "odd", "kind-swap classification fails")
    return m


def parity_swap_rep(p: int) -> Mat2:
    """First-kind unit with odd quadruple: e3^2 + e4^2 = 2(p+2)."""
    e3, e4 = _odd_pair(2 * (p + 2))
    rt = sp.sqrt(p)
    m = Mat2((e3 + rt) / 2, (e4 + rt) / 2, (-e4 + rt) / 2, (e3 - rt) / 2)
    _require(exact_eq(sym(m.det()), 1), "parity-swap unit not unimodular")
    cls = classify_even_four(m, p)
    _require(cls is not None and cls["kind"] == "first"
             and cls["parity"] == "odd", "parity-swap classification fails")
    return m
