"""Hyperbolic plane primitives: matrices, motions, points, geodesics.

Everything lives in the upper half-plane model.  A ``Motion`` is a
fractional-linear map with real entries, orientation-preserving or
-reversing; the reversing ones act through a conjugate.  Since all our
entries are real (integers or real algebraic numbers), composition is
plain matrix multiplication with an orientation parity bit.

Matrix entries are ints on the fast path and sympy expressions when a
radical is involved.  Points carry an ``exact`` flag; any operation
with an inexact participant degrades the result to float.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import sympy as sp

from .exact import exact_eq, exact_sign, as_float, simplify_entry, sym

__all__ = [
    "Mat2",
    "Motion",
    "HPoint",
    "Geodesic",
    "GeodesicArc",
    "IDENTITY",
    "S_MAT",
    "T_MAT",
    "SIGMA",
    "hat",
    "mat_hat",
    "reflection_in_vertical",
    "reflection_in_circle",
    "geodesic_through_boundary",
    "geodesic_through_points",
    "klein_point_to_halfplane",
    "klein_boundary_to_halfplane",
    "klein_line_to_geodesic",
    "hyperbolic_dist",
    "boundary_apply",
]

Entry = Union[int, sp.Expr]


def _is_int(x) -> bool:
    return isinstance(x, int)


def _mul_entry(a, b):
    if _is_int(a) and _is_int(b):
        return a * b
    return sym(a) * sym(b)


class Mat2:
    """2x2 matrix over Z or a real radical extension.

    Integer entries stay Python ints (exact, fast); anything else is a
    sympy expression simplified just enough to keep entry growth
    bounded inside word loops.
    """

    __slots__ = ("a", "b", "c", "d", "_sym")

    def __init__(self, a: Entry, b: Entry, c: Entry, d: Entry):
        self._sym = not (_is_int(a) and _is_int(b) and _is_int(c) and _is_int(d))
        if self._sym:
            a, b, c, d = (simplify_entry(sym(t)) for t in (a, b, c, d))
        self.a, self.b, self.c, self.d = a, b, c, d

    @property
    def is_int(self) -> bool:
        return not self._sym

    def entries(self) -> Tuple[Entry, Entry, Entry, Entry]:
        return (self.a, self.b, self.c, self.d)

    def det(self) -> Entry:
        if self.is_int:
            return self.a * self.d - self.b * self.c
        return simplify_entry(self.a * self.d - self.b * self.c)

    def __matmul__(self, other: "Mat2") -> "Mat2":
        a1, b1, c1, d1 = self.entries()
        a2, b2, c2, d2 = other.entries()
        if self.is_int and other.is_int:
            return Mat2(
                a1 * a2 + b1 * c2,
                a1 * b2 + b1 * d2,
                c1 * a2 + d1 * c2,
                c1 * b2 + d1 * d2,
            )
        return Mat2(
            sym(a1) * sym(a2) + sym(b1) * sym(c2),
            sym(a1) * sym(b2) + sym(b1) * sym(d2),
            sym(c1) * sym(a2) + sym(d1) * sym(c2),
            sym(c1) * sym(b2) + sym(d1) * sym(d2),
        )

    def __mul__(self, other):
        if isinstance(other, Mat2):
            return self @ other
        return Mat2(
            _mul_entry(self.a, other),
            _mul_entry(self.b, other),
            _mul_entry(self.c, other),
            _mul_entry(self.d, other),
        )

    __rmul__ = __mul__

    def __neg__(self) -> "Mat2":
        return Mat2(-self.a, -self.b, -self.c, -self.d)

    def inverse(self) -> "Mat2":
        """Inverse scaled to keep entries in the same ring: adj/det.

        For det = +-1 (our group elements) this is exact with no
        denominators; otherwise sympy division is used.
        """
        det = self.det()
        adj = Mat2(self.d, -self.b, -self.c, self.a)
        if self.is_int and det in (1, -1):
            return adj if det == 1 else -adj
        if isinstance(det, int) and det == 0:
            raise ZeroDivisionError("singular matrix")
        return adj * (sp.Integer(1) / sym(det))

    def transpose(self) -> "Mat2":
        return Mat2(self.a, self.c, self.b, self.d)

    def trace(self) -> Entry:
        if self.is_int:
            return self.a + self.d
        return simplify_entry(self.a + self.d)

    def canonical(self) -> "Mat2":
        """Sign-canonical representative of {m, -m}.

        Integer path: divide out gcd, then flip so the first nonzero
        of (a, b, c, d) is positive.  Symbolic path: flip by the sign
        of the first entry with decidable sign.
        """
        if self.is_int:
            g = math.gcd(math.gcd(abs(self.a), abs(self.b)),
                         math.gcd(abs(self.c), abs(self.d)))
            if g > 1:
                m = Mat2(self.a // g, self.b // g, self.c // g, self.d // g)
            else:
                m = self
            for t in m.entries():
                if t != 0:
                    return -m if t < 0 else m
            return m
        for t in self.entries():
            s = exact_sign(t)
            if s != 0:
                return -self if s < 0 else self
        return self

    def proj_eq(self, other: "Mat2") -> bool:
        """Projective equality m1 ~ lambda*m2 via vanishing 2x2 minors."""
        if self.is_int and other.is_int:
            m1, m2 = self.canonical(), other.canonical()
            return m1.entries() == m2.entries()
        a1, b1, c1, d1 = (sym(t) for t in self.entries())
        a2, b2, c2, d2 = (sym(t) for t in other.entries())
        pairs = [(a1, a2), (b1, b2), (c1, c2), (d1, d2)]
        for i in range(4):
            for j in range(i + 1, 4):
                if not exact_eq(pairs[i][0] * pairs[j][1],
                                pairs[j][0] * pairs[i][1]):
                    return False
        return any(not exact_eq(t, 0) for t in self.entries())

    def __eq__(self, other):
        if not isinstance(other, Mat2):
            return NotImplemented
        if self.is_int and other.is_int:
            return self.entries() == other.entries()
        return all(exact_eq(x, y) for x, y in zip(self.entries(), other.entries()))

    def __hash__(self):
        if self.is_int:
            return hash(self.entries())
        return hash(tuple(str(t) for t in self.entries()))

    def to_floats(self) -> Tuple[float, float, float, float]:
        return tuple(as_float(t) for t in self.entries())

    def __repr__(self):
        return f"Mat2({self.a}, {self.b}, {self.c}, {self.d})"


IDENTITY = Mat2(1, 0, 0, 1)
S_MAT = Mat2(0, -1, 1, 0)
T_MAT = Mat2(1, 1, 0, 1)


def mat_hat(m: Mat2) -> Mat2:
    """Entry involution [[a,b],[c,d]] -> [[a,-b],[-c,d]].

    This is conjugation of the associated map by z -> -conj(z); it is
    multiplicative and involutive, and fixes exactly the maps that
    commute with that reflection.
    """
    return Mat2(m.a, -m.b, -m.c, m.d)


@dataclass(frozen=True)
class Motion:
    """Isometry of the upper half-plane with real coefficients.

    ``reverses=False``: z -> (az+b)/(cz+d), needs det > 0.
    ``reverses=True``:  z -> (a*conj(z)+b)/(c*conj(z)+d), needs det < 0.

    With real entries both kinds compose by matrix product and the
    parity bits xor.
    """

    mat: Mat2
    reverses: bool = False

    def __post_init__(self):
        s = self.mat.det()
        s = s if isinstance(s, int) else exact_sign(s)
        if s == 0:
            raise ValueError("singular motion")
        want_neg = self.reverses
        if (s < 0) != want_neg:
            raise ValueError("determinant sign inconsistent with orientation")

    def __matmul__(self, other: "Motion") -> "Motion":
        return Motion(self.mat @ other.mat, self.reverses ^ other.reverses)

    def inverse(self) -> "Motion":
        return Motion(self.mat.inverse(), self.reverses)

    def apply_complex(self, z: complex) -> complex:
        a, b, c, d = self.mat.to_floats()
        w = z.conjugate() if self.reverses else z
        den = c * w + d
        if den == 0:
            return complex(math.inf, 0.0)
        return (a * w + b) / den

    def apply(self, pt: "HPoint") -> "HPoint":
        if pt.exact and not pt.at_infinity:
            a, b, c, d = (sym(t) for t in self.mat.entries())
            x = pt.xs
            y = -pt.ys if self.reverses else pt.ys
            den_re = c * x + d
            den_im = c * y
            num_re = a * x + b
            num_im = a * y
            n2 = simplify_entry(den_re ** 2 + den_im ** 2)
            nx = simplify_entry((num_re * den_re + num_im * den_im) / n2)
            ny = simplify_entry((num_im * den_re - num_re * den_im) / n2)
            return HPoint.exact_point(nx, ny)
        if pt.at_infinity:
            a, b, c, d = self.mat.to_floats()
            if c == 0:
                return HPoint.infinity()
            return HPoint(complex(a / c, 0.0))
        return HPoint(self.apply_complex(pt.z))

    def hat(self) -> "Motion":
        return Motion(mat_hat(self.mat), self.reverses)

    def proj_eq(self, other: "Motion") -> bool:
        return self.reverses == other.reverses and self.mat.proj_eq(other.mat)


def hat(m: Motion) -> Motion:
    return m.hat()


# z -> -conj(z): the distinguished reflection in the imaginary axis
SIGMA = Motion(Mat2(-1, 0, 0, 1), reverses=True)


class HPoint:
    """Point of the closed upper half-plane, exact when possible.

    ``xs, ys`` are sympy expressions if ``exact``; ``z`` is always the
    float shadow used for guidance and diagnostics.  Boundary points
    have ys == 0; the cusp at infinity is its own flag.
    """

    __slots__ = ("z", "xs", "ys", "exact", "at_infinity")

    def __init__(self, z: complex, xs=None, ys=None,
                 exact: bool = False, at_infinity: bool = False):
        self.z = complex(z)
        self.xs = xs
        self.ys = ys
        self.exact = exact
        self.at_infinity = at_infinity

    @classmethod
    def exact_point(cls, xs, ys) -> "HPoint":
        xs, ys = sym(xs), sym(ys)
        z = complex(float(xs.evalf(30)), float(ys.evalf(30)))
        return cls(z, xs, ys, exact=True)

    @classmethod
    def infinity(cls) -> "HPoint":
        return cls(complex(0.0, math.inf), at_infinity=True)

    @property
    def x(self) -> float:
        return self.z.real

    @property
    def y(self) -> float:
        return self.z.imag

    def is_boundary(self, tol: float = 1e-10) -> bool:
        if self.at_infinity:
            return True
        if self.exact:
            return exact_eq(self.ys, 0)
        return abs(self.z.imag) < tol

    def same_point(self, other: "HPoint", tol: float = 1e-10) -> bool:
        if self.at_infinity or other.at_infinity:
            return self.at_infinity and other.at_infinity
        if self.exact and other.exact:
            return exact_eq(self.xs, other.xs) and exact_eq(self.ys, other.ys)
        return abs(self.z - other.z) < tol

    def serialize(self) -> dict:
        if self.at_infinity:
            return {"x": None, "y": None, "cusp": "inf"}
        out = {"x": float(format(self.z.real, '.17g')),
               "y": float(format(self.z.imag, '.17g'))}
        if self.exact:
            out["exact"] = {"x": str(self.xs), "y": str(self.ys)}
        return out

    def __repr__(self):
        if self.at_infinity:
            return "HPoint(inf)"
        if self.exact:
            return f"HPoint({self.xs}, {self.ys})"
        return f"HPoint({self.z.real:.6g}+{self.z.imag:.6g}j)"


def boundary_apply(m: Mat2, x: Optional[object]):
    """Mobius action on the boundary R u {inf}; x=None means inf.

    Exact over Fractions/ints when the matrix is integral.
    """
    from fractions import Fraction
    a, b, c, d = m.entries()
    if not m.is_int:
        a, b, c, d = (sym(t) for t in (a, b, c, d))
        if x is None:
            return None if exact_eq(c, 0) else simplify_entry(a / c)
        xv = sym(x)
        den = c * xv + d
        if exact_eq(den, 0):
            return None
        return simplify_entry((a * xv + b) / den)
    if x is None:
        return None if c == 0 else Fraction(a, c)
    xv = Fraction(x)
    den = c * xv + d
    if den == 0:
        return None
    return (a * xv + b) / den


class Geodesic:
    """Complete geodesic: vertical line Re z = x0, or half-circle
    centered on the real axis.

    Parameters may be exact (sympy) or float; ``exact`` reflects that.
    """

    __slots__ = ("kind", "p1", "p2", "exact")

    def __init__(self, kind: str, p1, p2=None, exact: bool = False):
        if kind not in ("vertical", "circle"):
            raise ValueError(f"unknown geodesic kind {kind!r}")
        self.kind = kind
        self.exact = exact
        if exact:
            self.p1 = sym(p1)
            self.p2 = sym(p2) if kind == "circle" else None
        else:
            self.p1 = float(as_float(p1))
            self.p2 = float(as_float(p2)) if kind == "circle" else None

    @property
    def x0(self):
        if self.kind != "vertical":
            raise AttributeError("not a vertical geodesic")
        return self.p1

    @property
    def center(self):
        if self.kind != "circle":
            raise AttributeError("not a circle geodesic")
        return self.p1

    @property
    def radius(self):
        if self.kind != "circle":
            raise AttributeError("not a circle geodesic")
        return self.p2

    def contains(self, pt: HPoint, tol: float = 1e-9) -> bool:
        if pt.at_infinity:
            return self.kind == "vertical"
        if self.exact and pt.exact:
            if self.kind == "vertical":
                return exact_eq(pt.xs, self.p1)
            return exact_eq((pt.xs - self.p1) ** 2 + pt.ys ** 2, self.p2 ** 2)
        if self.kind == "vertical":
            return abs(pt.z.real - as_float(self.p1)) < tol
        c, r = as_float(self.p1), as_float(self.p2)
        return abs(abs(pt.z - c) - r) < tol

    def reflection(self) -> Motion:
        if self.kind == "vertical":
            return reflection_in_vertical(self.p1)
        return reflection_in_circle(self.p1, self.p2)

    def endpoints_on_boundary(self):
        """Ideal endpoints as (x0, inf) or (c-r, c+r); None means inf."""
        if self.kind == "vertical":
            return (self.p1, None)
        return (self.p1 - self.p2, self.p1 + self.p2)

    def point_at(self, t: float) -> HPoint:
        """Float sample; t in (0,1) sweeps the full geodesic.

        Vertical: y = tan(pi*t/2) style blow-up at both ends; circle:
        angle pi*(1-t).
        """
        if self.kind == "vertical":
            y = math.tan(math.pi * t / 2)
            return HPoint(complex(as_float(self.p1), max(y, 1e-12)))
        c, r = as_float(self.p1), as_float(self.p2)
        th = math.pi * (1 - t)
        return HPoint(complex(c + r * math.cos(th), max(r * math.sin(th), 1e-12)))

    def serialize(self) -> dict:
        if self.kind == "vertical":
            out = {"kind": "vertical", "x": as_float(self.p1)}
            if self.exact:
                out["exact"] = {"x": str(self.p1)}
            return out
        out = {"kind": "circle", "center": as_float(self.p1),
               "radius": as_float(self.p2)}
        if self.exact:
            out["exact"] = {"center": str(self.p1), "radius": str(self.p2)}
        return out

    def __repr__(self):
        if self.kind == "vertical":
            return f"Geodesic(vertical, x={self.p1})"
        return f"Geodesic(circle, c={self.p1}, r={self.p2})"


@dataclass
class GeodesicArc:
    """Closed sub-arc of a geodesic between two marked points.

    Endpoints may be interior points, boundary points (y = 0) or the
    cusp at infinity; sampling stays strictly inside and clips ideal
    ends at a finite hyperbolic margin.
    """

    geo: Geodesic
    start: HPoint
    end: HPoint
    label: str = ""

    def _param_of(self, pt: HPoint) -> float:
        if self.geo.kind == "vertical":
            if pt.at_infinity:
                return 1.0
            y = max(pt.z.imag, 1e-12)
            return 2 * math.atan(y) / math.pi
        c, _ = as_float(self.geo.p1), as_float(self.geo.p2)
        th = math.atan2(max(pt.z.imag, 0.0), pt.z.real - c)
        return 1 - th / math.pi

    def sample(self, n: int, margin: float = 0.02) -> list:
        """n interior float points, ideal ends clipped by ``margin``.

        margin is in the geodesic's own (0,1) parameter; each marked
        endpoint that is itself an ideal point gets pushed inside so
        every sample is a genuine interior point.
        """
        ends = sorted([(self._param_of(self.start), self.start.is_boundary()),
                       (self._param_of(self.end), self.end.is_boundary())])
        (t0, b0), (t1, b1) = ends
        span = t1 - t0
        if b0:
            t0 += margin * span
        if b1:
            t1 -= margin * span
        ts = [t0 + (t1 - t0) * (k + 0.5) / n for k in range(n)]
        return [self.geo.point_at(t) for t in ts]

    def serialize(self) -> dict:
        return {
            "label": self.label,
            "geodesic": self.geo.serialize(),
            "start": self.start.serialize(),
            "end": self.end.serialize(),
        }


def reflection_in_vertical(x0) -> Motion:
    """Reflection across Re z = x0: z -> 2*x0 - conj(z)."""
    if isinstance(x0, int):
        return Motion(Mat2(-1, 2 * x0, 0, 1), reverses=True)
    x0 = sym(x0)
    return Motion(Mat2(-1, 2 * x0, 0, 1), reverses=True)


def reflection_in_circle(c, r) -> Motion:
    """Inversion in the circle |z - c| = r (center real)."""
    if isinstance(c, int) and isinstance(r, int):
        return Motion(Mat2(c, r * r - c * c, 1, -c), reverses=True)
    c, r = sym(c), sym(r)
    return Motion(Mat2(c, r ** 2 - c ** 2, 1, -c), reverses=True)


def geodesic_through_boundary(u, v, exact: bool = False) -> Geodesic:
    """Geodesic with ideal endpoints u, v; None stands for infinity."""
    if u is None and v is None:
        raise ValueError("need at least one finite endpoint")
    if u is None or v is None:
        fin = v if u is None else u
        return Geodesic("vertical", fin, exact=exact)
    if exact:
        u, v = sym(u), sym(v)
        if exact_eq(u, v):
            raise ValueError("coincident endpoints")
        c = simplify_entry((u + v) / 2)
        if exact_sign(u - v) < 0:
            u, v = v, u
        r = simplify_entry((u - v) / 2)
        return Geodesic("circle", c, r, exact=True)
    u, v = as_float(u), as_float(v)
    if u == v:
        raise ValueError("coincident endpoints")
    return Geodesic("circle", (u + v) / 2, abs(u - v) / 2)


def geodesic_through_points(z1: complex, z2: complex) -> Geodesic:
    """Float geodesic through two interior points."""
    x1, y1 = z1.real, z1.imag
    x2, y2 = z2.real, z2.imag
    if abs(x1 - x2) < 1e-13:
        return Geodesic("vertical", (x1 + x2) / 2)
    # center from equal-distance condition on the real axis
    c = (x2 * x2 + y2 * y2 - x1 * x1 - y1 * y1) / (2 * (x2 - x1))
    r = math.hypot(x1 - c, y1)
    return Geodesic("circle", c, r)


def hyperbolic_dist(z: complex, w: complex) -> float:
    if z.imag <= 0 or w.imag <= 0:
        raise ValueError("points must be interior")
    q = abs(z - w) ** 2 / (2 * z.imag * w.imag)
    return math.acosh(1 + q)


# -- disc model bridge ------------------------------------------------------
#
# The projective disc coordinates (x, y) with x^2 + y^2 < 1 map to the
# conformal disc by q -> q/(1 + sqrt(1 - |q|^2)), then to the upper
# half-plane by the Cayley-type map w -> (w + i)/(iw + 1), which sends
# the disc center to i and the boundary point (0,1) to infinity.


def klein_point_to_halfplane(x: float, y: float) -> complex:
    n2 = x * x + y * y
    if n2 >= 1:
        raise ValueError("point outside the projective disc")
    s = 1 + math.sqrt(1 - n2)
    w = complex(x / s, y / s)
    num = w + 1j
    den = 1j * w + 1
    return num / den


def klein_boundary_to_halfplane(x: float, y: float) -> Optional[float]:
    """Boundary circle point to R u {inf} (None is inf).

    On |q| = 1 the conformal and projective coordinates agree and the
    Cayley image of (x, y) is (1 + y)/x = x/(1 - y).
    """
    n2 = x * x + y * y
    if abs(n2 - 1) > 1e-9:
        raise ValueError("not on the boundary circle")
    if abs(x) < 1e-14:
        return None if y > 0 else 0.0
    return (1 + y) / x


def klein_line_to_geodesic(nx: float, ny: float, rhs: float) -> Geodesic:
    """Chord nx*x + ny*y = rhs of the projective disc, as a geodesic.

    The chord's two boundary intersections are pushed through the
    boundary map; chords through (0,1) give vertical lines.
    """
    n = math.hypot(nx, ny)
    if n == 0:
        raise ValueError("degenerate line")
    d = rhs / n
    if abs(d) >= 1:
        raise ValueError("chord misses the disc")
    ux, uy = nx / n, ny / n
    h = math.sqrt(1 - d * d)
    # boundary points: d*(ux,uy) +- h*(-uy, ux)
    pts = [(d * ux - h * uy, d * uy + h * ux),
           (d * ux + h * uy, d * uy - h * ux)]
    ends = [klein_boundary_to_halfplane(px, py) for px, py in pts]
    return geodesic_through_boundary(ends[0], ends[1])
