"""Fixed-point sets of z -> -conj(z) on congruence quotients.

Two independent routes to the same geometry:

* exact constructions: for a prime level the fixed set closes into one
  circuit built from the imaginary axis, a vertical ray and a low arc;
  for a product of two odd primes one more circuit appears, threaded
  through the two remaining cusps by five arcs glued with explicit
  group elements.

* a chamber complex: the half-tile tessellation (index-two refinement
  of the modular tiling) has all its reflection walls on tile edges,
  so blocked-edge bookkeeping over the coset table recovers both the
  fixed set and the components of its complement with no geometry at
  all.  This is the oracle the exact constructions are tested against.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

import numpy as np
import sympy as sp

from .congruence import (
    CosetTable, alpha, in_gamma0, cusps_of_level, cusp_equiv, ROT_RHO,
)
from .geometry import (
    Geodesic, GeodesicArc, HPoint, Mat2, Motion, IDENTITY, S_MAT, T_MAT,
    mat_hat, boundary_apply, geodesic_through_boundary,
)

__all__ = [
    "sym_rep",
    "corner_point",
    "corner_equiv",
    "FixedArc",
    "CornerJoint",
    "FixedSet",
    "fixed_set_prime",
    "fixed_set_semiprime",
    "GeodesicPair",
    "geodesic_realization_prime",
    "geodesic_realization_semiprime",
    "inverse_symmetric",
    "is_fix_separating_prime",
    "separation_census",
    "HalfTileGraph",
    "np_count_bruteforce",
    "np_count_expansion",
    "kloosterman_sum",
    "weil_gap_report",
]

RHO = HPoint.exact_point(sp.Rational(1, 2), sp.sqrt(3) / 2)
RHO_MIRROR = HPoint.exact_point(sp.Rational(-1, 2), sp.sqrt(3) / 2)
CORNER_I = HPoint.exact_point(0, 1)
ALPHA_NEG1 = Mat2(0, -1, 1, 1)


def sym_rep(a: int, m: int) -> int:
    """Representative of a mod m in (-m/2, m/2]; symmetric for odd m."""
    r = a % m
    if r > m // 2:
        r -= m
    return r


def corner_point(l: int) -> HPoint:
    """Image of the left tile corner under alpha(l); exact coordinates.

    x = (2l+1) / (2(l^2+l+1)),  y = sqrt(3) / (2(l^2+l+1)).
    """
    D = l * l + l + 1
    return HPoint.exact_point(
        sp.Rational(2 * l + 1, 2 * D), sp.sqrt(3) / (2 * D))


def corner_equiv(p: int, u: int, v: int) -> Optional[Mat2]:
    """Group element of level p sending corner u to corner v, if any.

    Candidates are alpha(v) * r^eta * alpha(u)^-1 with r the order-3
    rotation about the corner template point; this enumerates every
    modular-group element doing the job.
    """
    au_inv = alpha(u).inverse()
    cand = alpha(v)
    for _ in range(3):
        m = cand @ au_inv
        if m.c % p == 0:
            return m.canonical()
        cand = cand @ ALPHA_NEG1
    return None


# -- exact fixed sets ---------------------------------------------------------

@dataclass
class FixedArc:
    """One geodesic arc of the fixed set with its pointwise witness.

    ``witness`` w satisfies w(-conj(z)) = z for every z on the arc;
    ``seed`` maps the template edge (axis ray, vertical ray, or unit
    arc) onto the arc.  Cusp fields mark ideal endpoints.
    """

    label: str
    geo: Geodesic
    start: HPoint
    end: HPoint
    witness: Mat2
    seed: Mat2
    template: str
    start_cusp: object = None  # Fraction, "inf", or None
    end_cusp: object = None

    def sample(self, n: int, margin: float = 0.04) -> List[HPoint]:
        return GeodesicArc(self.geo, self.start, self.end).sample(n, margin)

    def serialize(self) -> dict:
        out = {
            "label": self.label,
            "geodesic": self.geo.serialize(),
            "start": self.start.serialize(),
            "end": self.end.serialize(),
            "witness": list(self.witness.entries()),
            "template": self.template,
        }
        if self.start_cusp is not None:
            out["start"]["cusp"] = str(self.start_cusp)
        if self.end_cusp is not None:
            out["end"]["cusp"] = str(self.end_cusp)
        return out


@dataclass
class CornerJoint:
    """Identification of two arc endpoints by a group element."""

    arc_from: str
    end_from: str  # "start" | "end"
    arc_to: str
    end_to: str
    witness: Mat2

    def serialize(self) -> dict:
        return {
            "from": [self.arc_from, self.end_from],
            "to": [self.arc_to, self.end_to],
            "witness": list(self.witness.entries()),
        }


@dataclass
class FixedSet:
    level: int
    arcs: List[FixedArc]
    joints: List[CornerJoint]
    circles: List[List[str]]
    cusps_on_set: List[object] = field(default_factory=list)
    separating: Optional[bool] = None
    params: Dict[str, int] = field(default_factory=dict)
    extras: Dict[str, Mat2] = field(default_factory=dict)

    def arc(self, label: str) -> FixedArc:
        for a in self.arcs:
            if a.label == label:
                return a
        raise KeyError(label)

    def _arcs_meet(self, a: FixedArc, b: FixedArc) -> bool:
        for ea in ("start", "end"):
            for eb in ("start", "end"):
                pa, pb = getattr(a, ea), getattr(b, eb)
                if pa.at_infinity or pb.at_infinity:
                    if pa.at_infinity and pb.at_infinity:
                        return True
                    continue
                if pa.same_point(pb, tol=1e-9):
                    return True
        return any({j.arc_from, j.arc_to} == {a.label, b.label}
                   for j in self.joints)

    def validate(self, samples: int = 25, tol: float = 1e-9) -> None:
        """Internal consistency: witnesses in the group, pointwise
        fixing on samples, joints matching endpoints exactly, every
        listed circle actually closing up."""
        for a in self.arcs:
            if not in_gamma0(a.witness.canonical(), self.level) and \
               not in_gamma0((-a.witness).canonical(), self.level):
                raise AssertionError(f"witness of {a.label} not in group")
            w = Motion(a.witness)
            for pt in a.sample(samples):
                mirror = complex(-pt.z.real, pt.z.imag)
                img = w.apply_complex(mirror)
                if abs(img - pt.z) > tol * (1 + abs(pt.z)):
                    raise AssertionError(
                        f"{a.label}: witness fails at {pt.z}: {img}")
        for j in self.joints:
            if not in_gamma0(j.witness, self.level) and \
               not in_gamma0(-j.witness, self.level):
                raise AssertionError(f"joint witness {j} not in group")
            src = getattr(self.arc(j.arc_from), j.end_from)
            dst = getattr(self.arc(j.arc_to), j.end_to)
            img = Motion(j.witness).apply(src)
            if not img.same_point(dst, tol=1e-9):
                raise AssertionError(
                    f"joint {j.arc_from}->{j.arc_to}: {img.z} vs {dst.z}")
        listed = sorted(lbl for circ in self.circles for lbl in circ)
        if listed != sorted(a.label for a in self.arcs):
            raise AssertionError("circles do not partition the arcs")
        for circ in self.circles:
            arcs = [self.arc(lbl) for lbl in circ]
            for idx in range(len(arcs)):
                nxt = arcs[(idx + 1) % len(arcs)]
                if not self._arcs_meet(arcs[idx], nxt):
                    raise AssertionError(
                        f"circle break {arcs[idx].label} / {nxt.label}")

    def serialize(self) -> dict:
        return {
            "level": self.level,
            "arcs": [a.serialize() for a in self.arcs],
            "gluings": [j.serialize() for j in self.joints],
            "cusps_on_set": [str(c) for c in self.cusps_on_set],
            "components": self.circles,
            "separating": self.separating,
            "params": dict(self.params),
            "extras": {k: list(m.entries()) for k, m in self.extras.items()},
        }


def _axis_arc(label: str = "axis") -> FixedArc:
    return FixedArc(
        label=label,
        geo=Geodesic("vertical", 0, exact=True),
        start=HPoint.exact_point(0, 0),
        end=HPoint.infinity(),
        witness=IDENTITY,
        seed=IDENTITY,
        template="axis",
        start_cusp=Fraction(0),
        end_cusp="inf",
    )


def _vertical_and_low_arc(N: int) -> Tuple[FixedArc, FixedArc, CornerJoint]:
    """The vertical ray and the low arc shared by all odd levels.

    The vertical part runs from the corner above 1/2 out to the cusp
    at infinity; the low arc runs from the cusp 0 up the geodesic with
    feet 0 and 2/N to the corner of the last tile; a corner
    identification closes them into a circuit with the axis' cusps.
    """
    L = (N - 1) // 2
    vert = FixedArc(
        label="vertical",
        geo=Geodesic("vertical", sp.Rational(1, 2), exact=True),
        start=corner_point(1),
        end=HPoint.infinity(),
        witness=T_MAT,
        seed=IDENTITY,
        template="vertical",
        end_cusp="inf",
    )
    low = FixedArc(
        label="low-arc",
        geo=Geodesic("circle", sp.Rational(1, N), sp.Rational(1, N), exact=True),
        start=HPoint.exact_point(0, 0),
        end=corner_point(L),
        witness=Mat2(1, 0, N, 1),
        seed=alpha(L) @ T_MAT.inverse(),
        template="vertical",
        start_cusp=Fraction(0),
    )
    w = corner_equiv(N, L, 1)
    if w is None:
        raise AssertionError(f"no corner identification at level {N}")
    joint = CornerJoint("low-arc", "end", "vertical", "start", w)
    return vert, low, joint


def fixed_set_prime(p: int) -> FixedSet:
    """Fixed set on the level-p quotient, p an odd prime: one circuit
    through both cusps (axis; vertical ray; low arc)."""
    if p < 3 or not sp.isprime(p):
        raise ValueError("odd prime level required")
    axis = _axis_arc()
    vert, low, joint = _vertical_and_low_arc(p)
    fs = FixedSet(
        level=p,
        arcs=[axis, vert, low],
        joints=[joint],
        circles=[["axis", "vertical", "low-arc"]],
        cusps_on_set=[Fraction(0), "inf"],
        separating=is_fix_separating_prime(p),
        params={"p": p, "last_tile": (p - 1) // 2},
    )
    return fs


def _corner_witness(N: int, m_from: Mat2, turn: Mat2, m_to: Mat2,
                    end_from, end_to) -> Mat2:
    """Group element carrying one corner of the five-arc circuit to the
    matching corner on the bridging arc.

    Both corners are order-3 tile corners, so the witness lives in
    the 3-element coset ``m_to @ turn @ stab @ m_from^{-1}`` with stab
    the corner rotation.  Membership alone can be ambiguous when the
    quotient has elliptic points, so the geodesic through the source
    arc is required to land on the bridging geodesic: the cusp end of
    the source must go to ``end_to`` and the other foot to ``end_from``.
    """
    stab = (IDENTITY, alpha(1), alpha(1).inverse())
    for g in stab:
        w = (m_to @ turn @ g @ m_from.inverse()).canonical()
        if not in_gamma0(w, N):
            continue
        if boundary_apply(w, boundary_apply(m_from, None)) != end_to:
            continue
        if boundary_apply(w, boundary_apply(m_from, Fraction(1, 2))) != end_from:
            continue
        return w
    raise AssertionError(f"no corner witness at level {N}")


def fixed_set_semiprime(p: int, q: int) -> FixedSet:
    """Fixed set at level pq (odd primes, p < q): two circuits.

    Circuit 1, as at a prime level with the longer tile range: axis
    through cusps 0 and infinity, vertical ray, low arc, closed by a
    corner witness.  Circuit 2: five arcs through the two remaining
    cusps 1/p and 1/q, glued at corners by the elements X, Y, Z kept
    in extras.
    """
    if not (sp.isprime(p) and sp.isprime(q)) or p == q or p == 2 or q == 2:
        raise ValueError("need distinct odd primes")
    if p > q:
        p, q = q, p
    N = p * q
    axis = _axis_arc()
    vert, low, joint_c1 = _vertical_and_low_arc(N)

    pstar = sym_rep(pow(p, -1, q), q)
    qstar = (1 - p * pstar) // q
    assert p * pstar + q * qstar == 1
    j1 = sym_rep(pstar + (q + 1) // 2, q)
    k1 = sym_rep(qstar + (p + 1) // 2, p)
    lstar = sym_rep(int(sp.ntheory.modular.crt([p, q], [1, -1])[0]), N)
    assert lstar * lstar % N == 1 and lstar % p == 1 and lstar % q == q - 1

    m1 = alpha(p) @ alpha(pstar)
    m2 = alpha(q) @ alpha(qstar)
    m3 = alpha(q) @ alpha(k1)
    m4 = alpha(lstar)
    m5 = alpha(p) @ alpha(j1)

    i_pt = HPoint.exact_point(0, 1)

    def axis_image_arc(label, m, corner_end):
        u = boundary_apply(m, 0)
        v = boundary_apply(m, None)
        geo = geodesic_through_boundary(
            sp.Rational(u.numerator, u.denominator),
            sp.Rational(v.numerator, v.denominator), exact=True)
        corner = Motion(m).apply(i_pt)
        cusp = Fraction(v)
        cusp_pt = HPoint.exact_point(sp.Rational(v.numerator, v.denominator), 0)
        wit = (m @ mat_hat(m).inverse()).canonical()
        if corner_end == "end":
            return FixedArc(label, geo, cusp_pt, corner, wit, m, "axis",
                            start_cusp=cusp)
        return FixedArc(label, geo, corner, cusp_pt, wit, m, "axis",
                        end_cusp=cusp)

    def vertical_image_arc(label, m):
        u = boundary_apply(m, Fraction(1, 2))
        v = boundary_apply(m, None)
        geo = geodesic_through_boundary(
            sp.Rational(u.numerator, u.denominator),
            sp.Rational(v.numerator, v.denominator), exact=True)
        corner = Motion(m).apply(RHO)
        cusp = Fraction(v)
        cusp_pt = HPoint.exact_point(sp.Rational(v.numerator, v.denominator), 0)
        wit = (m @ T_MAT @ mat_hat(m).inverse()).canonical()
        return FixedArc(label, geo, cusp_pt, corner, wit, m, "vertical",
                        start_cusp=cusp)

    b1 = axis_image_arc("bridge-p", m1, "end")
    b2 = axis_image_arc("bridge-q", m2, "start")
    b3 = vertical_image_arc("ray-q", m3)
    b5 = vertical_image_arc("ray-p", m5)

    end_plus = Fraction(1, lstar + 1)   # image of -1 under the bridge seed
    end_minus = Fraction(1, lstar - 1)  # image of +1
    b4 = FixedArc(
        label="middle-arc",
        geo=geodesic_through_boundary(
            sp.Rational(1, lstar + 1), sp.Rational(1, lstar - 1), exact=True),
        start=Motion(m4).apply(RHO_MIRROR),
        end=Motion(m4).apply(RHO),
        witness=(m4 @ S_MAT.inverse() @ mat_hat(m4).inverse()).canonical(),
        seed=m4,
        template="arc",
    )

    X = (m1 @ S_MAT @ m2.inverse()).canonical()
    closed_form = Mat2(q - p * pstar * pstar, -(1 + pstar * qstar),
                       N * (1 + pstar * qstar), q * qstar * qstar - p)
    assert X == closed_form.canonical()
    # Y glues the ray from 1/p, sending its cusp foot to 1/(l*-1);
    # Z glues the ray from 1/q, sending its cusp foot to 1/(l*+1).
    Y = _corner_witness(N, m5, IDENTITY, m4, end_plus, end_minus)
    Z = _corner_witness(N, m3, T_MAT.inverse(), m4, end_minus, end_plus)

    joints = [
        joint_c1,
        CornerJoint("bridge-q", "start", "bridge-p", "end", X),
        CornerJoint("ray-q", "end", "middle-arc", "start", Z),
        CornerJoint("ray-p", "end", "middle-arc", "end", Y),
    ]
    fs = FixedSet(
        level=N,
        arcs=[axis, vert, low, b1, b2, b3, b4, b5],
        joints=joints,
        circles=[
            ["axis", "vertical", "low-arc"],
            ["bridge-p", "bridge-q", "ray-q", "middle-arc", "ray-p"],
        ],
        cusps_on_set=[Fraction(0), "inf", Fraction(1, p), Fraction(1, q)],
        separating=HalfTileGraph.build(N).separates(),
        params={"p": p, "q": q, "pstar": pstar, "qstar": qstar,
                "j1": j1, "k1": k1, "lstar": lstar},
        extras={"X": X, "Y": Y, "Z": Z,
                "m1": m1, "m2": m2, "m3": m3, "m4": m4, "m5": m5},
    )
    return fs


@dataclass
class GeodesicPair:
    """Two complete geodesics whose ideal feet are pairwise identified
    by group elements; realizes one circuit of a fixed set."""

    level: int
    geos: Tuple[Geodesic, Geodesic]
    ends: Tuple[Tuple[object, object], Tuple[object, object]]
    pairings: List[Tuple[object, object, Mat2]]

    def validate(self) -> None:
        for x1, x2, w in self.pairings:
            if not in_gamma0(w, self.level):
                raise AssertionError(f"pairing witness {w} not in group")
            if boundary_apply(w, x1) != x2:
                raise AssertionError(f"pairing {x1} -> {x2} fails under {w}")
        a, b = (sorted(e for e in pair if e is not None) for pair in self.ends)
        if len(a) == 2 and len(b) == 2:
            inside = (a[0] < b[0] < a[1]) + (a[0] < b[1] < a[1])
            if inside == 1:
                raise AssertionError("realization geodesics cross")

    def serialize(self) -> dict:
        def name(x):
            return "inf" if x is None else str(x)
        return {
            "level": self.level,
            "geodesics": [g.serialize() for g in self.geos],
            "endpoints": [[name(e) for e in pair] for pair in self.ends],
            "pairings": [{"from": name(x1), "to": name(x2),
                          "witness": list(w.entries())}
                         for x1, x2, w in self.pairings],
        }


def geodesic_realization_prime(N: int) -> GeodesicPair:
    """The single circuit at an odd level, unrolled: the axis and the
    line above 1/2, with 0 glued to 1/2 and infinity to itself."""
    if N < 3 or N % 2 == 0:
        raise ValueError("odd level >= 3 required")
    L = (N - 1) // 2
    w = Mat2(L, -1, N, -2)  # det = N - 2L = 1; carries 0 to 1/2
    assert in_gamma0(w, N)
    pair = GeodesicPair(
        level=N,
        geos=(Geodesic("vertical", 0, exact=True),
              Geodesic("vertical", sp.Rational(1, 2), exact=True)),
        ends=((Fraction(0), None), (Fraction(1, 2), None)),
        pairings=[(Fraction(0), Fraction(1, 2), w),
                  (None, None, IDENTITY)],
    )
    return pair


def geodesic_realization_semiprime(p: int, q: int) -> GeodesicPair:
    """The five-arc circuit at level pq, unrolled onto two complete
    geodesics with rational feet and pairwise identified endpoints.

    The first geodesic carries the two arcs through the corner over
    1/q's tile (feet 1/q and q*/(q q* - 1)); the second carries the
    remaining three (feet 1/(l*+1) and 1/(l*-1)).  The witnesses glue
    foot to foot: Z on the cusp side, Y X on the far side.
    """
    fs = fixed_set_semiprime(p, q)
    par = fs.params
    q_, qstar, lstar = par["q"], par["qstar"], par["lstar"]
    far = Fraction(qstar, q_ * qstar - 1)
    e1 = (far, Fraction(1, q_))
    e2 = (Fraction(1, lstar + 1), Fraction(1, lstar - 1))
    YX = (fs.extras["Y"] @ fs.extras["X"]).canonical()
    pair = GeodesicPair(
        level=fs.level,
        geos=(geodesic_through_boundary(
                  sp.Rational(far.numerator, far.denominator),
                  sp.Rational(1, q_), exact=True),
              geodesic_through_boundary(
                  sp.Rational(1, lstar + 1), sp.Rational(1, lstar - 1),
                  exact=True)),
        ends=(e1, e2),
        pairings=[(Fraction(1, q_), Fraction(1, lstar + 1), fs.extras["Z"]),
                  (far, Fraction(1, lstar - 1), YX)],
    )
    return pair


# -- separation ---------------------------------------------------------------

def inverse_symmetric(p: int, l: int) -> int:
    return sym_rep(pow(l, -1, p), p)


def is_fix_separating_prime(p: int) -> bool:
    """Does the fixed set disconnect the level-p quotient?

    The complement has two mirror halves joined only by the outer-arc
    gluings pairing tile u with tile -u^{-1}; a crossing exists iff
    some u in [2, (p-1)/2] has its inverse representative in the same
    window.
    """
    if p == 2:
        return True
    L = (p - 1) // 2
    return not any(2 <= inverse_symmetric(p, l) <= L for l in range(2, L + 1))


# -- half-tile chamber graph --------------------------------------------------

class _DSU:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb

    def groups(self) -> Dict[int, List[int]]:
        out: Dict[int, List[int]] = {}
        for i in range(len(self.parent)):
            out.setdefault(self.find(i), []).append(i)
        return out


@dataclass
class HalfTileGraph:
    """Chamber complex of half tiles over the level-N coset table.

    Every reflection wall of the ambient extended group lies on a
    half-tile edge, so the fixed set is a union of closed edges and
    the complement's components are components of the unblocked
    adjacency graph on chambers (coset, side).
    """

    N: int
    table: CosetTable
    axis_blocked: List[bool]
    vert_blocked: List[bool]
    arc_blocked: List[bool]
    t_next: List[int]
    s_next: List[int]
    a_next: List[int]

    @classmethod
    def build(cls, N: int) -> "HalfTileGraph":
        table = CosetTable.generic(N)
        n = len(table)
        tinv = T_MAT.inverse()
        axis_b, vert_b, arc_b = [], [], []
        t_next, s_next, a_next = [], [], []
        for g in table.reps:
            gh = mat_hat(g)
            gi = g.inverse()
            axis_b.append(in_gamma0((gh @ gi).canonical(), N))
            vert_b.append(in_gamma0((gh @ tinv @ gi).canonical(), N))
            arc_b.append(in_gamma0((gh @ S_MAT @ gi).canonical(), N))
            t_next.append(table.coset_of(g @ T_MAT))
            s_next.append(table.coset_of(g @ S_MAT))
            a_next.append(table.coset_of(g @ ROT_RHO))
        return cls(N, table, axis_b, vert_b, arc_b, t_next, s_next, a_next)

    def complement_components(self) -> Tuple[int, List[int]]:
        """Components of (surface minus fixed set) via chamber gluing.

        Chamber (i, +) is node 2i, (i, -) is node 2i+1.  Unblocked
        edges merge chambers; the returned labels map each node to a
        component id.
        """
        n = len(self.table)
        dsu = _DSU(2 * n)
        for i in range(n):
            if not self.axis_blocked[i]:
                dsu.union(2 * i, 2 * i + 1)
            if not self.vert_blocked[i]:
                dsu.union(2 * i, 2 * self.t_next[i] + 1)
            if not self.arc_blocked[i]:
                dsu.union(2 * i, 2 * self.s_next[i] + 1)
        groups = dsu.groups()
        roots = sorted(groups)
        labels = [0] * (2 * n)
        for lab, r in enumerate(roots):
            for x in groups[r]:
                labels[x] = lab
        return len(roots), labels

    def separates(self) -> bool:
        return self.complement_components()[0] >= 2

    def fixed_edge_count(self) -> int:
        return sum(self.axis_blocked) + sum(self.vert_blocked) + sum(self.arc_blocked)

    def _cusp_class(self, i: int) -> int:
        reps = cusps_of_level(self.N)
        x = boundary_apply(self.table.reps[i], None)
        for k, r in enumerate(reps):
            if cusp_equiv(self.N, x, r):
                return k
        raise AssertionError("cusp class not found")

    def fixed_circles(self) -> int:
        """Number of closed curves in the fixed set (compactified).

        Vertices of the blocked-edge complex are corner classes (the
        order-2 and order-3 template corners, merged along their
        modular stabilizers) and cusp classes; circles are connected
        components.  Every vertex must have even degree.
        """
        n = len(self.table)
        vid: Dict[object, int] = {}

        def vert(key) -> int:
            if key not in vid:
                vid[key] = len(vid)
            return vid[key]

        def i_class(i: int):
            return ("i", frozenset((i, self.s_next[i])))

        def rho_class(i: int):
            j = self.a_next[i]
            k = self.a_next[j]
            return ("rho", frozenset((i, j, k)))

        cusp_cache: Dict[int, int] = {}

        def cusp_class(i: int):
            if i not in cusp_cache:
                cusp_cache[i] = self._cusp_class(i)
            return ("cusp", cusp_cache[i])

        edges = []
        for i in range(n):
            if self.axis_blocked[i]:
                edges.append((vert(i_class(i)), vert(cusp_class(i))))
            if self.vert_blocked[i]:
                edges.append((vert(rho_class(i)), vert(cusp_class(i))))
            if self.arc_blocked[i]:
                edges.append((vert(i_class(i)), vert(rho_class(i))))
        deg: Dict[int, int] = {}
        for a, b in edges:
            deg[a] = deg.get(a, 0) + 1
            deg[b] = deg.get(b, 0) + 1
        for v, d in deg.items():
            if d % 2 != 0:
                raise AssertionError(f"odd degree {d} in fixed-edge complex")
        dsu = _DSU(len(vid))
        for a, b in edges:
            dsu.union(a, b)
        touched = {dsu.find(a) for a, b in edges} | {dsu.find(b) for a, b in edges}
        return len(touched)


def separation_census(pmax: int = 100) -> Dict[int, bool]:
    """Separating flag for every prime level up to pmax, dual route.

    The window criterion and the chamber-graph component count must
    agree; disagreement raises.
    """
    out: Dict[int, bool] = {}
    for p in sp.primerange(2, pmax + 1):
        flag = is_fix_separating_prime(int(p))
        graph_flag = HalfTileGraph.build(int(p)).separates()
        if flag != graph_flag:
            raise AssertionError(f"separation routes disagree at p={p}")
        out[int(p)] = flag
    return out


# -- inversion counts and exponential sums ------------------------------------

def np_count_bruteforce(p: int, K1: int, K2: int) -> int:
    """#{k in [1,K1] : least positive inverse of k mod p lies in [1,K2]}."""
    if not (1 <= K1 < p and 1 <= K2 < p):
        raise ValueError("windows must sit inside [1, p-1]")
    return sum(1 for k in range(1, K1 + 1) if pow(k, -1, p) <= K2)


def kloosterman_sum(a: int, b: int, p: int) -> complex:
    tot = 0j
    for x in range(1, p):
        xinv = pow(x, -1, p)
        tot += cmath.exp(2j * cmath.pi * ((a * x + b * xinv) % p) / p)
    return tot


@lru_cache(maxsize=8)
def _kloosterman_matrix(p: int) -> np.ndarray:
    """S[a-1, b-1] = Kloosterman sum S(a, b; p), dense, via one matmul."""
    xs = np.arange(1, p)
    inv = np.array([pow(int(x), -1, p) for x in xs])
    a = np.arange(1, p)
    EA = np.exp(2j * np.pi * np.outer(a, xs) / p)
    EB = np.exp(2j * np.pi * np.outer(a, inv) / p)
    return EA @ EB.T


def _f_vector(p: int, K: int) -> np.ndarray:
    """F[a-1] = sum_{s=1..K} e(as/p) for a = 1..p-1."""
    a = np.arange(1, p)
    s = np.arange(1, K + 1)
    return np.exp(2j * np.pi * np.outer(a, s) / p).sum(axis=1)


def np_count_expansion(p: int, K1: int, K2: int) -> float:
    """The inversion count via its exponential-sum expansion.

    Main term (p-1) K1 K2 / p^2, two linear boundary terms, and a
    bilinear term weighted by Kloosterman sums.
    """
    if not (1 <= K1 < p and 1 <= K2 < p):
        raise ValueError("windows must sit inside [1, p-1]")
    F1 = _f_vector(p, K1)
    F2 = _f_vector(p, K2)
    S = _kloosterman_matrix(p)
    main = (p - 1) * K1 * K2 / p**2
    linear = -(K1 * F2.sum() + K2 * F1.sum()) / p**2
    bilinear = (np.conj(F1) @ S @ np.conj(F2)) / p**2
    total = main + linear + bilinear
    if abs(total.imag) > 1e-6:
        raise AssertionError("expansion should be real")
    return float(total.real)


def weil_gap_report(pmin: int = 100, pmax: int = 3000) -> List[dict]:
    """Centered half-window counts against the square-root bound.

    For each prime, compare N(L, L) - (p+1)(p-1)^2 / (4 p^2) with
    (32/pi^2) sqrt(p) (log p + 1)^2; the bound must hold.
    """
    rows = []
    for p in sp.primerange(pmin, pmax + 1):
        p = int(p)
        L = (p - 1) // 2
        count = np_count_bruteforce(p, L, L)
        center = (p + 1) * (p - 1) ** 2 / (4 * p**2)
        gap = abs(count - center)
        bound = (32 / math.pi**2) * math.sqrt(p) * (math.log(p) + 1) ** 2
        rows.append({
            "p": p, "count": count, "center": center,
            "gap": gap, "bound": bound, "ok": gap <= bound,
        })
    return rows
