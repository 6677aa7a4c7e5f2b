"""Congruence subgroups of the modular group and their combinatorics.

Levels are handled three ways: structured coset representatives for a
prime level and for a product of two distinct odd primes (these carry
the geometry used by the fixed-set construction), and generic
representatives indexed by the projective line mod N for everything
else and for cross-checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

import sympy as sp

from .geometry import (
    HPoint, Mat2, Motion, IDENTITY, S_MAT, T_MAT, SIGMA,
    mat_hat, boundary_apply,
)

__all__ = [
    "alpha",
    "in_gamma0",
    "reduce_to_fundamental_domain",
    "point_equiv",
    "sigma_fixed_witness",
    "CosetTable",
    "p1_points",
    "p1_normalize",
    "cusps_of_level",
    "cusp_width",
    "cusp_equiv",
    "cusp_sigma_fixed",
    "cusp_sigma_witness",
    "symmetric_domain_exists",
    "sigma_paired_coset_count",
    "ELLIPTIC_I", "ELLIPTIC_RHO", "ROT_RHO",
]

MAX_REDUCE_ITERS = 10_000
TOL = 1e-10

# order-3 rotation about the right corner of the fundamental domain
ROT_RHO = Mat2(1, -1, 1, 0)
ELLIPTIC_I = complex(0.0, 1.0)
ELLIPTIC_RHO = complex(0.5, math.sqrt(3) / 2)


def alpha(l: int) -> Mat2:
    """S T^(-l) = [[0,-1],[1,-l]]; bottom row (1, -l)."""
    return Mat2(0, -1, 1, -l)


def in_gamma0(m: Mat2, N: int) -> bool:
    """Membership in the level-N Hecke congruence subgroup (mod signs)."""
    if not m.is_int:
        return False
    d = m.det()
    if d == 1:
        return m.c % N == 0
    return False


def _is_in_F(z: complex, tol: float = TOL) -> bool:
    return abs(z.real) <= 0.5 + tol and abs(z) >= 1 - tol


def reduce_to_fundamental_domain(pt) -> Tuple[HPoint, Mat2]:
    """Translate/invert into |Re z| <= 1/2, |z| >= 1, canonically.

    Ties broken toward the right: Re z = -1/2 shifts to +1/2, and
    points on the unit circle with Re z < 0 invert to Re z > 0.  The
    reduction itself is float-guided; the accumulated word is an exact
    integer matrix, so an exact input yields an exact reduced point.

    Returns (reduced point, g) with g * input = reduced.
    """
    if isinstance(pt, complex):
        pt = HPoint(pt)
    if pt.at_infinity or pt.z.imag <= 0:
        raise ValueError("need an interior point")
    z = pt.z
    g = IDENTITY
    for _ in range(MAX_REDUCE_ITERS):
        k = round(z.real)
        if k != 0:
            z = complex(z.real - k, z.imag)
            g = Mat2(1, -k, 0, 1) @ g
        if abs(z) < 1 - TOL:
            z = -1 / z
            g = S_MAT @ g
        else:
            break
    else:
        raise RuntimeError("reduction did not terminate")
    if z.real < -0.5 + TOL and abs(z.real + 0.5) < TOL:
        z = complex(z.real + 1, z.imag)
        g = T_MAT @ g
    if abs(abs(z) - 1) < TOL and z.real < -TOL:
        z = -1 / z
        g = S_MAT @ g
    if pt.exact:
        out = Motion(g).apply(pt)
    else:
        out = HPoint(z)
    return out, g


def _stabilizer_candidates(z: complex) -> List[Mat2]:
    """Full-modular-group stabilizer of a reduced point (projective)."""
    cands = [IDENTITY]
    if abs(z - ELLIPTIC_I) < 1e-8:
        cands.append(S_MAT)
    if abs(z - ELLIPTIC_RHO) < 1e-8:
        cands.extend([ROT_RHO, ROT_RHO @ ROT_RHO])
    return cands


def point_equiv(pt1, pt2, N: int) -> Optional[Mat2]:
    """Witness g in the level-N group with g*pt1 = pt2, or None.

    Both points are reduced to the canonical domain; equivalence under
    the full modular group then leaves finitely many candidate words,
    each tested for the congruence condition.
    """
    if isinstance(pt1, complex):
        pt1 = HPoint(pt1)
    if isinstance(pt2, complex):
        pt2 = HPoint(pt2)
    r1, g1 = reduce_to_fundamental_domain(pt1)
    r2, g2 = reduce_to_fundamental_domain(pt2)
    if not r1.same_point(r2, tol=1e-8):
        return None
    g2_inv = g2.inverse()
    for s in _stabilizer_candidates(r1.z):
        w = g2_inv @ s @ g1
        if w.c % N == 0:
            img = Motion(w).apply_complex(pt1.z)
            if abs(img - pt2.z) < 1e-7 * (1 + abs(pt2.z)):
                return w
    return None


def sigma_fixed_witness(pt, N: int) -> Optional[Mat2]:
    """Witness that a point is fixed by z -> -conj(z) on the quotient."""
    if isinstance(pt, complex):
        pt = HPoint(pt)
    mirrored = HPoint(complex(-pt.z.real, pt.z.imag))
    return point_equiv(mirrored, pt, N)


# -- projective line and coset tables ---------------------------------------

def p1_normalize(N: int, c: int, d: int) -> Tuple[int, int]:
    """Canonical representative of (c:d) on the projective line mod N.

    Returns the lexicographic orbit minimum without scanning the unit
    group: the smallest first coordinate reachable is gcd(c, N), and the
    stabilizer of that coordinate is {1 + m*N/g}, so only g residues
    compete for the second slot.
    """
    c, d = c % N, d % N
    if math.gcd(math.gcd(c, d), N) != 1:
        raise ValueError(f"({c}:{d}) is not a projective point mod {N}")
    if N == 1:
        return (0, 0)
    if c == 0:
        return (0, 1)
    g = math.gcd(c, N)
    ng = N // g
    u = pow((c // g) % ng, -1, ng)
    # lift u to a unit mod N; some u + k*ng works for every prime of g
    while math.gcd(u, N) != 1:
        u += ng
    d1 = (u * d) % N
    if g == 1:
        return (1, d1)
    best = d1
    for m in range(1, g):
        v = 1 + m * ng
        if math.gcd(v, N) == 1:
            t = (v * d1) % N
            if t < best:
                best = t
    return (g, best)


@lru_cache(maxsize=None)
def p1_points(N: int) -> Tuple[Tuple[int, int], ...]:
    if N == 1:
        return ((0, 0),)
    # every canonical first coordinate divides N (c = N standing in for 0)
    seen = set()
    for c in sp.divisors(N):
        for d in range(N):
            if math.gcd(math.gcd(c % N, d), N) == 1:
                seen.add(p1_normalize(N, c, d))
    return tuple(sorted(seen))


def _lift_to_sl2(N: int, c: int, d: int) -> Mat2:
    """Integer matrix with determinant one and bottom row = (c, d) mod N."""
    c0, d0 = c % N, d % N
    if c0 == 0:
        c0 = N
    dd = d0
    # primes dividing both c0 and dd cannot divide N, so the
    # progression dd + k*N reaches a value coprime to c0
    while math.gcd(c0, dd) != 1:
        dd += N
    x, y, g = sp.gcdex(dd, -c0)
    assert g == 1
    m = Mat2(int(x), int(y), c0, dd)
    assert m.det() == 1
    return m


@dataclass
class CosetTable:
    """Right cosets of the level-N group inside the modular group.

    ``reps[i]`` is the representative of coset ``i``; ``index`` maps a
    normalized bottom row to the coset number.
    """

    N: int
    reps: List[Mat2]
    index: Dict[Tuple[int, int], int] = field(default_factory=dict)

    def __post_init__(self):
        if not self.index:
            for i, m in enumerate(self.reps):
                key = p1_normalize(self.N, m.c % self.N, m.d % self.N)
                if key in self.index:
                    raise ValueError(f"duplicate coset at rep {i}")
                self.index[key] = i
        expected = len(p1_points(self.N))
        if len(self.index) != expected:
            raise ValueError(
                f"{len(self.index)} cosets for level {self.N}, expected {expected}")

    @classmethod
    def generic(cls, N: int) -> "CosetTable":
        reps = [_lift_to_sl2(N, c, d) for c, d in p1_points(N)]
        return cls(N, reps)

    @classmethod
    def prime_level(cls, p: int) -> "CosetTable":
        """Identity plus the inversion-translation words alpha(l)."""
        if not sp.isprime(p):
            raise ValueError("prime level required")
        L = (p - 1) // 2
        reps = [IDENTITY] + [alpha(l) for l in range(-L, L + 1)]
        if p == 2:
            reps = [IDENTITY, alpha(0), alpha(1)]
        return cls(p, reps)

    @classmethod
    def semiprime_level(cls, p: int, q: int) -> "CosetTable":
        """Structured representatives for a product of two odd primes."""
        if not (sp.isprime(p) and sp.isprime(q)) or p == q or p % 2 == 0 or q % 2 == 0:
            raise ValueError("need two distinct odd primes")
        N = p * q
        reps = [IDENTITY]
        reps += [alpha(l) for l in range(-(N - 1) // 2, (N - 1) // 2 + 1)]
        reps += [alpha(p) @ alpha(j) for j in range(-(q - 1) // 2, (q - 1) // 2 + 1)]
        reps += [alpha(q) @ alpha(k) for k in range(-(p - 1) // 2, (p - 1) // 2 + 1)]
        return cls(N, reps)

    def coset_of(self, m: Mat2) -> int:
        return self.index[p1_normalize(self.N, m.c % self.N, m.d % self.N)]

    def __len__(self):
        return len(self.reps)


# -- cusps -------------------------------------------------------------------

def cusps_of_level(N: int) -> List[Optional[Fraction]]:
    """One representative per cusp class; None stands for infinity.

    Classes are indexed by divisors c of N and residues a modulo
    gcd(c, N/c) coprime to that gcd; the printed representative is a
    reduced fraction a'/c with a' = a mod the gcd.
    """
    out: List[Optional[Fraction]] = []
    for c in sorted(sp.divisors(N)):
        if c == N:
            out.append(None)
            continue
        if c == 1:
            out.append(Fraction(0, 1))
            continue
        g = math.gcd(c, N // c)
        for a in range(1, g + 1):
            if math.gcd(a, g) != 1:
                continue
            aa = a
            # lift within the residue class to something coprime to c
            while math.gcd(aa, c) != 1:
                aa += g
            out.append(Fraction(aa, c))
    return out


def cusp_width(N: int, cusp: Optional[Fraction]) -> int:
    c = N if cusp is None else Fraction(cusp).denominator
    return N // math.gcd(c * c, N)


def _scaling_matrix(cusp: Optional[Fraction]) -> Mat2:
    """Determinant-one integer matrix sending infinity to the cusp."""
    if cusp is None:
        return IDENTITY
    cusp = Fraction(cusp)
    a, c = cusp.numerator, cusp.denominator
    x, y, g = sp.gcdex(a, c)
    assert g == 1
    # a*x + c*y = 1  ->  det([[a, -y],[c, x]]) = a*x + c*y = 1
    return Mat2(a, -int(y), c, int(x))


def cusp_equiv(N: int, x1: Optional[Fraction], x2: Optional[Fraction]) -> bool:
    """Same cusp class at level N.

    With scaling matrices m_i (infinity -> x_i) the classes agree iff
    m2 T^j m1^{-1} lands in the group for some j, a single linear
    congruence in j.
    """
    m1, m2 = _scaling_matrix(x1), _scaling_matrix(x2)
    c1, d1 = m1.c, m1.d
    c2, d2 = m2.c, m2.d
    # bottom-left of m2 T^j m1^{-1} is (c2*d1 - d2*c1) - j*c2*c1
    rhs = (c2 * d1 - d2 * c1) % N
    coef = (c2 * c1) % N
    g = math.gcd(coef, N)
    return rhs % g == 0


def cusp_sigma_fixed(N: int, cusp: Optional[Fraction]) -> bool:
    """Does z -> -conj(z) fix this cusp class on the quotient?"""
    if cusp is None:
        return True
    return cusp_equiv(N, cusp, -Fraction(cusp))


def cusp_sigma_witness(N: int, cusp: Optional[Fraction]) -> Optional[Mat2]:
    """Explicit group element g with g(hat-image of scaling) = scaling.

    Searches g = hat(m) T^k m^{-1} over one width period; None if the
    cusp class is not symmetric.
    """
    m = _scaling_matrix(cusp)
    w = cusp_width(N, cusp)
    for k in range(w):
        cand = mat_hat(m) @ Mat2(1, k, 0, 1) @ m.inverse()
        if in_gamma0(cand, N):
            return cand
        cand = mat_hat(m) @ Mat2(-1, k, 0, -1) @ m.inverse()
        if in_gamma0(cand, N):
            return cand
    return None


# -- symmetric standard domains ----------------------------------------------

def sigma_paired_coset_count(N: int) -> int:
    """Number of cosets sent to themselves by the entry involution.

    The involution acts on bottom rows by (c:d) -> (-c:d); for odd N
    exactly two fixed cosets (identity and inversion) exist precisely
    in the prime-power case.
    """
    count = 0
    for c, d in p1_points(N):
        if p1_normalize(N, -c, d) == (c, d):
            count += 1
    return count


def symmetric_domain_exists(N: int) -> Tuple[bool, Optional[Mat2]]:
    """Can a connected one-tile-per-coset domain be mirror symmetric?

    For odd N this holds iff N is a prime power.  In the composite
    case the returned certificate is a matrix nu whose coset is fixed
    by the entry involution yet cannot be represented mirror-
    symmetrically: hat(nu) nu^{-1} lies in the group while nu avoids
    both the identity and the inversion cosets.
    """
    if N % 2 == 0:
        raise ValueError("odd level required")
    fac = sp.factorint(N)
    if len(fac) <= 1:
        return True, None
    p = min(fac)
    N1 = p ** fac[p]
    N2 = N // N1
    x, y, g = sp.gcdex(N2, -N1)
    assert g == 1
    a, b = int(x), int(y)  # a*N2 - b*N1 = 1
    nu = Mat2(a, b, N1, N2)
    assert nu.det() == 1
    cert = mat_hat(nu) @ nu.inverse()
    assert in_gamma0(cert, N)
    assert not in_gamma0(nu, N) and not in_gamma0(nu @ S_MAT.inverse(), N)
    return False, nu
