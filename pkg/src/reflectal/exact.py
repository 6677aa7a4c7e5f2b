"""Exact arithmetic in real quadratic extensions.

Two layers: ``QuadInt`` is a fast self-contained element of Q(sqrt(p))
with Fraction coordinates, used where only a single radical occurs.
For mixed-radical work (sqrt(2), sqrt(3) and a prime radical in the
same expression) we fall back to sympy expressions and the helpers at
the bottom of this module.
"""

from __future__ import annotations

import functools
import math
from fractions import Fraction
from typing import Any

import sympy as sp

__all__ = [
    "QuadInt",
    "sym",
    "exact_eq",
    "exact_sign",
    "simplify_entry",
    "as_float",
]


@functools.total_ordering
class QuadInt:
    """Element x + y*sqrt(p) of the real quadratic field Q(sqrt(p)).

    Coordinates are Fractions, so the class is an exact model of the
    whole field, not just of an order.  Elements of the maximal order
    for p = 1 mod 4 have half-integer coordinates of equal parity;
    that property is *not* preserved by arbitrary mixed products when
    p = 3 mod 4, which is why we do not restrict the representation.
    """

    __slots__ = ("p", "x", "y")

    def __init__(self, p: int, x: Any, y: Any = 0):
        if p <= 0:
            raise ValueError("radicand must be positive")
        self.p = int(p)
        self.x = Fraction(x)
        self.y = Fraction(y)

    @classmethod
    def from_halves(cls, p: int, a: int, b: int) -> "QuadInt":
        """Build (a + b*sqrt(p))/2 from integer numerators."""
        return cls(p, Fraction(a, 2), Fraction(b, 2))

    def _check(self, other: "QuadInt") -> None:
        if self.p != other.p:
            raise ValueError(f"mixed radicands {self.p} and {other.p}")

    def __add__(self, other):
        other = self._coerce(other)
        self._check(other)
        return QuadInt(self.p, self.x + other.x, self.y + other.y)

    __radd__ = __add__

    def __neg__(self):
        return QuadInt(self.p, -self.x, -self.y)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        self._check(other)
        return QuadInt(
            self.p,
            self.x * other.x + self.p * self.y * other.y,
            self.x * other.y + self.y * other.x,
        )

    __rmul__ = __mul__

    def conjugate(self) -> "QuadInt":
        return QuadInt(self.p, self.x, -self.y)

    def norm(self) -> Fraction:
        """Field norm x^2 - p*y^2."""
        return self.x * self.x - self.p * self.y * self.y

    def inverse(self) -> "QuadInt":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("zero element")
        return QuadInt(self.p, self.x / n, -self.y / n)

    def __truediv__(self, other):
        other = self._coerce(other)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def _coerce(self, other) -> "QuadInt":
        if isinstance(other, QuadInt):
            return other
        if isinstance(other, (int, Fraction)):
            return QuadInt(self.p, other, 0)
        raise TypeError(f"cannot coerce {type(other).__name__}")

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.y == 0 and self.x == other
        if not isinstance(other, QuadInt):
            return NotImplemented
        return self.p == other.p and self.x == other.x and self.y == other.y

    def __lt__(self, other):
        other = self._coerce(other)
        self._check(other)
        # sign of (dx + dy*sqrt(p)) decided exactly: compare dx^2 and p*dy^2
        dx = self.x - other.x
        dy = self.y - other.y
        if dy == 0:
            return dx < 0
        if dx == 0:
            return dy < 0
        if dx < 0 and dy < 0:
            return True
        if dx > 0 and dy > 0:
            return False
        # opposite signs: |dx| vs sqrt(p)|dy|
        lhs_bigger = dx * dx > self.p * dy * dy
        return (dx < 0) == lhs_bigger

    def __hash__(self):
        return hash((self.p, self.x, self.y))

    def sign(self) -> int:
        z = QuadInt(self.p, 0, 0)
        if self == z:
            return 0
        return -1 if self < z else 1

    def __float__(self):
        return float(self.x) + float(self.y) * math.sqrt(self.p)

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def to_sympy(self) -> sp.Expr:
        return sp.Rational(self.x) + sp.Rational(self.y) * sp.sqrt(self.p)

    def serialize(self) -> str:
        """Render as (a+b*sqrt(p))/2 with integer a, b when possible."""
        a2, b2 = 2 * self.x, 2 * self.y
        if a2.denominator == 1 and b2.denominator == 1:
            return f"({a2.numerator}{b2.numerator:+d}*sqrt({self.p}))/2"
        return f"({self.x}{'+' if self.y >= 0 else ''}{self.y}*sqrt({self.p}))"

    def __repr__(self):
        return f"QuadInt({self.p}, {self.x}, {self.y})"

    def __str__(self):
        return self.serialize()


# -- sympy-backed helpers ---------------------------------------------------

_SYM_CACHE: dict = {}


def sym(x) -> sp.Expr:
    """Lift to a sympy expression, exactly for int/Fraction/QuadInt."""
    if isinstance(x, sp.Expr):
        return x
    if isinstance(x, QuadInt):
        return x.to_sympy()
    if isinstance(x, Fraction):
        return sp.Rational(x.numerator, x.denominator)
    if isinstance(x, int):
        return sp.Integer(x)
    if isinstance(x, float):
        return sp.Float(x)
    raise TypeError(f"cannot lift {type(x).__name__}")


def simplify_entry(e: sp.Expr) -> sp.Expr:
    """Cheap canonicalization for matrix entries in a radical tower.

    radsimp + expand covers products of the generators we actually use
    (sqrt(2), sqrt(3), sqrt(p)); full simplify() is far too slow inside
    group-word loops.
    """
    return sp.expand(sp.radsimp(e))


def exact_eq(a, b, tol: float = 1e-10) -> bool:
    """Equality of two exact-ish scalars.

    sympy's structural equality misses e.g. sqrt(6) vs sqrt(2)*sqrt(3),
    so we run equals() and fall back to a high-precision numeric gap
    when it returns None.
    """
    a, b = sym(a), sym(b)
    d = sp.expand(a - b)
    if d == 0:
        return True
    r = d.equals(0)
    if r is not None:
        return bool(r)
    return abs(complex(d.evalf(40))) < tol


def exact_sign(a) -> int:
    """Sign of a real exact scalar, numeric fallback at 50 digits."""
    a = sym(a)
    if a == 0:
        return 0
    r = a.is_positive
    if r is True:
        return 1
    if r is False:
        return -1
    v = float(a.evalf(50))
    if v == 0.0:
        raise ValueError(f"cannot decide sign of {a}")
    return 1 if v > 0 else -1


def as_float(x) -> float:
    if isinstance(x, QuadInt):
        return float(x)
    if isinstance(x, sp.Expr):
        return float(x.evalf(30))
    return float(x)
