"""Gaussian rationals and the float/exact coefficient duality.

Coefficients throughout the package are either Python ``complex`` (floating
backend) or :class:`GaussQ` (exact backend).  ``int`` and ``Fraction`` are
accepted on input and promoted to ``GaussQ``.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from numbers import Rational


class GaussQ:
    """Exact complex number ``re + i*im`` with rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    # -- coercion ---------------------------------------------------------
    @staticmethod
    def _lift(x):
        if isinstance(x, GaussQ):
            return x
        if isinstance(x, (int, Fraction)) or isinstance(x, Rational):
            return GaussQ(x)
        return None

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __float__(self):
        if self.im:
            raise TypeError("non-real GaussQ")
        return float(self.re)

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        o = GaussQ._lift(other)
        if o is None:
            return complex(self) + other
        return GaussQ(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussQ(-self.re, -self.im)

    def __sub__(self, other):
        o = GaussQ._lift(other)
        if o is None:
            return complex(self) - other
        return GaussQ(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = GaussQ._lift(other)
        if o is None:
            return other - complex(self)
        return o - self

    def __mul__(self, other):
        o = GaussQ._lift(other)
        if o is None:
            return complex(self) * other
        return GaussQ(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = GaussQ._lift(other)
        if o is None:
            return complex(self) / other
        n = o.re * o.re + o.im * o.im
        if n == 0:
            raise ZeroDivisionError("GaussQ division by zero")
        return GaussQ((self.re * o.re + self.im * o.im) / n, (self.im * o.re - self.re * o.im) / n)

    def __rtruediv__(self, other):
        o = GaussQ._lift(other)
        if o is None:
            return other / complex(self)
        return o / self

    def __pow__(self, k):
        if not isinstance(k, int):
            return complex(self) ** k
        if k < 0:
            return GaussQ(1) / (self ** (-k))
        out, base = GaussQ(1), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conjugate(self):
        return GaussQ(self.re, -self.im)

    def abs2(self):
        return self.re * self.re + self.im * self.im

    def __abs__(self):
        return math.sqrt(self.abs2())

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        o = GaussQ._lift(other)
        if o is None:
            if isinstance(other, complex):
                return complex(self) == other
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __repr__(self):
        return f"GaussQ({format_gauss(self)!r})"

    @property
    def real(self):
        return self.re

    @property
    def imag(self):
        return self.im


def is_exact(c) -> bool:
    return isinstance(c, (GaussQ, int, Fraction))


def exactify(c):
    """Promote ints/Fractions to GaussQ; leave complex alone."""
    if isinstance(c, GaussQ):
        return c
    if isinstance(c, (int, Fraction)):
        return GaussQ(c)
    return complex(c)


def to_complex(c) -> complex:
    return complex(c)


def cabs(c) -> float:
    return abs(complex(c)) if not isinstance(c, GaussQ) else abs(c)


def rationalize(x: complex, max_den: int = 10**6, tol: float = 1e-9):
    """Best Gaussian-rational approximation of ``x`` or None if not close."""
    re_ = Fraction(x.real).limit_denominator(max_den)
    im_ = Fraction(x.imag).limit_denominator(max_den)
    cand = GaussQ(re_, im_)
    if abs(complex(cand) - x) <= tol * max(1.0, abs(x)):
        return cand
    return None


def format_fraction(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def format_gauss(c: GaussQ) -> str:
    """``"num/den+num/den i"`` string used by the rational JSON mode."""
    re_ = format_fraction(c.re)
    if not c.im:
        return re_
    sign = "+" if c.im >= 0 else "-"
    return f"{re_}{sign}{format_fraction(abs(c.im))} i"


_GAUSS_RE = re.compile(
    r"^\s*(?P<re>[+-]?\d+(?:/\d+)?)\s*(?:(?P<sign>[+-])\s*(?P<im>\d+(?:/\d+)?)\s*i)?\s*$"
)


def parse_gauss(text: str) -> GaussQ:
    m = _GAUSS_RE.match(text)
    if not m:
        raise ValueError(f"not a Gaussian rational: {text!r}")
    re_ = Fraction(m.group("re"))
    im_ = Fraction(m.group("im")) if m.group("im") else Fraction(0)
    if m.group("sign") == "-":
        im_ = -im_
    return GaussQ(re_, im_)


def encode_coeff(c):
    """JSON encoding: exact values as a string, floats as ``[re, im]``."""
    if isinstance(c, GaussQ):
        return format_gauss(c)
    if isinstance(c, (int, Fraction)):
        return format_gauss(GaussQ(c))
    c = complex(c)
    return [c.real, c.imag]


def encode_pair(c):
    """``[re, im]`` with exact parts rendered as ``"num/den"`` strings."""
    if isinstance(c, (GaussQ, int, Fraction)):
        g = exactify(c)
        return [format_fraction(g.re), format_fraction(g.im)]
    c = complex(c)
    return [c.real, c.imag]


def decode_coeff(obj):
    if isinstance(obj, str):
        return parse_gauss(obj)
    if isinstance(obj, (list, tuple)) and len(obj) == 2:
        a, b = obj
        if isinstance(a, str) or isinstance(b, str):
            return GaussQ(Fraction(a), Fraction(b))
        if isinstance(a, int) and isinstance(b, int):
            return GaussQ(a, b)
        return complex(a, b)
    if isinstance(obj, int):
        return GaussQ(obj)
    if isinstance(obj, float):
        return complex(obj)
    raise ValueError(f"cannot decode coefficient {obj!r}")
