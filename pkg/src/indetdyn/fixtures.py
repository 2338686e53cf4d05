"""Built-in example maps with exact rational coefficients."""

from __future__ import annotations

from .errors import ParseError
from .gclass import GMap, from_polynomials
from .polyalg import BiPoly

EXAMPLE1_C = 4


def _zw():
    return BiPoly.z(), BiPoly.w()


def example1_polys(C: int = EXAMPLE1_C):
    z, w = _zw()
    return (2 * z * (z - w) + z) * C, (w * (z - w)) * C


def example2_polys():
    z, w = _zw()
    g = (z - w) * (z - 2 * w)
    return 2 * z * g + z * z, w * g


def example3_polys():
    z, w = _zw()
    return z**3 + w**2, z * w**2


def example4_polys(n1: int = 1, n2: int = 1, n: int = 1):
    """Monomial family with both coordinate axes at infinity indeterminate.

    The lower-order terms ``w^(D-1)`` and ``z^(D-1)`` make the line at
    infinity attracting for D >= 3.
    """
    if min(n1, n2, n) < 1:
        raise ValueError("exponents must be positive")
    z, w = _zw()
    D = n1 + n2 + n
    return z**(n1 + n) * w**n2 + w**(D - 1), z**n1 * w**(n2 + n) + z**(D - 1)


def example1(C: int = EXAMPLE1_C) -> GMap:
    return from_polynomials(*example1_polys(C))


def example2() -> GMap:
    return from_polynomials(*example2_polys())


def example3() -> GMap:
    return from_polynomials(*example3_polys())


def example4(n1: int = 1, n2: int = 1, n: int = 1) -> GMap:
    return from_polynomials(*example4_polys(n1, n2, n))


FIXTURES = {
    "example1": example1,
    "example2": example2,
    "example3": example3,
    "example4": example4,
}


def get_fixture(name: str) -> GMap:
    """Resolve ``example1``..``example3`` or ``example4`` / ``example4:n1,n2,n``."""
    base, _, args = name.partition(":")
    if base not in FIXTURES:
        raise ParseError(f"unknown fixture {name!r}; known: {sorted(FIXTURES)}")
    if not args:
        return FIXTURES[base]()
    if base != "example4":
        raise ParseError(f"fixture {base!r} takes no parameters")
    try:
        n1, n2, n = (int(x) for x in args.split(","))
    except ValueError as exc:
        raise ParseError(f"bad example4 parameters {args!r}; expected n1,n2,n") from exc
    return example4(n1, n2, n)
