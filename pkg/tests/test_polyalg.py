import cmath
from fractions import Fraction

import pytest

from indetdyn.errors import DegenerateInput
from indetdyn.numbers import GaussQ
from indetdyn.polyalg import (BiPoly, HomPoly, compose_pair, hom_components, hom_factor_linear,
                              hom_gcd, resultant_eliminate, uni_roots)

z, w = BiPoly.z(), BiPoly.w()


def coeffs(h):
    return [Fraction(c.re) for c in h.coeffs]


def test_hom_components_split_by_degree():
    parts = hom_components(z * z + w)
    assert [p.degree for p in parts] == [1, 2]
    assert coeffs(parts[0]) == [1, 0]          # w
    assert coeffs(parts[1]) == [0, 0, 1]       # z^2


def test_hom_components_of_zero_is_empty():
    assert hom_components(BiPoly.const(0)) == []


def test_hom_components_example1_shape():
    parts = hom_components(2 * z * (z - w) + z)
    assert coeffs(parts[0]) == [0, 1]          # z
    assert coeffs(parts[1]) == [0, -2, 2]      # 2z^2 - 2zw


def test_factor_monomial_multiplicities():
    fs = hom_factor_linear(hom_components(z * z * w)[-1])
    got = sorted((Fraction(f.a.re), Fraction(f.b.re), f.alpha) for f in fs)
    assert got == [(0, 1, 1), (1, 0, 2)]


def test_factor_difference_of_squares():
    fs = hom_factor_linear(hom_components(z * z - w * w)[-1])
    assert sorted(f.alpha for f in fs) == [1, 1]
    ratios = sorted(Fraction((f.b / f.a).re) for f in fs)
    assert ratios == [-1, 1]


def test_factor_roots_of_example2_product():
    # factors a z - b w vanish at w/z = a/b
    fs = hom_factor_linear(hom_components((z - w) * (z - 2 * w))[-1])
    ratios = sorted(Fraction((f.a / f.b).re) for f in fs)
    assert ratios == [Fraction(1, 2), 1]


def test_gcd_cases():
    g = hom_gcd(hom_components(z * z * w)[-1], hom_components(z * w * w)[-1])
    assert g.degree == 2 and coeffs(g)[0] == 0 and coeffs(g)[2] == 0     # a multiple of zw
    assert hom_gcd(hom_components(z * z)[-1], hom_components(w * w)[-1]).degree == 0
    top1 = hom_components(2 * z * (z - w))[-1]
    top2 = hom_components(w * (z - w))[-1]
    g = hom_gcd(top1, top2)
    assert g.degree == 1
    c = coeffs(g)
    assert c[0] == -c[1]                       # proportional to z - w


def test_compose_with_identity_and_square():
    g = (z * z + w, z * w)
    assert compose_pair((z, w), g) == g
    h1, h2 = compose_pair((z * z, w * w), (z + w, w))
    assert h1 == (z + w) * (z + w) and h2 == w * w


def test_compose_example1_with_itself_has_degree_4():
    from indetdyn.fixtures import example1
    f = example1().components()
    h = compose_pair(f, f)
    assert max(h[0].degree, h[1].degree) == 4


def test_resultants():
    r = resultant_eliminate(w - z, w - 2 * z, "w")
    assert r[0] == 0 and r[1] != 0 and len(r) == 2
    assert resultant_eliminate(w, z, "w") == [GaussQ(0), GaussQ(1)]
    # (z^4 + 1)^2: each root of z^4 = -1 carries two w values
    r = resultant_eliminate(z * w * w - 1, z ** 3 + w * w, "w")
    assert [Fraction(c.re) for c in r] == [1, 0, 0, 0, 2, 0, 0, 0, 1]


def test_uni_roots_simple_and_eighth_roots():
    assert sorted(round(x.real) for x, _ in uni_roots([-1, 0, 1])) == [-1, 1]
    roots = uni_roots([1, 0, 0, 0, 1])
    want = [cmath.exp(1j * cmath.pi * (2 * k + 1) / 4) for k in range(4)]
    assert len(roots) == 4
    for x, m in roots:
        assert m == 1 and min(abs(x - y) for y in want) < 1e-12


def test_uni_roots_clusters_triple_root():
    assert [(round(x.real, 9), m) for x, m in uni_roots([-1, 3, -3, 1])] == [(1.0, 3)]


def test_uni_roots_keeps_symmetric_pair_apart():
    # the midpoint of +-ib is a degenerate point of the Taylor expansion
    z0 = 1.0871965340529595
    roots = uni_roots([-0.3, 0, 0, 0, z0 ** 3, 0, 1])
    assert len(roots) == 6 and all(m == 1 for _, m in roots)


def test_uni_roots_zero_polynomial():
    with pytest.raises(DegenerateInput):
        uni_roots([0, 0])


def test_homogeneous_evaluation_matches_bipoly():
    p = HomPoly(2, [GaussQ(1), GaussQ(2), GaussQ(3)])
    assert p.to_bipoly().evaluate(2, 5) == p.evaluate(2, 5)
