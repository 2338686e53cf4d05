import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

import pytest

from indetdyn import escape as esc
from indetdyn.errors import NonIntegerExponent
from indetdyn.fixtures import example1, example2, example3, example4
from indetdyn.green_weights import lambda_table
from indetdyn.polyalg import BiPoly
from indetdyn.sphere_dyn import build_etree
from indetdyn.subshift import build_model

z, w = BiPoly.z(), BiPoly.w()


@dataclass
class PlainMap:
    """Just enough of a map for the preimage counter."""
    f1: BiPoly
    f2: BiPoly
    exact: bool = True

    def components(self):
        return self.f1, self.f2


def degrees(f):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return esc.topological_degree(f, esc.exponents_for(f)), esc.count_preimages_numeric(f, (0, 1))


def test_growth_exponent_example3():
    f = example3()
    ex = esc.estimate_growth_exponent(f, f.indeterminacy()[0])
    assert ex.snapped and ex.l == 2 and abs(ex.raw - 2) < 0.05


def test_growth_exponents_of_fixtures():
    assert [e.l for e in esc.exponents_for(example1())] == [1]
    assert [e.l for e in esc.exponents_for(example2())] == [2, 2]
    assert [e.l for e in esc.exponents_for(example4(2, 1, 3))] == [5, 5]
    assert esc.nonindet_exponent(example2()).l == 3


def test_slope_is_at_least_one_near_infinity():
    rep = esc.attraction_probe(example1(), samples=300)
    assert rep["attracting"] and rep["min_slope"] >= 1


def test_degree_formula_example3():
    assert degrees(example3()) == (8, 8)


@pytest.mark.parametrize("f", [example1(), example2(), example4(), example4(2, 1, 3), example4(1, 4, 2)],
                         ids=["ex1", "ex2", "ex4_111", "ex4_213", "ex4_142"])
def test_degree_formula_matches_preimage_count(f):
    dt, cnt = degrees(f)
    assert dt == cnt and dt > f.D


def test_linear_map_has_one_preimage():
    assert esc.count_preimages_numeric(PlainMap(z + w, w), (Fraction(3), Fraction(-2))) == 1


def test_non_integer_exponent_rejected():
    f = example3()
    bad = esc.GrowthExponent("0/1", 1.5, False, 1.5)
    with pytest.raises(NonIntegerExponent):
        esc.topological_degree(f, [bad])


def test_hits_E_flags_example2_only():
    assert esc.hits_E(example1()) == [False]
    assert esc.hits_E(example2()) == [False, True]


def test_escape_range():
    assert esc.escape_range(esc.exponents_for(example3()), 3) == (2.0, 3.0)
    assert esc.escape_range([], 3) == (3.0, 3.0)


def test_mean_escape_rate_edge_cases():
    assert esc.mean_escape_rate_from([], [], 3) == pytest.approx(3)
    assert esc.mean_escape_rate_from([Fraction(1, 2), Fraction(1, 2)], [2, 2], 5) == pytest.approx(2)


def test_mean_escape_rate_example1():
    f = example1()
    table = lambda_table(build_etree(f, 8), f)
    assert esc.mean_escape_rate(table, esc.exponents_for(f), f) == pytest.approx(math.sqrt(2), rel=1e-2)


def test_mean_escape_rate_example4_closed_form():
    n1, n2, n = 2, 1, 3
    f = example4(n1, n2, n)
    table = lambda_table(build_etree(f, 4), f)
    exps = esc.exponents_for(f)
    l0, l1 = exps[0].l, exps[1].l
    want = l0 ** (n1 / (n1 + n2)) * l1 ** (n2 / (n1 + n2))
    assert esc.mean_escape_rate(table, exps, f) == pytest.approx(want, rel=1e-9)


def test_birkhoff_average_small():
    f = example1()
    tree = build_etree(f, 8)
    table = lambda_table(tree, f)
    m = build_model(f, tree, table, "reinject")
    rep = esc.birkhoff_check(f, tree, m, table, esc.exponents_for(f), n_words=2000, length=300, seed=1)
    assert rep["relative_error"] < 0.02
