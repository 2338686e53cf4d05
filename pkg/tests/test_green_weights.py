import math
from fractions import Fraction

import pytest

from indetdyn.errors import TreeTooShallow
from indetdyn.fixtures import example1, example2, example3, example4
from indetdyn.green_weights import (green_potential_convergence_check, green_potential_infinity,
                                    indet_limits, lambda_table, partial_sum_check, symbolic_lambda)
from indetdyn.sphere_dyn import ProjPoint, build_etree


def limits_by_u(f, depth=6):
    t = build_etree(f, depth)
    table = lambda_table(t, f)
    return {Fraction(nd.point.u.re): table.limit[nd.id] for nd in t.nodes}


def test_example2_weights():
    lam = limits_by_u(example2())
    assert lam[2] == Fraction(1, 3) and lam[1] == Fraction(4, 9)
    for n in range(2, 6):
        assert lam[Fraction(1, 2 ** (n - 1))] == Fraction(4, 3 ** (n + 1))


def test_example2_indeterminacy_limits_exact():
    lims, _ = indet_limits(example2())
    assert lims == [Fraction(1, 3), Fraction(4, 9)]


def test_example1_weights_sum_to_one():
    lam = limits_by_u(example1(), 8)
    for n in range(8):
        assert lam[Fraction(1, 2 ** n)] == Fraction(1, 2 ** (n + 1))


def test_example3_single_atom_takes_all_mass():
    f = example3()
    t = build_etree(f, 6)
    table = lambda_table(t, f, n_max=6)
    assert table.seq[0][:4] == [0, Fraction(1, 3), Fraction(5, 9), Fraction(19, 27)]
    assert table.limit == [1]
    assert table.partial_sum(2) == Fraction(5, 9)


def test_example4_weights():
    for n1, n2, n in ((1, 1, 1), (2, 1, 3), (1, 4, 2)):
        lims, _ = indet_limits(example4(n1, n2, n))
        assert lims == [Fraction(n1, n1 + n2), Fraction(n2, n1 + n2)]


def test_partial_sums():
    f = example1()
    table = lambda_table(build_etree(f, 5), f)
    assert table.partial_sum(3) == Fraction(7, 8)
    assert table.partial_sum(0) == 0
    for f in (example1(), example2(), example3(), example4()):
        table = lambda_table(build_etree(f, 6), f, n_max=6)
        assert all(partial_sum_check(table, n) == 0 for n in range(7))


def test_symbolic_oracle_matches_recursion():
    for f in (example1(), example2(), example3(), example4(2, 1, 3)):
        t = build_etree(f, 3)
        table = lambda_table(t, f)
        for n in (1, 2):
            sym, unmatched = symbolic_lambda(f, t, n)
            assert not unmatched and sym == [s[n] for s in table.seq]


def test_shallow_tree_rejected():
    f = example3()
    with pytest.raises(TreeTooShallow):
        lambda_table(build_etree(f, 4), f, n_max=6)


def test_potential_at_infinity_example3():
    f = example3()
    table = lambda_table(build_etree(f, 3), f)
    v = green_potential_infinity(table, ProjPoint.make(1, 1))
    assert v["value"] == pytest.approx(-0.5 * math.log(2), abs=1e-12)
    assert green_potential_infinity(table, ProjPoint.make(0, 1))["value"] == -math.inf
    # scale invariance of the representative
    assert green_potential_infinity(table, ProjPoint.make(3, 3))["value"] == pytest.approx(v["value"])


def test_potential_convergence_example3():
    seq = green_potential_convergence_check(example3(), ProjPoint.make(1, 1))
    assert abs(seq[20] - (-0.5 * math.log(2))) < 1e-6
