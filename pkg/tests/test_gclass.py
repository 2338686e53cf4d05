from fractions import Fraction

import pytest

from indetdyn.errors import NoIndeterminacy
from indetdyn.fixtures import example1, example2, example3, example4
from indetdyn.gclass import GMap, attraction_criterion, compose_g, eval_chart, from_polynomials
from indetdyn.polyalg import BiPoly, compose_pair
from indetdyn.sphere_dyn import ProjPoint

z, w = BiPoly.z(), BiPoly.w()


def us(f):
    return sorted(Fraction(ip.point.u.re) for ip in f.indeterminacy())


def test_normal_form_example1():
    f = from_polynomials(2 * z * (z - w) + z, w * (z - w))
    assert (f.d, f.dprime, f.D) == (1, 1, 2)
    assert us(f) == [1]
    assert [ip.alpha for ip in f.indeterminacy()] == [1]


def test_normal_form_example2():
    f = from_polynomials(2 * z * (z - w) * (z - 2 * w) + z * z, w * (z - w) * (z - 2 * w))
    assert f.D == 3 and us(f) == [1, 2]


def test_normal_form_example3():
    f = from_polynomials(z ** 3 + w * w, z * w * w)
    assert (f.d, f.dprime, f.D) == (1, 2, 3)
    assert us(f) == [0]


def test_normal_form_round_trips_through_json():
    for f in (example1(), example2(), example3(), example4(2, 1, 3)):
        g = GMap.from_json(f.to_json())
        assert g.components() == f.components()


def test_criterion_example3_satisfied():
    rep = attraction_criterion(example3())
    assert rep.verdict == "Satisfied" and rep.deg_phi == 4


def test_criterion_small_degree_case():
    f = from_polynomials(2 * z * (z - w) + z, w * (z - w))
    rep = attraction_criterion(f)
    assert rep.verdict == "SmallDegreeCase" and rep.deg_phi == 2


def test_composition_degree_is_product():
    fs = [example1(), example2(), example3()]
    for a in fs:
        for b in fs:
            h = compose_g(a, b)
            c1, c2 = compose_pair(a.components(), b.components())
            assert h.D == a.D * b.D == max(c1.degree, c2.degree)


def test_compose_rejects_map_outside_class():
    with pytest.raises(NoIndeterminacy):
        compose_g(example1(), from_polynomials(z, w))


def test_f_inf_examples():
    g1 = example1().f_inf()
    assert g1(ProjPoint.from_u(Fraction(3))).close(ProjPoint.from_u(Fraction(6)))
    g3 = example3().f_inf()
    assert g3.degree == 2
    assert g3(ProjPoint.from_u(Fraction(3))).close(ProjPoint.from_u(Fraction(9)))


def test_f_inf_example4_is_monomial():
    g = example4(1, 4, 2).f_inf()
    u = Fraction(3, 2)
    assert g(ProjPoint.from_u(u)).close(ProjPoint.from_u(u ** 2), 1e-12)


def test_affine_chart_is_plain_evaluation():
    f = example3()
    (a, b), chart = eval_chart(f, (2, 3), "affine")
    assert chart == "affine" and (a, b) == (2 ** 3 + 9, 2 * 9)
