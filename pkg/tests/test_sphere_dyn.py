from fractions import Fraction

from indetdyn.fixtures import example1, example2, example3
from indetdyn.numbers import GaussQ
from indetdyn.polyalg import HomPoly
from indetdyn.sphere_dyn import (ProjPoint, RatMap1D, build_etree, hyperbolicity_probe,
                                 local_degree, periodicity_check, preimages)


def u_of(p):
    return Fraction(p.u.re)


def test_preimages_of_doubling():
    pre = preimages(example1().f_inf(), ProjPoint.from_u(1))
    assert [(u_of(p), m) for p, m in pre] == [(Fraction(1, 2), 1)]


def test_preimages_of_squaring():
    g = example3().f_inf()
    assert sorted((u_of(p), m) for p, m in preimages(g, ProjPoint.from_u(1))) == [(-1, 1), (1, 1)]
    assert [(u_of(p), m) for p, m in preimages(g, ProjPoint.from_u(0))] == [(0, 2)]


def test_local_degrees():
    assert local_degree(example1().f_inf(), ProjPoint.from_u(3)) == 1
    g = example3().f_inf()
    assert local_degree(g, ProjPoint.from_u(0)) == 2
    assert local_degree(g, ProjPoint.from_u(1)) == 1


def test_etree_example1_dyadic_chain():
    t = build_etree(example1(), 3)
    assert [u_of(nd.point) for nd in t.nodes] == [1, Fraction(1, 2), Fraction(1, 4), Fraction(1, 8)]
    assert not any(nd.is_collision for nd in t.nodes)


def test_etree_example2_collision_on_second_point():
    t = build_etree(example2(), 3)
    got = {u_of(nd.point): nd.is_collision for nd in t.nodes}
    assert {2, 1, Fraction(1, 2), Fraction(1, 4)} <= set(got)
    assert got[1] and not got[2]


def test_etree_example3_single_self_parent_node():
    t = build_etree(example3(), 5)
    assert len(t.nodes) == 1
    assert u_of(t.nodes[0].point) == 0 and t.nodes[0].is_collision


def test_periodicity_statuses():
    assert [r.status for r in periodicity_check(example3())] == ["Periodic"]
    assert periodicity_check(example3())[0].k == 1
    assert [r.status for r in periodicity_check(example1())] == ["Clear"]
    rep = periodicity_check(example2())
    assert rep[1].status == "HitsIndeterminacy" and rep[1].hit == 0 and rep[1].k == 1


def test_hyperbolicity_probe_cases():
    sq = hyperbolicity_probe(example3().f_inf())
    assert sq["hyperbolic_like"] and all(c["status"] == "Converged" for c in sq["critical_points"])
    lin = hyperbolicity_probe(example1().f_inf())
    assert lin["mobius_class"] == "loxodromic"
    # u -> u^2 - 1 has the superattracting 2-cycle {0, -1}
    g = RatMap1D(HomPoly(2, [GaussQ(-1), GaussQ(0), GaussQ(1)]), HomPoly(2, [GaussQ(1), GaussQ(0), GaussQ(0)]))
    crit0 = hyperbolicity_probe(g)["critical_points"][0]
    assert crit0["period"] == 2 and sorted(crit0["cycle"]) == ["-1", "0"]
