import math
from fractions import Fraction

import mpmath as mp
import pytest

from indetdyn.errors import CertificateFailure, HypothesisViolation
from indetdyn.fixtures import example1, example2, example3, example4
from indetdyn.orbit_lab import (OUTSIDE, Shooter, boxes_disjoint, build_boxes, certify_tree,
                                example3_boxes, example3_chart_map, example3_mass_collapse,
                                example3_region_check, green_function_seq,
                                horizontal_like_certificate, iterate_orbit, slice_degree_numeric)
from indetdyn.sphere_dyn import build_etree


def ex1_boxes(depth=3):
    f = example1()
    t = build_etree(f, depth)
    return f, t, build_boxes(f, t)


def pairwise_disjoint(boxes):
    return all(boxes_disjoint(a, b) for i, a in enumerate(boxes) for b in boxes[i + 1:])


def test_example1_boxes_follow_dyadic_chain():
    _, _, boxes = ex1_boxes()
    assert [complex(b.s_c) for b in boxes] == [1, 0.5, 0.25, 0.125]
    assert pairwise_disjoint(boxes)


def test_example2_indeterminacy_boxes_disjoint():
    f = example2()
    t = build_etree(f, 3)
    boxes = build_boxes(f, t)
    ind = [b for b in boxes if b.indeterminate]
    assert len(ind) == 2 and boxes_disjoint(*ind)
    assert pairwise_disjoint(boxes)


def test_example3_layout_nesting():
    d0, d1, d2 = example3_boxes()
    assert d0.disk_radius < d1.disk_radius and d0.s_c == d1.s_c == 0
    assert d2.chart != d0.chart


def test_periodic_indeterminacy_has_no_generic_layout():
    f = example4()
    with pytest.raises(HypothesisViolation):
        build_boxes(f, build_etree(f, 2))


def test_example3_certificates_and_slice_degrees():
    f = example3()
    d0, d1, d2 = example3_boxes()
    for src, dst, deg in ((d1, d0, 3), (d1, d2, 1), (d2, d2, 2)):
        cert = horizontal_like_certificate(f, src, dst)
        assert cert["slice_degree"] == deg
        assert slice_degree_numeric(f, src, dst) == deg


def test_example2_indeterminacy_transition_degree_two():
    f = example2()
    t = build_etree(f, 2)
    boxes = build_boxes(f, t)
    certs = certify_tree(f, t, boxes)
    assert all(c["slice_degree"] == c["transition_degree"] for c in certs)
    i0, i1 = (next(b for b in boxes if t.nodes[b.node_id].indet_index == j) for j in (0, 1))
    assert slice_degree_numeric(f, i1, i0) == 2


def test_non_adjacent_pair_fails_condition_iii():
    f, _, boxes = ex1_boxes()
    with pytest.raises(CertificateFailure, match=r"\(iii\)"):
        horizontal_like_certificate(f, boxes[2], boxes[2])


def test_non_indeterminate_source_has_local_degree_one():
    f, _, boxes = ex1_boxes()
    assert slice_degree_numeric(f, boxes[2], boxes[1]) == 1


def test_descent_itinerary_example1():
    f, _, boxes = ex1_boxes()
    b = boxes[2]
    rec = iterate_orbit(f, (b.chart, complex(b.s_c) + 1e-3, b.v_bound / 4), 4, boxes)
    assert rec.itinerary[:3] == ["n2", "n1", "n0"]


def test_point_outside_boxes_still_escapes():
    f, _, boxes = ex1_boxes()
    rec = iterate_orbit(f, (5, 7), 5, boxes)
    assert set(rec.itinerary) == {OUTSIDE}
    assert all(b - a > 0.5 for a, b in zip(rec.log_norms, rec.log_norms[1:]))


def test_shot_orbit_is_semi_conjugate():
    f, t, boxes = ex1_boxes(2)
    sh = Shooter(f, boxes, [1 if b.indeterminate else 2 for b in boxes])
    rec = sh.shoot([2, 1, 0, 0, 2, 1, 0])
    assert [b for b in rec.itinerary] == ["n2", "n1", "n0", "n0", "n2", "n1", "n0"]
    assert rec.semi_conjugate()
    assert max(rec.residuals) < 1e-40


def test_green_sequence_bounded_orbit():
    rep = green_function_seq(example1(), (0, 0), 6)
    assert rep["u"] == [0.0] * 7


def test_green_sequence_example3_decreases():
    f = example3()
    rep = green_function_seq(f, (3, 5), 8)
    u = rep["u"]
    assert rep["monotone"] and all(b <= a + 1e-12 for a, b in zip(u, u[1:]))
    # u_n(q) = u_{n-1}(f(q)) / D
    f1, f2 = f.components()
    q1 = (f1.evaluate(3, 5), f2.evaluate(3, 5))
    shifted = green_function_seq(f, tuple(complex(c) for c in q1), 7)["u"]
    for n in range(1, 8):
        assert u[n] == pytest.approx(shifted[n - 1] / 3, rel=1e-12)


def test_example3_chart_map_formula():
    assert example3_chart_map(Fraction(1, 4), Fraction(1, 100)) == (
        (Fraction(1, 64) + Fraction(1, 100)) * 4, Fraction(1, 10 ** 6) * 4)


def test_region_check_and_boundary_stress():
    rep = example3_region_check(5000, seed=2)
    assert rep["violations"] == 0 and rep["worst_margin"] > 0
    u = 0.499
    up, vp = example3_chart_map(u, 0.0)
    assert abs(up) < 0.5 and vp == 0


def test_mass_collapse():
    rep = example3_mass_collapse(20)
    assert rep["m2"] <= Fraction(2, 3) ** 20 and rep["m1"] >= 1 - Fraction(2, 3) ** 20
    assert example3_mass_collapse(1)["history"][1] == (Fraction(1, 3), Fraction(2, 3))
    fixed = example3_mass_collapse(5, start=(1, 0))
    assert (fixed["m1"], fixed["m2"]) == (1, 0)
