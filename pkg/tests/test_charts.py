from fractions import Fraction

import mpmath as mp
import pytest

from indetdyn.charts import (PREC, U_V, UPRIME, CentredMap, HomMap, best_chart, chart_log_norm,
                             chart_of, lift, log_norm, mpc, to_chart)
from indetdyn.fixtures import example2, example3
from indetdyn.numbers import GaussQ


def test_chart_of_picks_larger_coordinate():
    assert chart_of(Fraction(1), Fraction(2)) == (U_V, Fraction(1, 2))
    assert chart_of(Fraction(3), Fraction(1)) == (UPRIME, Fraction(1, 3))


def test_lift_and_to_chart_round_trip():
    s, t = mp.mpc(0.3, 0.1), mp.mpc(1e-5)
    for chart in (U_V, UPRIME):
        s2, t2 = to_chart(lift(chart, s, t), chart)
        assert abs(s2 - s) < 1e-30 and abs(t2 - t) < 1e-30


def test_log_norm_agrees_with_chart_formula():
    s, t = mp.mpc(0.7, -0.2), mp.mpc(3e-4, 1e-4)
    assert abs(log_norm(lift(U_V, s, t)) - chart_log_norm(s, t)) < 1e-30
    assert log_norm((0, 0, 1)) == -mp.inf and log_norm((1, 0, 0)) == mp.inf


def test_best_chart_hysteresis():
    H = (mp.mpf(1.05), mp.mpf(1), mp.mpf(0))
    assert best_chart(H) == UPRIME
    assert best_chart(H, current=U_V) == U_V


@pytest.mark.parametrize("src,dst", [((U_V, Fraction(1)), (U_V, Fraction(2))),
                                     ((U_V, Fraction(2)), (UPRIME, Fraction(1, 4))),
                                     ((UPRIME, Fraction(0)), (UPRIME, Fraction(0)))])
def test_centred_map_matches_homogeneous_map(src, dst):
    f = example2()
    cm = CentredMap(f, *src, *dst)
    hm = HomMap(f)
    with mp.workprec(PREC):
        e, t = mp.mpc("1e-3", "2e-3"), mp.mpc("1e-4")
        H = lift(src[0], mpc(src[1]) + e, t)
        s2, t2 = to_chart(hm(H), dst[0])
        ep, tp = cm.image(e, t)
        assert abs(ep + mpc(dst[1]) - s2) < mp.mpf(10) ** -60
        assert abs(tp - t2) < mp.mpf(10) ** -60 * abs(t2)


def test_centred_map_keeps_relative_precision_for_tiny_offsets():
    # u -> u^2 near u = 0 with T = 0: the centred image of e is exactly e^2
    cm = CentredMap(example3(), U_V, Fraction(0), U_V, Fraction(0))
    with mp.workprec(PREC):
        e = mp.mpc("1e-40")
        ep, tp = cm.image(e, mp.mpc(0))
        assert abs(ep / e**2 - 1) < mp.mpf(10) ** -60


def test_mpc_accepts_gaussian_rationals():
    assert mpc(GaussQ(Fraction(1, 2), Fraction(-3))) == mp.mpc(0.5, -3)
