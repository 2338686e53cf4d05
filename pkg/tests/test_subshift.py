from fractions import Fraction

import numpy as np
import pytest

from indetdyn.errors import InadmissibleWord, RestEntered
from indetdyn.fixtures import example1, example2, example3, example4
from indetdyn.green_weights import lambda_table
from indetdyn.sphere_dyn import build_etree
from indetdyn.subshift import (build_model, cylinder_measure, rng_for, sample_itinerary,
                               sample_words, transition_degree, transitivity_check,
                               verify_invariance, words_to_csv)


def model(f, tree_depth=6, rest_mode="absorb", **kw):
    t = build_etree(f, tree_depth)
    return t, build_model(f, t, lambda_table(t, f), rest_mode, **kw)


def node(t, u):
    return next(nd.id for nd in t.nodes if nd.point.u == u)


def test_transition_degrees():
    t, _ = model(example2(), 4)
    assert transition_degree(example2(), t, node(t, 1), node(t, 2)) == 2
    t, _ = model(example1(), 4)
    f = example1()
    for n in range(1, 4):
        assert transition_degree(f, t, node(t, Fraction(1, 2 ** n)), node(t, Fraction(1, 2 ** (n - 1)))) == 1
    assert all(transition_degree(f, t, node(t, 1), q.id) == 1 for q in t.nodes)


def test_example1_matrix():
    _, m = model(example1())
    assert [m.rows[0].get(j, 0) for j in range(5)] == [Fraction(1, 2 ** (k + 1)) for k in range(5)]
    assert all(m.rows[k][k - 1] == 1 for k in range(1, m.n_explicit))


def test_example2_matrix():
    _, m = model(example2())
    assert [m.rows[0].get(j, 0) for j in range(4)] == [Fraction(1, 3), Fraction(4, 9), Fraction(4, 27), Fraction(4, 81)]
    assert [m.rows[1].get(j, 0) for j in range(4)] == [Fraction(1, 2), Fraction(1, 3), Fraction(1, 9), Fraction(1, 27)]


def test_example4_matrix_and_exact_invariance():
    for n1, n2, n in ((1, 1, 1), (2, 1, 3)):
        f = example4(n1, n2, n)
        t, m = model(f, 2, depth=0)
        D = n1 + n2 + n
        i0 = next(k for k, nid in enumerate(m.node_ids) if t.nodes[nid].indet_index == 0)
        i1 = 1 - i0
        assert m.rows[i0][i0] == Fraction(n1 + n, D) and m.rows[i0][i1] == Fraction(n2, D)
        assert m.rows[i1][i0] == Fraction(n1, D) and m.rows[i1][i1] == Fraction(n2 + n, D)
        inv = verify_invariance(m)
        assert inv["eigen_dev"] == 0 and inv["row_sum_dev"] == 0
        assert cylinder_measure(m, [i0, i1])["product"] == Fraction(n1, n1 + n2) * Fraction(n2, D)
        assert transitivity_check(m)["least_n"] == [[1, 1], [1, 1]]


def test_cylinder_measures():
    _, m = model(example1())
    assert cylinder_measure(m, [0, 0])["product"] == Fraction(1, 4)
    assert cylinder_measure(m, [])["product"] == 1
    assert all(cylinder_measure(m, w)["agree"] for w in ([0], [0, 2], [2, 1, 0, 0], [3, 2, 1, 0, 1]))
    with pytest.raises(InadmissibleWord):
        cylinder_measure(m, [0, 1, 1])


def test_truncation_residual_bound():
    f = example2()
    _, m = model(f, 8)
    assert verify_invariance(m)["eigen_dev"] <= Fraction(1, 3) ** 8


def test_reinject_is_exactly_stationary():
    _, m = model(example1(), 6, "reinject")
    inv = verify_invariance(m)
    assert inv["eigen_dev"] == 0 and inv["rest_dev"] == 0


def test_perturbed_weights_fail_eigen_check_at_located_state():
    # the row of I_0 spreads over many states, so the deviation peaks at I_0
    _, m = model(example2(), 6)
    before = verify_invariance(m)["eigen_dev"]
    m.lam[0] += Fraction(1, 100)
    inv = verify_invariance(m)
    assert inv["eigen_dev"] > before
    assert inv["eigen_worst_state"] == m.labels[0]


def test_single_atom_model():
    _, m = model(example3(), 4)
    assert m.n_explicit == 1 and verify_invariance(m)["row_sum_dev"] == 0


def test_transitivity_example1_schedule():
    _, m = model(example1(), 5)
    rep = transitivity_check(m)
    assert rep["all_reachable"] and rep["schedule_ok"] and rep["matches_schedule"]
    assert rep["least_n"][3][2] == 1 and rep["least_n"][3][0] == 3 and rep["least_n"][3][4] == 4


def test_rng_streams_are_reproducible_and_distinct():
    a = rng_for(7, 0).random(4)
    assert np.array_equal(a, rng_for(7, 0).random(4))
    assert not np.array_equal(a, rng_for(7, 1).random(4))


def test_sample_itinerary_edge_cases():
    _, m = model(example1(), 3)
    assert sample_itinerary(m, 0, seed=0) == []
    w = sample_itinerary(m, 200, seed=3)
    assert len(w) == 200 and w == sample_itinerary(m, 200, seed=3)
    for a, b in zip(w, w[1:]):
        assert m.degrees[a].get(b, 0) > 0
    with pytest.raises(RestEntered):
        sample_itinerary(m, 10_000, seed=0, on_rest="raise")


def test_one_cylinder_frequencies_match_weights():
    _, m = model(example2(), 6, "reinject")
    words = sample_words(m, 100_000, 1, seed=11)[:, 0]
    n = len(words)
    for s in range(m.n_explicit + 1):
        p = float(m.lam[s])
        freq = np.mean(words == s)
        assert abs(freq - p) <= 3 * np.sqrt(p * (1 - p) / n) + 1e-12


def test_words_csv_header():
    _, m = model(example1(), 3)
    text = words_to_csv(m, [[0, 0, 1]])
    assert text.splitlines()[0] == "word_id,word"
