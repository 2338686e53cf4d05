"""The acceptance gate: one check per criterion, each returning pass/fail and a
one-line measurement."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from .discrepancies import audit, discrepancies
from .escape import (birkhoff_check, count_preimages_numeric, exponents_for,
                     itinerary_escape_law_check, topological_degree)
from .fixtures import example1, example2, example3, example4
from .gclass import compose_g
from .green_weights import lambda_table, partial_sum_check, symbolic_lambda
from .orbit_lab import (build_boxes, certify_tree, example3_boxes, example3_mass_collapse,
                        example3_region_check, horizontal_like_certificate)
from .sphere_dyn import build_etree
from .subshift import (build_model, cylinder_measure, transitivity_check, verify_invariance)

EXAMPLE4_PARAMS = ((1, 1, 1), (2, 1, 3), (1, 4, 2))


@dataclass
class Result:
    number: int
    title: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.number:2d}. {self.title}: {self.detail}"


def all_fixtures():
    return {"example1": example1(), "example2": example2(), "example3": example3(),
            "example4": example4()}


def _model(f, depth, rest_mode="absorb"):
    tree = build_etree(f, depth)
    table = lambda_table(tree, f)
    return tree, table, build_model(f, tree, table, rest_mode)


def c01_example2_matrix():
    want = [[Fraction(1, 3), Fraction(4, 9), Fraction(4, 27), Fraction(4, 81)],
            [Fraction(1, 2), Fraction(1, 3), Fraction(1, 9), Fraction(1, 27)]]
    _, _, m = _model(example2(), 6)
    exact = [[m.rows[i].get(j, 0) for j in range(4)] for i in range(2)]
    _, _, mf = _model(example2().to_float(), 6)
    dense = mf.dense(as_float=True)
    err = max(abs(dense[i][j] - float(want[i][j])) for i in range(2) for j in range(4))
    ok = exact == want and err <= 1e-12
    return ok, f"rational exact={exact == want}, float max error {err:.1e}"


def c02_example1_matrix():
    _, _, m = _model(example1(), 6)
    row = [m.rows[0].get(j, 0) for j in range(6)]
    sub = all(m.rows[k].get(k - 1, 0) == 1 for k in range(1, m.n_explicit))
    ok = row == [Fraction(1, 2**(k + 1)) for k in range(6)] and sub
    return ok, f"first row {[str(x) for x in row]}, subdiagonal ones={sub}"


def c03_example4_matrix():
    parts = []
    ok = True
    for n1, n2, n in EXAMPLE4_PARAMS:
        f = example4(n1, n2, n)
        tree, table, m = _model(f, 2)
        m = build_model(f, tree, table, depth=0)
        D = n1 + n2 + n
        idx = {tree.nodes[nid].indet_index: k for k, nid in enumerate(m.node_ids)}
        A = [[m.rows[idx[i]].get(idx[j], 0) for j in range(2)] for i in range(2)]
        want = [[Fraction(n1 + n, D), Fraction(n2, D)], [Fraction(n1, D), Fraction(n2 + n, D)]]
        inv = verify_invariance(m)
        good = A == want and inv["eigen_dev"] == 0 and m.lam[idx[0]] == Fraction(n1, n1 + n2)
        ok &= good
        parts.append(f"{(n1, n2, n)}:{'ok' if good else 'BAD'}")
    return ok, ", ".join(parts) + " (eigen identity exact)"


def c04_partial_sums():
    worst = Fraction(0)
    for f in all_fixtures().values():
        tree = build_etree(f, 7)
        table = lambda_table(tree, f, n_max=8)
        for n in range(9):
            worst = max(worst, partial_sum_check(table, n))
    return worst == 0, f"max |sum_p lambda_(p,n) - (1 - (d'/D)^n)| over n <= 8 = {worst}"


def c05_symbolic_oracle():
    bad = []
    for name, f in all_fixtures().items():
        tree = build_etree(f, 4)
        table = lambda_table(tree, f)
        for n in (1, 2):
            sym, unmatched = symbolic_lambda(f, tree, n)
            if unmatched or sym != [s[n] for s in table.seq]:
                bad.append(f"{name}@{n}")
    return not bad, "all fixtures agree at n = 1, 2" if not bad else f"mismatch {bad}"


def c06_topological_degree():
    import warnings
    f = example3()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        dt = topological_degree(f, exponents_for(f))
        cnt = count_preimages_numeric(f, (0, 1))
        gaps = {}
        for name, g in all_fixtures().items():
            gaps[name] = topological_degree(g, exponents_for(g)) - g.D
    ok = dt == 8 and cnt == 8 and all(v > 0 for v in gaps.values())
    return ok, f"formula {dt}, preimage count {cnt}, d_t - D per fixture {gaps}"


def c07_region():
    rep = example3_region_check(100_000, seed=0)
    ok = rep["violations"] == 0 and rep["worst_margin"] > 0
    return ok, f"{rep['violations']} violations in {rep['samples']} samples, worst margin {rep['worst_margin']:.3e}"


def c08_mass_collapse():
    rep = example3_mass_collapse(20)
    bound = Fraction(2, 3) ** 20
    ok = rep["m2"] <= bound and rep["m1"] >= 1 - bound
    return ok, f"m2 = {float(rep['m2']):.3e} <= {float(bound):.3e}, m1 = {float(rep['m1']):.6f}"


def _admissible_words(m, max_len):
    succ = [[j for j in range(m.n_explicit) if m.degrees[i].get(j, 0)] for i in range(m.n_explicit)]
    frontier = [[s] for s in range(m.n_explicit)]
    for _ in range(max_len):
        yield from frontier
        frontier = [w + [j] for w in frontier for j in succ[w[-1]]]


def c09_subshift_sanity():
    depth = 8
    parts = []
    ok = True
    for name in ("example1", "example2", "example4"):
        f = all_fixtures()[name]
        tree, table, m = _model(f, depth)
        inv = verify_invariance(m)
        explicit_rows = max(abs(1 - sum(m.rows[i].values(), Fraction(0))) for i in range(m.n_explicit))
        trunc = Fraction(f.dprime, f.D) ** depth
        words = list(_admissible_words(m, 6))
        agree = all(cylinder_measure(m, w)["agree"] for w in words)
        good = float(explicit_rows) <= 1e-12 and inv["eigen_dev"] <= trunc and agree
        ok &= good
        parts.append(f"{name}: eigen dev {float(inv['eigen_dev']):.1e} <= {float(trunc):.1e}, "
                     f"{len(words)} words agree={agree}")
    return ok, "; ".join(parts)


def c10_transitivity():
    _, _, m = _model(example1(), 5)
    rep = transitivity_check(m)
    ok = rep["all_reachable"] and rep["schedule_ok"] and rep["matches_schedule"]
    return ok, (f"all reachable={rep['all_reachable']}, (A^(depth(p)+1))_pq > 0 for all pairs="
                f"{rep['schedule_ok']}, least n matches the descent schedule={rep['matches_schedule']}")


def c11_birkhoff():
    f = example1()
    tree, table, m = _model(f, 8, "reinject")
    rep = birkhoff_check(f, tree, m, table, exponents_for(f), n_words=10_000, length=1000, seed=0)
    ok = rep["within_tol"] and rep["mc_halves"]
    return ok, (f"relative error {rep['relative_error']:.2e} (<= 2%), "
                f"stderr ratio N/4 vs N {rep['stderr_ratio']:.3f} (2 +- 30%)")


_ESCAPE_CACHE = {}


def _escape_law():
    if "rep" not in _ESCAPE_CACHE:
        f = example1()
        tree, table, m = _model(f, 5)
        boxes = build_boxes(f, tree)
        _ESCAPE_CACHE["rep"] = itinerary_escape_law_check(f, m, tree, boxes, exponents_for(f),
                                                           word_length=26, n_orbits=50, seed=0)
    return _ESCAPE_CACHE["rep"]


def c12_escape_law():
    rep = _escape_law()
    env = ", ".join(f"C_{n}={c:.3f}" for n, c in rep.envelope.items())
    return rep.stable, f"C_fit={rep.C_fit:.3f}; {env} (each within 50%)"


def c13_semi_conjugacy():
    rep = _escape_law()
    return rep.semi_conjugate, (f"{len(rep.orbits)} orbits, shift(itinerary(q)) == itinerary(f(q)): "
                                f"{rep.semi_conjugate}; max step residual {rep.max_residual:.1e}")


def c14_degree_laws():
    fx = all_fixtures()
    comp_ok = all(compose_g(a, b).D == a.D * b.D
                  for a, b in itertools.product(list(fx.values())[:3], repeat=2))
    n_pairs, bad = 0, []
    for name in ("example1", "example2"):
        f = fx[name]
        tree = build_etree(f, 3)
        for c in certify_tree(f, tree, build_boxes(f, tree)):
            n_pairs += 1
            if c["slice_degree"] != c["transition_degree"]:
                bad.append((name, c["p"], c["q"]))
    f = fx["example3"]
    bx = example3_boxes()
    tree = build_etree(f, 2)
    from .subshift import transition_degree
    expected = {(1, 0): transition_degree(f, tree, 0, 0), (1, 2): 1, (2, 2): 2}
    for (a, b), d in expected.items():
        n_pairs += 1
        if horizontal_like_certificate(f, bx[a], bx[b])["slice_degree"] != d:
            bad.append(("example3", a, b))
    ok = comp_ok and not bad
    return ok, f"compose_g degree = D_f D_g: {comp_ok}; {n_pairs} certified pairs, mismatches {bad}"


def c15_typo_ledger():
    claims = audit()
    bad = discrepancies(claims)
    keys = sorted(c.key for c in bad)
    want = ["composition_degree", "example1_lambda", "example2_lambda_pn"]
    ok = keys == want and all(c.correction and c.oracle for c in bad)
    return ok, f"{len(bad)} discrepancies {keys} out of {len(claims)} audited claims"


CRITERIA = [
    (1, "Example 2 matrix", c01_example2_matrix),
    (2, "Example 1 matrix", c02_example1_matrix),
    (3, "Example 4 closed form", c03_example4_matrix),
    (4, "Partial-sum law", c04_partial_sums),
    (5, "Symbolic oracle", c05_symbolic_oracle),
    (6, "Topological degree", c06_topological_degree),
    (7, "Example 3 invariant region", c07_region),
    (8, "Example 3 mass collapse", c08_mass_collapse),
    (9, "Subshift sanity", c09_subshift_sanity),
    (10, "Transitivity", c10_transitivity),
    (11, "Birkhoff escape rate", c11_birkhoff),
    (12, "Itinerary escape law", c12_escape_law),
    (13, "Semi-conjugacy", c13_semi_conjugacy),
    (14, "Degree laws", c14_degree_laws),
    (15, "Printed-value ledger", c15_typo_ledger),
]


def run_one(number: int) -> Result:
    num, title, fn = CRITERIA[number - 1]
    try:
        ok, detail = fn()
    except Exception as exc:       # a crash is a failure with its reason
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    return Result(num, title, bool(ok), detail)


def run_all() -> list:
    return [run_one(k) for k in range(1, len(CRITERIA) + 1)]
