"""Weights of the Green current trace on the line at infinity.

``lambda_{p,n} = mult_p(f^n) / D^n`` is accumulated from the incidence records
of the preimage tree: each time ``n`` at which the orbit of ``p`` lands on an
indeterminacy point ``I_j`` with chain multiplicity ``mu`` contributes
``alpha_j * mu / D^(n+1)``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import OrbitHitsE, TreeTooShallow
from .numbers import GaussQ, format_fraction
from .polyalg import compose_pair, hom_factor_linear, hom_gcd
from .sphere_dyn import EPS_MATCH, ETree, ProjPoint, first_hit


@dataclass
class WeightTable:
    points: list                 # ProjPoint per node id
    seq: list                    # seq[id][n] = lambda_{p,n}, n = 0..n_max (Fractions)
    limit: list                  # exact limit lambda_p (Fraction) per node
    stab_depth: list             # first n with |limit - lambda_{p,n}| <= stab_tol (or None)
    n_max: int
    D: int
    dprime: int
    tree: ETree = field(repr=False, default=None)
    horizon: int = 200

    def partial_sum(self, n: int) -> Fraction:
        return sum((s[n] for s in self.seq), Fraction(0))

    def residual(self, n: int | None = None) -> Fraction:
        return 1 - self.partial_sum(self.n_max if n is None else n)

    def limit_residual(self) -> Fraction:
        """Mass of the limit weights outside the explicit tree."""
        return 1 - sum(self.limit, Fraction(0))

    def to_json(self):
        rows = []
        for k, p in enumerate(self.points):
            rows.append({"id": k, "u": p.label(),
                         "lambda_n": format_fraction(self.seq[k][self.n_max]),
                         "lambda_limit": format_fraction(self.limit[k]),
                         "lambda_limit_float": float(self.limit[k]),
                         "stabilization_depth": self.stab_depth[k]})
        return {"n_max": self.n_max, "D": self.D, "dprime": self.dprime,
                "residual": format_fraction(self.residual()),
                "limit_residual": format_fraction(self.limit_residual()),
                "atoms": rows}

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["id", "u_re", "u_im", "lambda_n", "lambda_limit", "stabilization_depth"])
        for k, p in enumerate(self.points):
            u = p.u
            ur, ui = (math.inf, 0.0) if u == math.inf else (complex(u).real, complex(u).imag)
            wr.writerow([k, repr(ur), repr(ui), repr(float(self.seq[k][self.n_max])),
                         repr(float(self.limit[k])),
                         "" if self.stab_depth[k] is None else self.stab_depth[k]])
        return buf.getvalue()


def _solve_fraction(M, rhs):
    """Solve ``(I - M) x = rhs`` exactly."""
    n = len(rhs)
    a = [[(Fraction(int(i == j)) - M[i][j]) for j in range(n)] + [rhs[i]] for i in range(n)]
    for col in range(n):
        piv = next(r for r in range(col, n) if a[r][col] != 0)
        a[col], a[piv] = a[piv], a[col]
        pv = a[col][col]
        a[col] = [x / pv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                fac = a[r][col]
                a[r] = [x - fac * y for x, y in zip(a[r], a[col])]
    return [a[i][n] for i in range(n)]


def indet_limits(f, horizon: int = 200, eps_match: float = EPS_MATCH):
    """Exact ``lambda_{I_j}``: solve ``L_j = alpha_j/D + mu/D^k * L_i`` where
    ``I_j`` first lands on ``I_i`` after ``k`` steps."""
    pts = f.indeterminacy()
    D = f.D
    m = len(pts)
    M = [[Fraction(0)] * m for _ in range(m)]
    rhs = [Fraction(ip.alpha, D) for ip in pts]
    hits = []
    for j in range(m):
        hit = first_hit(f, j, horizon, eps_match)
        hits.append(hit)
        if hit is not None:
            k, i, mu = hit
            M[j][i] += Fraction(mu, D**k)
    return _solve_fraction(M, rhs), hits


def lambda_table(tree: ETree, f, n_max: int | None = None, stab_tol: float = 1e-12,
                 horizon: int = 200) -> WeightTable:
    """Truncated sequences ``lambda_{p,n}`` (n <= n_max) and exact limits."""
    if n_max is None:
        n_max = tree.depth_max + 1
    if n_max > tree.depth_max + 1:
        raise TreeTooShallow(f"tree depth {tree.depth_max} cannot support n_max = {n_max}")
    D = f.D
    alphas = [ip.alpha for ip in f.indeterminacy()]
    seq = []
    for nd in tree.nodes:
        inc = [Fraction(0)] * (n_max + 1)
        for r in nd.records:
            if r.n + 1 <= n_max:
                inc[r.n + 1] += Fraction(alphas[r.target] * r.mu, D ** (r.n + 1))
        s, acc = [], Fraction(0)
        for x in inc:
            acc += x
            s.append(acc)
        seq.append(s)
    L, _ = indet_limits(f, horizon)
    limit = []
    for nd in tree.nodes:
        if nd.is_indeterminate:
            limit.append(L[nd.indet_index])
            continue
        # walk to the first indeterminacy point on the forward orbit
        mu, k, cur = 1, 0, nd
        while not cur.is_indeterminate:
            mu *= cur.edge_mult
            k += 1
            cur = tree.nodes[cur.parent_id]
        limit.append(Fraction(mu, D**k) * L[cur.indet_index])
    stab = []
    for s, lim in zip(seq, limit):
        hit = next((n for n in range(n_max + 1) if abs(float(lim - s[n])) <= stab_tol), None)
        stab.append(hit)
    return WeightTable([nd.point for nd in tree.nodes], seq, limit, stab, n_max, D,
                       f.dprime, tree, horizon)


def partial_sum_check(table: WeightTable, n: int):
    """``|sum_p lambda_{p,n} - (1 - (d'/D)^n)|`` (exact Fraction)."""
    if n > table.n_max:
        raise TreeTooShallow(f"table built to n = {table.n_max}")
    expected = 1 - Fraction(table.dprime, table.D) ** n
    return abs(table.partial_sum(n) - expected)


@dataclass
class TraceMeasure:
    atoms: list          # [(ProjPoint, Fraction)]
    residual: Fraction

    def to_json(self):
        return {"atoms": [{"u": p.label(), "weight": format_fraction(w), "weight_float": float(w)}
                          for p, w in self.atoms],
                "residual": format_fraction(self.residual)}


def trace_measure(table: WeightTable) -> TraceMeasure:
    """Atoms with their weights at the truncation depth plus unattributed mass."""
    atoms = [(p, s[table.n_max]) for p, s in zip(table.points, table.seq) if s[table.n_max] > 0]
    return TraceMeasure(atoms, table.residual())


def _atom_form(p: ProjPoint, z, w) -> float:
    """``|z_p w - w_p z|``: the normalized linear form vanishing at ``p``."""
    zp, wp = p.to_complex()
    return abs(zp * w - wp * z)


def green_potential_infinity(table: WeightTable, q: ProjPoint, positive_part: bool = False,
                             eps_match: float = EPS_MATCH):
    """``sum_p lambda_p log|z_p w - w_p z| - 1/2 log(|z|^2 + |w|^2)`` at ``q``.

    Uses the limit weights; the unattributed mass ``r`` is reported with the
    upper bound ``r * log 2`` on its contribution.  ``positive_part`` applies
    log+ to the product instead of log.
    """
    z, w = q.to_complex()
    logsum = 0.0
    for p, lam in zip(table.points, table.limit):
        if p.dist(q) <= eps_match:
            return {"value": -math.inf, "at_atom": True, "residual_mass": float(table.limit_residual())}
        logsum += float(lam) * math.log(_atom_form(p, z, w))
    if positive_part:
        logsum = max(logsum, 0.0)
    val = logsum - 0.5 * math.log(abs(z) ** 2 + abs(w) ** 2)
    r = float(table.limit_residual())
    return {"value": val, "at_atom": False, "residual_mass": r,
            "residual_upper_bound": r * math.log(2.0)}


def green_potential_convergence_check(f, q: ProjPoint, n_max: int = 20,
                                      eps_hit: float = 1e-13):
    """Approximants ``D^{-n} log||(f^+)^n(z, w)|| - 1/2 log(|z|^2+|w|^2)``.

    ``f^+`` is the top homogeneous part; its n-th iterate is the top part of
    ``f^n`` (algebraic stability), so these are the restrictions of the
    approximants to the line at infinity.  Iteration is carried in the log
    domain: ``x = e^s y`` with ``||y|| = 1``.
    """
    t1, t2 = (h.to_float() for h in f.top_form())
    D = f.D
    z, w = q.to_complex()
    nrm = math.hypot(abs(z), abs(w))
    y = np.array([z / nrm, w / nrm])
    s = math.log(nrm)
    base = 0.5 * math.log(abs(z) ** 2 + abs(w) ** 2)
    out = [s - base]
    for n in range(1, n_max + 1):
        img = np.array([t1(*y), t2(*y)])
        m = float(np.linalg.norm(img))
        if m <= eps_hit:
            raise OrbitHitsE(f"orbit meets an indeterminacy point at step {n}")
        s = D * s + math.log(m)
        y = img / m
        out.append(s / D**n - base)
    return out


# ---------------------------------------------------------------------------
# symbolic oracle
# ---------------------------------------------------------------------------

def iterate_polys(f, n: int):
    """Components of ``f^n`` by repeated substitution."""
    comps = f.components()
    cur = comps
    for _ in range(n - 1):
        cur = compose_pair(comps, cur)
    return cur


def symbolic_multiplicities(f, n: int):
    """``{ProjPoint: mult_p(f^n)}`` from the gcd of the top parts of ``f^n``."""
    if n == 0:
        return {}
    f1, f2 = iterate_polys(f, n)
    Dn = f.D ** n
    g = hom_gcd(f1.hom_part(Dn), f2.hom_part(Dn))
    if g.degree == 0:
        return {}
    return {ProjPoint.make(fac.b, fac.a): fac.alpha for fac in hom_factor_linear(g)}


def symbolic_lambda(f, tree: ETree, n: int):
    """``lambda_{p,n}`` per tree node, read off ``f^n`` directly."""
    mults = symbolic_multiplicities(f, n)
    out = [Fraction(0)] * len(tree.nodes)
    unmatched = 0
    for p, m in mults.items():
        nd = tree.find(p)
        if nd is None:
            unmatched += m
            continue
        out[nd.id] = Fraction(m, f.D ** n)
    return out, unmatched
