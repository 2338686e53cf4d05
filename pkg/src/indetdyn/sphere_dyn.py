"""Dynamics of the restriction map on the line at infinity.

Points of the projective line are stored as normalized pairs ``[z : w]``;
the affine coordinate used in reports is ``u = z / w``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CapExceeded, DegenerateInput
from .numbers import GaussQ, encode_pair, exactify, is_exact
from .polyalg import (EPS_CLUSTER, HomPoly, chordal, hom_gcd, hom_roots,
                      normalize_pair)

EPS_MATCH = 1e-9


@dataclass(frozen=True)
class ProjPoint:
    """A point ``[z : w]`` of the projective line, canonically normalized."""

    z: object
    w: object

    @classmethod
    def make(cls, z, w) -> "ProjPoint":
        z, w = normalize_pair(z, w)
        return cls(z, w)

    @classmethod
    def from_u(cls, u) -> "ProjPoint":
        if u == math.inf:
            return cls.make(1, 0)
        return cls.make(u, 1)

    @property
    def exact(self) -> bool:
        return is_exact(self.z) and is_exact(self.w)

    @property
    def u(self):
        """Affine coordinate z/w (``math.inf`` at [1:0])."""
        if self.w == 0:
            return math.inf
        return self.z / self.w

    def to_complex(self):
        return complex(self.z), complex(self.w)

    def dist(self, other: "ProjPoint") -> float:
        if self.exact and other.exact:
            if self.z * other.w == other.z * self.w:
                return 0.0
        return chordal((self.z, self.w), (other.z, other.w))

    def close(self, other: "ProjPoint", eps: float = EPS_MATCH) -> bool:
        if self.exact and other.exact:
            return self.z * other.w == other.z * self.w
        return self.dist(other) <= eps

    def to_json(self):
        return [encode_pair(self.z), encode_pair(self.w)]

    def label(self) -> str:
        u = self.u
        if u == math.inf:
            return "inf"
        if isinstance(u, GaussQ):
            from .numbers import format_gauss
            return format_gauss(u)
        u = complex(u)
        if u.imag == 0:
            return f"{u.real:.12g}"
        return f"{u.real:.12g}{u.imag:+.12g}i"


@dataclass(frozen=True)
class RatMap1D:
    """``[z : w] -> [num(z, w) : den(z, w)]`` with coprime components."""

    num: HomPoly
    den: HomPoly

    def __post_init__(self):
        if self.num.degree != self.den.degree:
            raise DegenerateInput("components of different degree")

    @property
    def degree(self) -> int:
        return self.num.degree

    @property
    def exact(self) -> bool:
        return self.num.exact and self.den.exact

    def to_float(self) -> "RatMap1D":
        return RatMap1D(self.num.to_float(), self.den.to_float())

    def __call__(self, p: ProjPoint) -> ProjPoint:
        if self.exact and p.exact:
            z, w = exactify(p.z), exactify(p.w)
        else:
            z, w = complex(p.z), complex(p.w)
        return ProjPoint.make(self.num(z, w), self.den(z, w))

    def check_coprime(self) -> bool:
        return hom_gcd(self.num, self.den).degree == 0

    def fiber_form(self, q: ProjPoint) -> HomPoly:
        """The form ``w_q * num - z_q * den`` whose zeros are the preimages of q."""
        if not (self.exact and q.exact):
            m = self.to_float()
            return m.num * complex(q.w) - m.den * complex(q.z)
        return self.num * exactify(q.w) - self.den * exactify(q.z)

    def derivative_u(self, u):
        """Derivative of the affine map ``u -> num(u,1)/den(u,1)``."""
        a = np.polynomial.polynomial
        n = np.array([complex(c) for c in self.num.coeffs])
        d = np.array([complex(c) for c in self.den.coeffs])
        nv, dv = a.polyval(u, n), a.polyval(u, d)
        return (a.polyval(u, a.polyder(n)) * dv - nv * a.polyval(u, a.polyder(d))) / dv**2


def preimages(g: RatMap1D, q: ProjPoint, eps_cluster: float = EPS_CLUSTER):
    """Preimages of ``q`` with multiplicity; multiplicities sum to deg g."""
    form = g.fiber_form(q)
    pts, _ = hom_roots(form, eps_cluster)
    out = [(ProjPoint.make(*pt), m) for pt, m in pts]
    if sum(m for _, m in out) != g.degree:
        raise DegenerateInput("preimage multiplicities do not add up to the degree")
    return out


def local_degree(g: RatMap1D, p: ProjPoint, eps_cluster: float = EPS_CLUSTER,
                 eps_match: float = EPS_MATCH) -> int:
    """Vanishing order of ``g - g(p)`` at ``p``."""
    q = g(p)
    best = None
    for pt, m in preimages(g, q, eps_cluster):
        d = pt.dist(p)
        if best is None or d < best[0]:
            best = (d, m)
    if best is None or best[0] > max(eps_match, 10 * eps_cluster):
        raise DegenerateInput("point not found among the preimages of its image")
    return best[1]


# ---------------------------------------------------------------------------
# preimage tree
# ---------------------------------------------------------------------------

@dataclass
class Incidence:
    """``f_inf^n(node) = I_j`` with chain multiplicity ``mu``."""

    n: int
    target: int
    mu: int
    via: int | None   # node id of the image at step 1 (None at n = 0)


@dataclass
class ENode:
    id: int
    point: ProjPoint
    depth: int
    parent_id: int | None = None
    edge_mult: int = 0           # local degree of f_inf at this node
    indet_index: int | None = None
    is_collision: bool = False
    records: list = field(default_factory=list)

    @property
    def is_indeterminate(self) -> bool:
        return self.indet_index is not None


@dataclass
class ETree:
    nodes: list
    depth_max: int
    indet: list              # [(ProjPoint, alpha)]
    dprime: int
    D: int
    cap_exceeded: bool = False
    residual_report: dict = field(default_factory=dict)

    def by_depth(self, n: int):
        return [nd for nd in self.nodes if nd.depth == n]

    def find(self, p: ProjPoint, eps: float = EPS_MATCH):
        for nd in self.nodes:
            if nd.point.close(p, eps):
                return nd
        return None

    def children(self, node_id: int):
        return [nd for nd in self.nodes if nd.parent_id == node_id and nd.id != node_id]

    def to_json(self):
        out = []
        for nd in self.nodes:
            out.append({
                "id": nd.id,
                "depth": nd.depth,
                "point": nd.point.to_json(),
                "u": nd.point.label(),
                "parent_id": nd.parent_id,
                "edge_mult": nd.edge_mult,
                "flags": {"is_indeterminate": nd.is_indeterminate,
                          "is_collision": nd.is_collision},
                "incidences": [[r.n, r.target, r.mu] for r in nd.records],
            })
        return {"depth_max": self.depth_max, "cap_exceeded": self.cap_exceeded,
                "residual": self.residual_report, "nodes": out}

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["id", "depth", "u_re", "u_im", "parent_id", "edge_mult",
                     "is_indeterminate", "is_collision", "n_incidences"])
        for nd in self.nodes:
            u = nd.point.u
            ur, ui = (math.inf, 0.0) if u == math.inf else (complex(u).real, complex(u).imag)
            wr.writerow([nd.id, nd.depth, repr(ur), repr(ui),
                         "" if nd.parent_id is None else nd.parent_id,
                         nd.edge_mult, int(nd.is_indeterminate), int(nd.is_collision),
                         len(nd.records)])
        return buf.getvalue()


def default_depth(dprime: int, D: int, target: float = 1e-6) -> int:
    """Smallest depth with (d'/D)^depth below ``target``."""
    return max(1, math.ceil(math.log(target) / math.log(dprime / D)))


def build_etree(f, depth_max: int | None = None, node_cap: int = 5000,
                eps_match: float = EPS_MATCH, eps_cluster: float = EPS_CLUSTER) -> ETree:
    """Breadth-first preimage tree of the indeterminacy set of ``f``.

    Every node carries one incidence record per time ``n`` at which its
    forward orbit lands on an indeterminacy point; preperiodic points get
    several records but are stored once.
    """
    g = f.f_inf()
    indet = [(pt.point, pt.alpha) for pt in f.indeterminacy()]
    if depth_max is None:
        depth_max = default_depth(f.dprime, f.D)
    nodes: list[ENode] = []

    def lookup(p):
        for nd in nodes:
            if nd.point.close(p, eps_match):
                return nd
        return None

    frontier = []
    for j, (p, _alpha) in enumerate(indet):
        nd = ENode(id=len(nodes), point=p, depth=0, indet_index=j)
        nd.records.append(Incidence(0, j, 1, None))
        nodes.append(nd)
        frontier.append((nd.id, 0))

    pre_cache: dict[int, list] = {}
    capped = False
    unexpanded = 0
    for n in range(depth_max):
        nxt = []
        for node_id, rec_idx in frontier:
            parent = nodes[node_id]
            rec = parent.records[rec_idx]
            if node_id not in pre_cache:
                pre_cache[node_id] = preimages(g, parent.point, eps_cluster)
            for pt, mult in pre_cache[node_id]:
                child = lookup(pt)
                if child is None:
                    if len(nodes) >= node_cap:
                        capped = True
                        unexpanded += 1
                        continue
                    child = ENode(id=len(nodes), point=pt, depth=n + 1)
                    nodes.append(child)
                if child.parent_id is None:
                    child.parent_id = parent.id
                    child.edge_mult = mult
                if child.is_indeterminate:
                    child.is_collision = True
                child.records.append(Incidence(n + 1, rec.target, rec.mu * mult, parent.id))
                nxt.append((child.id, len(child.records) - 1))
        frontier = nxt
    # local degree of the roots at their own image, when the image lies in E
    for nd in nodes:
        if nd.parent_id is None:
            nd.edge_mult = local_degree(g, nd.point, eps_cluster, eps_match)
    tree = ETree(nodes=nodes, depth_max=depth_max, indet=indet, dprime=f.dprime, D=f.D,
                 cap_exceeded=capped,
                 residual_report={"unexpanded_preimages": unexpanded,
                                  "node_cap": node_cap})
    return tree


def build_etree_checked(f, depth_max=None, node_cap=5000, **kw) -> ETree:
    """Like :func:`build_etree` but raises when the node cap truncates the tree."""
    tree = build_etree(f, depth_max, node_cap, **kw)
    if tree.cap_exceeded:
        raise CapExceeded(f"node cap {node_cap} reached; {tree.residual_report}")
    return tree


# ---------------------------------------------------------------------------
# hypothesis checks
# ---------------------------------------------------------------------------

def _tame(x: ProjPoint, max_bits: int = 600) -> ProjPoint:
    """Drop to floating point once exact orbit coordinates blow up."""
    if not x.exact:
        return x
    parts = (x.z.re, x.z.im, x.w.re, x.w.im)
    if max(max(abs(q.numerator), q.denominator).bit_length() for q in parts) > max_bits:
        return ProjPoint.make(complex(x.z), complex(x.w))
    return x


@dataclass
class PeriodicityReport:
    index: int
    status: str          # Periodic | HitsIndeterminacy | Clear
    k: int
    hit: int | None = None

    def to_json(self):
        return {"index": self.index, "status": self.status, "k": self.k, "hit": self.hit}


def periodicity_check(f, horizon: int = 50, eps_match: float = EPS_MATCH):
    """Forward-orbit status of every indeterminacy point up to ``horizon``."""
    g = f.f_inf()
    pts = [ip.point for ip in f.indeterminacy()]
    out = []
    for j, p in enumerate(pts):
        x = p
        status = PeriodicityReport(j, "Clear", horizon)
        for k in range(1, horizon + 1):
            x = _tame(g(x))
            if x.close(p, eps_match):
                status = PeriodicityReport(j, "Periodic", k)
                break
            hit = next((i for i, q in enumerate(pts) if i != j and x.close(q, eps_match)), None)
            if hit is not None:
                status = PeriodicityReport(j, "HitsIndeterminacy", k, hit)
                break
        out.append(status)
    return out


def first_hit(f, j: int, horizon: int = 200, eps_match: float = EPS_MATCH):
    """First ``k >= 1`` with ``f_inf^k(I_j)`` an indeterminacy point.

    Returns ``(k, i, mu)`` with ``mu`` the product of local degrees along the
    orbit segment, or None when no hit occurs within the horizon.
    """
    g = f.f_inf()
    pts = [ip.point for ip in f.indeterminacy()]
    x = pts[j]
    mu = 1
    for k in range(1, horizon + 1):
        mu *= local_degree(g, x)
        x = _tame(g(x))
        hit = next((i for i, q in enumerate(pts) if x.close(q, eps_match)), None)
        if hit is not None:
            return k, hit, mu
    return None


def _mobius_class(g: RatMap1D):
    a, b = complex(g.num.coeffs[1]), complex(g.num.coeffs[0])
    c, d = complex(g.den.coeffs[1]), complex(g.den.coeffs[0])
    det = a * d - b * c
    tr2 = (a + d) ** 2 / det
    if abs(tr2.imag) > 1e-12 or tr2.real > 4 + 1e-12 or tr2.real < 0:
        kind = "loxodromic"
    elif abs(tr2.real - 4) <= 1e-12:
        kind = "parabolic"
    else:
        kind = "elliptic"
    return kind


def _find_cycle(g: RatMap1D, x: ProjPoint, iters: int, max_period: int = 12, tol: float = 1e-10):
    orbit = [x]
    for _ in range(iters):
        orbit.append(g(orbit[-1]))
    tail = orbit[-(max_period + 1):]
    last = tail[-1]
    for per in range(1, max_period + 1):
        if last.dist(orbit[-1 - per]) <= tol:
            return per, orbit[-1 - per:-1]
    return None, None


def _cycle_multiplier(g: RatMap1D, cycle) -> complex:
    """Multiplier of a cycle, computed in the chart where each point is finite."""
    mult = 1.0 + 0j
    for p in cycle:
        z, w = p.to_complex()
        if abs(w) >= abs(z):
            mult *= complex(g.derivative_u(z / w))
        else:
            # conjugate by u -> 1/u: derivative of 1/g(1/s) at s = w/z
            s = w / z
            gi = RatMap1D(HomPoly(g.degree, list(reversed(g.den.coeffs))),
                          HomPoly(g.degree, list(reversed(g.num.coeffs))))
            # gi(s) = 1/g(1/s) is given by swapping roles of z and w in both forms
            mult *= complex(gi.derivative_u(s))
    return mult


def hyperbolicity_probe(g: RatMap1D, iters: int = 500):
    """Heuristic: do critical orbits settle on attracting cycles?"""
    if g.degree == 1:
        kind = _mobius_class(g)
        return {"degree": 1, "mobius_class": kind, "hyperbolic_like": kind == "loxodromic",
                "critical_points": []}
    gf = g.to_float()
    # critical points: zeros of the Wronskian num_z den_w - num_w den_z
    n = gf.degree
    num, den = gf.num.coeffs, gf.den.coeffs
    dz = lambda c: HomPoly(n - 1, [(k + 1) * c[k + 1] for k in range(n)])
    dw = lambda c: HomPoly(n - 1, [(n - k) * c[k] for k in range(n)])
    wr = dz(num) * dw(den) - dw(num) * dz(den)
    pts, _ = hom_roots(wr, 1e-6)
    crit = []
    for pt, m in pts:
        cp = ProjPoint.make(*pt)
        per, cycle = _find_cycle(gf, cp, iters)
        if per is None:
            crit.append({"point": cp.label(), "multiplicity": m, "status": "Inconclusive"})
            continue
        mult = _cycle_multiplier(gf, cycle)
        ok = abs(mult) < 1 - 1e-6
        crit.append({"point": cp.label(), "multiplicity": m,
                     "status": "Converged" if ok else "Inconclusive",
                     "period": per, "multiplier_abs": abs(mult),
                     "cycle": [c.label() for c in cycle]})
    return {"degree": n, "critical_points": crit,
            "hyperbolic_like": all(c["status"] == "Converged" for c in crit)}
