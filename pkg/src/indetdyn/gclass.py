"""Polynomial maps with an attracting line at infinity in normal form.

A map is stored as ``f_i = G * P_i + Q_i`` with ``G = prod (a_j z - b_j w)^alpha_j``,
``P1, P2`` coprime forms of degree d' and ``deg Q_i < D = d + d'``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (ConstantAtInfinity, DegenerateInput, IndeterminateEvaluation,
                     NoIndeterminacy, NotInClass)
from .numbers import is_exact
from .polyalg import (EPS_CLUSTER, BiPoly, HomPoly, LinearFactor, chordal,
                      compose_pair, factor_constant, hom_divide, hom_factor_linear, hom_from_factors,
                      hom_gcd)
from .sphere_dyn import EPS_MATCH, ProjPoint, RatMap1D

CHARTS = ("affine", "u_v", "uprime_vprime")


@dataclass(frozen=True)
class IndetPoint:
    point: ProjPoint
    alpha: int

    def to_json(self):
        return {"point": self.point.to_json(), "u": self.point.label(), "alpha": self.alpha}


@dataclass(frozen=True)
class GMap:
    factors: tuple
    P1: HomPoly
    P2: HomPoly
    Q1: BiPoly
    Q2: BiPoly

    def __post_init__(self):
        if self.P1.degree != self.P2.degree or self.P1.degree < 1:
            raise NotInClass("P1, P2 must be forms of equal degree >= 1")
        if not self.factors:
            raise NoIndeterminacy("empty factor list")
        for k, a in enumerate(self.factors):
            for b in self.factors[k + 1:]:
                if chordal(a.point, b.point) <= 1e-9:
                    raise NotInClass("proportional linear factors")
        if self.Q1.degree >= self.D or self.Q2.degree >= self.D:
            raise NotInClass("lower-order parts must have degree < D")

    # -- degrees ------------------------------------------------------------
    @property
    def d(self) -> int:
        return sum(fac.alpha for fac in self.factors)

    @property
    def dprime(self) -> int:
        return self.P1.degree

    @property
    def D(self) -> int:
        return self.d + self.dprime

    @property
    def exact(self) -> bool:
        return (self.P1.exact and self.P2.exact and self.Q1.exact and self.Q2.exact
                and all(is_exact(fac.a) and is_exact(fac.b) for fac in self.factors))

    # -- derived objects ----------------------------------------------------
    def G(self) -> HomPoly:
        return hom_from_factors(self.factors)

    def components(self):
        g = self.G()
        return ((g * self.P1).to_bipoly() + self.Q1, (g * self.P2).to_bipoly() + self.Q2)

    def f_inf(self) -> RatMap1D:
        return RatMap1D(self.P1, self.P2)

    def indeterminacy(self):
        return [IndetPoint(ProjPoint.make(fac.b, fac.a), fac.alpha) for fac in self.factors]

    def top_form(self):
        g = self.G()
        return g * self.P1, g * self.P2

    def to_float(self) -> "GMap":
        facs = tuple(LinearFactor(complex(x.a), complex(x.b), x.alpha) for x in self.factors)
        return GMap(facs, self.P1.to_float(), self.P2.to_float(),
                    self.Q1.to_float(), self.Q2.to_float())

    def __call__(self, z, w):
        f1, f2 = self.components()
        return f1(z, w), f2(z, w)

    # -- serialization ------------------------------------------------------
    def to_json(self):
        return {"factors": [fac.to_json() for fac in self.factors],
                "P1": self.P1.to_json(), "P2": self.P2.to_json(),
                "Q1": self.Q1.to_records(), "Q2": self.Q2.to_records()}

    @classmethod
    def from_json(cls, obj) -> "GMap":
        if "f1" in obj:
            return from_polynomials(BiPoly.from_records(obj["f1"]), BiPoly.from_records(obj["f2"]))
        facs = tuple(LinearFactor.from_json(x) for x in obj["factors"])
        return cls(facs, HomPoly.from_json(obj["P1"]), HomPoly.from_json(obj["P2"]),
                   BiPoly.from_records(obj["Q1"]), BiPoly.from_records(obj["Q2"]))


def from_polynomials(f1: BiPoly, f2: BiPoly, eps_cluster: float = EPS_CLUSTER) -> GMap:
    """Normal form of ``(f1, f2)`` from the gcd of its top homogeneous parts."""
    D = max(f1.degree, f2.degree)
    if D < 1:
        raise DegenerateInput("constant map")
    t1, t2 = f1.hom_part(D), f2.hom_part(D)
    g = hom_gcd(t1, t2, eps_cluster)
    if g.degree == D:
        raise ConstantAtInfinity("top parts are proportional: the line at infinity maps to a point")
    if g.degree == 0:
        raise NoIndeterminacy("top parts are coprime: no indeterminacy point")
    factors = tuple(hom_factor_linear(g, eps_cluster))
    G = hom_from_factors(factors)
    P1, r1 = hom_divide(t1, G)
    P2, r2 = hom_divide(t2, G)
    if r1 > 1e-8 or r2 > 1e-8:
        raise NotInClass(f"gcd does not divide the top parts (remainders {r1:.2e}, {r2:.2e})")
    Q1, Q2 = f1.truncate_below(D), f2.truncate_below(D)
    return GMap(factors, P1, P2, Q1, Q2)


@dataclass
class CriterionReport:
    phi: BiPoly
    deg_phi: int
    required_degree: int
    divisibility_flags: list
    verdict: str

    def to_json(self):
        return {"phi": self.phi.to_records(), "deg_phi": self.deg_phi,
                "required_degree": self.required_degree,
                "divisibility_flags": self.divisibility_flags, "verdict": self.verdict}


def attraction_criterion(f: GMap) -> CriterionReport:
    """Degree and divisibility test on ``phi = f1 P2 - f2 P1``."""
    f1, f2 = f.components()
    phi = f1 * f.P2 - f2 * f.P1
    deg = phi.degree
    flags = []
    if deg >= 0:
        top = phi.hom_part(deg)
        scale = top.max_abs()
        for fac in f.factors:
            val = top(fac.b, fac.a)
            if top.exact and not isinstance(val, complex):
                flags.append(not val)
            else:
                flags.append(abs(complex(val)) <= 1e-9 * scale)
    required = 2 + f.dprime
    if f.D == 2 or (f.d == 1 and f.dprime == 1):
        verdict = "SmallDegreeCase"
    elif deg < required:
        verdict = "FailedDegree"
    elif any(flags):
        verdict = "FailedDivisibility"
    else:
        verdict = "Satisfied"
    return CriterionReport(phi, deg, required, flags, verdict)


def _merge_factors(facs, eps=1e-9):
    out = []
    for fac in facs:
        for k, g in enumerate(out):
            if chordal(g.point, fac.point) <= eps:
                out[k] = LinearFactor(g.a, g.b, g.alpha + fac.alpha)
                break
        else:
            out.append(fac)
    return out


def compose_g(f: GMap, g: GMap, check: bool = True, tol: float = 1e-8) -> GMap:
    """``f o g`` assembled structurally.

    The factor form is ``G_g^{D_f} * G_f(P_g1, P_g2)``; the new pair is
    ``P_f(P_g1, P_g2)``.  With ``check`` the result is compared with direct
    substitution.
    """
    facs = [LinearFactor(x.a, x.b, x.alpha * f.D) for x in g.factors]
    for x in f.factors:
        # a z - b w composed with P_g vanishes on the g_inf-preimages of [b : a]
        form = g.P1 * x.a - g.P2 * x.b
        facs += [LinearFactor(y.a, y.b, y.alpha * x.alpha) for y in hom_factor_linear(form)]
    facs = tuple(_merge_factors(facs))
    G_new = hom_from_factors(facs)
    P1 = f.P1.compose(g.P1, g.P2)
    P2 = f.P2.compose(g.P1, g.P2)
    # the leading constant of the factor product is absorbed into P
    c = factor_constant(f.G().compose(g.P1, g.P2) * (g.G() ** f.D), facs)
    P1, P2 = P1 * c, P2 * c
    full1, full2 = compose_pair(f.components(), g.components())
    D = f.D * g.D
    G_b = G_new.to_bipoly()
    Q1 = full1 - G_b * P1.to_bipoly()
    Q2 = full2 - G_b * P2.to_bipoly()
    if Q1.degree >= D or Q2.degree >= D:
        scale = max(full1.max_abs(), full2.max_abs())
        resid = max(Q1.hom_part(D).max_abs() if Q1.degree >= D else 0.0,
                    Q2.hom_part(D).max_abs() if Q2.degree >= D else 0.0)
        if resid > tol * scale:
            raise NotInClass(f"structural composition disagrees with substitution ({resid:.2e})")
        Q1, Q2 = Q1.truncate_below(D), Q2.truncate_below(D)
    h = GMap(facs, P1, P2, Q1, Q2)
    if check:
        c1, c2 = h.components()
        if not (c1.allclose(full1, tol) and c2.allclose(full2, tol)):
            raise NotInClass("compose_g does not reproduce compose_pair")
    return h


def indeterminacy_set(f: GMap):
    return f.indeterminacy()


def restrict_infinity(f: GMap) -> RatMap1D:
    return f.f_inf()


# ---------------------------------------------------------------------------
# charts
# ---------------------------------------------------------------------------

def homogenize(p: BiPoly, D: int):
    """Terms of ``T^D p(Z/T, W/T)`` as {(i, j, k): c}."""
    return {(i, j, D - i - j): c for (i, j), c in p.terms.items()}


def _eval_hom(terms, Z, W, T):
    out = 0
    for (i, j, k), c in terms.items():
        out = out + c * Z**i * W**j * T**k
    return out


def to_homogeneous(point, chart: str):
    x, y = point
    if chart == "affine":
        return (x, y, 1)
    if chart == "u_v":
        return (x, 1, y)
    if chart == "uprime_vprime":
        return (1, x, y)
    raise ValueError(f"unknown chart {chart!r}")


def from_homogeneous(H, chart: str | None = None):
    """Chart coordinates of a homogeneous point; picks the largest coordinate
    when ``chart`` is None."""
    X, Y, T = H
    if chart is None:
        mags = (abs(X), abs(Y), abs(T))
        if mags[2] >= mags[0] and mags[2] >= mags[1]:
            chart = "affine"
        elif mags[1] >= mags[0]:
            chart = "u_v"
        else:
            chart = "uprime_vprime"
    if chart == "affine":
        return (X / T, Y / T), chart
    if chart == "u_v":
        return (X / Y, T / Y), chart
    return (Y / X, T / X), chart


def eval_chart(f: GMap, point, chart: str = "affine", out_chart: str | None = None,
               eps_match: float = EPS_MATCH):
    """Apply the projective extension of ``f`` to a chart point."""
    if chart not in CHARTS:
        raise ValueError(f"unknown chart {chart!r}")
    H = tuple(complex(c) for c in to_homogeneous(point, chart))
    if chart != "affine":
        nrm = float(np.linalg.norm(H))
        for ip in f.indeterminacy():
            b, a = ip.point.to_complex()
            dist = float(np.linalg.norm(np.cross(np.array(H), np.array([b, a, 0j])))) / (
                nrm * float(np.hypot(abs(a), abs(b))))
            if dist <= eps_match:
                raise IndeterminateEvaluation(f"point within {dist:.2e} of an indeterminacy point")
    f1, f2 = f.components()
    D = f.D
    img = (_eval_hom(homogenize(f1, D), *H), _eval_hom(homogenize(f2, D), *H), H[2] ** D)
    if all(abs(c) == 0 for c in img):
        raise IndeterminateEvaluation("all homogeneous components vanish")
    if chart == "affine" and out_chart is None:
        return (img[0], img[1]), "affine"
    return from_homogeneous(img, out_chart)
