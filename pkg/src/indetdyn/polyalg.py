"""Bivariate polynomial arithmetic over C with an exact Gaussian-rational mode.

``BiPoly`` is a sparse polynomial in (z, w).  ``HomPoly`` is a homogeneous
form stored as the coefficient vector ``c[k]`` of ``z**k * w**(n-k)``.
Exact coefficients (``GaussQ``) are kept exact through every operation;
as soon as a float enters, the whole result is floating.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import (CoefficientOverflow, DegenerateInput, IllConditioned,
                     NonConvergence)
from .numbers import (GaussQ, decode_coeff, encode_pair, exactify, is_exact,
                      rationalize)

EPS_ZERO = 1e-12
EPS_CLUSTER = 1e-6
EPS_RECON = 1e-8
TERM_CAP = 200_000
_MACHEPS = np.finfo(float).eps


def _coerce_all(values):
    """Return the values in a single backend (all GaussQ or all complex)."""
    values = list(values)
    if all(is_exact(v) for v in values):
        return [exactify(v) for v in values], True
    return [complex(v) for v in values], False


def _czero(c, scale, eps):
    if isinstance(c, GaussQ):
        return not c
    return abs(c) <= eps * scale


# ---------------------------------------------------------------------------
# BiPoly
# ---------------------------------------------------------------------------

class BiPoly:
    """Sparse polynomial in two variables; immutable by convention."""

    __slots__ = ("terms", "exact")

    def __init__(self, terms=None, eps_zero=EPS_ZERO):
        terms = dict(terms or {})
        keys = list(terms)
        vals, exact = _coerce_all(terms[k] for k in keys)
        scale = max((abs(v) for v in vals), default=0.0) if not exact else 1.0
        clean = {}
        for k, v in zip(keys, vals):
            i, j = int(k[0]), int(k[1])
            if i < 0 or j < 0:
                raise ValueError("negative exponent")
            if not _czero(v, scale, eps_zero):
                clean[(i, j)] = v
        self.terms = clean
        self.exact = exact

    # -- constructors -------------------------------------------------------
    @classmethod
    def const(cls, c):
        return cls({(0, 0): c})

    @classmethod
    def z(cls):
        return cls({(1, 0): 1})

    @classmethod
    def w(cls):
        return cls({(0, 1): 1})

    @classmethod
    def from_records(cls, records):
        """Build from ``[[i, j, re, im], ...]`` monomial records."""
        terms = {}
        for rec in records:
            if len(rec) != 4:
                raise ValueError(f"monomial record must have 4 entries: {rec!r}")
            i, j, re_, im_ = rec
            c = decode_coeff([re_, im_])
            key = (int(i), int(j))
            terms[key] = terms.get(key, 0) + c
        return cls(terms)

    def to_records(self):
        out = []
        for (i, j), c in sorted(self.terms.items()):
            out.append([i, j, *encode_pair(c)])
        return out

    # -- basic queries ------------------------------------------------------
    @property
    def degree(self) -> int:
        return max((i + j for i, j in self.terms), default=-1)

    def is_zero(self) -> bool:
        return not self.terms

    def degree_in(self, var: str) -> int:
        idx = 0 if var == "z" else 1
        return max((k[idx] for k in self.terms), default=-1)

    def to_float(self) -> "BiPoly":
        return BiPoly({k: complex(v) for k, v in self.terms.items()})

    def max_abs(self) -> float:
        return max((abs(complex(v)) for v in self.terms.values()), default=0.0)

    def evaluate(self, z, w):
        out = 0
        for (i, j), c in self.terms.items():
            out = out + c * z**i * w**j
        return out

    __call__ = evaluate

    def hom_part(self, k: int) -> "HomPoly":
        coeffs = [0] * (k + 1)
        for (i, j), c in self.terms.items():
            if i + j == k:
                coeffs[i] = c
        return HomPoly(k, coeffs)

    def truncate_below(self, k: int) -> "BiPoly":
        return BiPoly({key: c for key, c in self.terms.items() if sum(key) < k})

    # -- arithmetic ---------------------------------------------------------
    def _lift(self, other):
        if isinstance(other, BiPoly):
            return other
        if isinstance(other, HomPoly):
            return other.to_bipoly()
        return BiPoly.const(other)

    def __add__(self, other):
        other = self._lift(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return BiPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return BiPoly({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        other = self._lift(other)
        out = {}
        for (i1, j1), c1 in self.terms.items():
            for (i2, j2), c2 in other.terms.items():
                key = (i1 + i2, j1 + j2)
                out[key] = out.get(key, 0) + c1 * c2
        return BiPoly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        out, base = BiPoly.const(1), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if not isinstance(other, BiPoly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def allclose(self, other: "BiPoly", tol: float = 1e-9) -> bool:
        keys = set(self.terms) | set(other.terms)
        scale = max(1.0, self.max_abs(), other.max_abs())
        return all(abs(complex(self.terms.get(k, 0)) - complex(other.terms.get(k, 0))) <= tol * scale
                   for k in keys)

    def substitute(self, g1: "BiPoly", g2: "BiPoly", term_cap: int = TERM_CAP) -> "BiPoly":
        """``self(g1, g2)``: exact polynomial substitution."""
        pow1, pow2 = {0: BiPoly.const(1)}, {0: BiPoly.const(1)}

        def power(cache, base, k):
            if k not in cache:
                cache[k] = power(cache, base, k - 1) * base
                if len(cache[k].terms) > term_cap:
                    raise CoefficientOverflow(f"term count exceeds cap {term_cap}")
            return cache[k]

        out = BiPoly()
        for (i, j), c in sorted(self.terms.items()):
            out = out + (power(pow1, g1, i) * power(pow2, g2, j)) * c
            if len(out.terms) > term_cap:
                raise CoefficientOverflow(f"term count exceeds cap {term_cap}")
        return out

    def coeffs_in(self, var: str):
        """Coefficients as a polynomial in ``var`` whose coefficients are
        ascending coefficient lists in the other variable."""
        vi = 0 if var == "z" else 1
        deg = self.degree_in(var)
        other = max((k[1 - vi] for k in self.terms), default=0)
        out = [[0] * (other + 1) for _ in range(deg + 1)]
        for key, c in self.terms.items():
            out[key[vi]][key[1 - vi]] = c
        return out

    def __repr__(self):
        if not self.terms:
            return "BiPoly(0)"
        parts = [f"({c})*z^{i}*w^{j}" for (i, j), c in sorted(self.terms.items())]
        return "BiPoly(" + " + ".join(parts) + ")"


# ---------------------------------------------------------------------------
# HomPoly
# ---------------------------------------------------------------------------

class HomPoly:
    """Homogeneous binary form: ``sum c[k] z^k w^(n-k)``."""

    __slots__ = ("degree", "coeffs", "exact")

    def __init__(self, degree: int, coeffs):
        if len(coeffs) != degree + 1:
            raise ValueError("HomPoly needs degree+1 coefficients")
        vals, exact = _coerce_all(coeffs)
        self.degree = int(degree)
        self.coeffs = tuple(vals)
        self.exact = exact

    @classmethod
    def from_json(cls, obj):
        n = int(obj["degree"])
        desc = [decode_coeff(c) for c in obj["coeffs"]]
        return cls(n, list(reversed(desc)))

    def to_json(self):
        return {"degree": self.degree, "coeffs": [encode_pair(c) for c in reversed(self.coeffs)]}

    @classmethod
    def linear(cls, a, b):
        """The form ``a z - b w``."""
        return cls(1, [-b, a])

    def is_zero(self, eps: float = 0.0) -> bool:
        if self.exact:
            return not any(self.coeffs)
        return all(abs(c) <= eps for c in self.coeffs)

    def max_abs(self) -> float:
        return max(abs(complex(c)) for c in self.coeffs)

    def to_float(self) -> "HomPoly":
        return HomPoly(self.degree, [complex(c) for c in self.coeffs])

    def to_bipoly(self) -> BiPoly:
        n = self.degree
        return BiPoly({(k, n - k): c for k, c in enumerate(self.coeffs)})

    def evaluate(self, z, w):
        n = self.degree
        out = 0
        for k, c in enumerate(self.coeffs):
            if c:
                out = out + c * z**k * w**(n - k)
        return out

    __call__ = evaluate

    def dehomogenized(self, chart: str = "u"):
        """Ascending coefficients of p(u, 1) (``chart='u'``) or p(1, v)."""
        if chart == "u":
            return list(self.coeffs)
        return list(reversed(self.coeffs))

    def __mul__(self, other):
        if isinstance(other, HomPoly):
            n = self.degree + other.degree
            out = [0] * (n + 1)
            for i, a in enumerate(self.coeffs):
                if not a:
                    continue
                for j, b in enumerate(other.coeffs):
                    out[i + j] = out[i + j] + a * b
            return HomPoly(n, out)
        return HomPoly(self.degree, [c * other for c in self.coeffs])

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = HomPoly(0, [1])
        for _ in range(k):
            out = out * self
        return out

    def __add__(self, other):
        if other.degree != self.degree:
            raise ValueError("degree mismatch")
        return HomPoly(self.degree, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other):
        return self + other * -1

    def __eq__(self, other):
        if not isinstance(other, HomPoly):
            return NotImplemented
        return self.degree == other.degree and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.degree, self.coeffs))

    def compose(self, q1: "HomPoly", q2: "HomPoly") -> "HomPoly":
        """``self(q1, q2)`` for forms q1, q2 of equal degree."""
        m = q1.degree
        out = HomPoly(self.degree * m, [0] * (self.degree * m + 1))
        for k, c in enumerate(self.coeffs):
            if c:
                out = out + (q1 ** k) * (q2 ** (self.degree - k)) * c
        return out

    def derivative_u(self):
        """Ascending coefficients of d/du p(u, 1)."""
        return [k * c for k, c in enumerate(self.coeffs)][1:]

    def __repr__(self):
        return f"HomPoly({self.degree}, {list(self.coeffs)})"


def hom_components(p: BiPoly) -> list[HomPoly]:
    """Homogeneous parts of ``p`` of every degree that actually occurs."""
    degs = sorted({i + j for i, j in p.terms})
    return [p.hom_part(k) for k in degs]


# ---------------------------------------------------------------------------
# linear factors and projective points
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LinearFactor:
    """The factor ``(a z - b w)**alpha``; it vanishes at ``[b : a]``."""

    a: object
    b: object
    alpha: int

    @property
    def point(self):
        return (self.b, self.a)

    def form(self) -> HomPoly:
        return HomPoly.linear(self.a, self.b) ** self.alpha

    def to_json(self):
        from .numbers import encode_coeff
        return {"a": encode_coeff(self.a), "b": encode_coeff(self.b), "alpha": self.alpha}

    @classmethod
    def from_json(cls, obj):
        return cls(decode_coeff(obj["a"]), decode_coeff(obj["b"]), int(obj["alpha"]))


def normalize_pair(x, y):
    """Scale (x, y) so max(|x|,|y|) = 1 and the first nonzero entry is real
    positive.  Exact pairs stay exact whenever that is possible."""
    if is_exact(x) and is_exact(y):
        x, y = exactify(x), exactify(y)
        if not x and not y:
            raise ValueError("zero pair")
        if x.abs2() >= y.abs2():
            return GaussQ(1), y / x
        xr = x / y
        if not xr:
            return GaussQ(0), GaussQ(1)
        if not xr.im:
            return (xr, GaussQ(1)) if xr.re > 0 else (-xr, GaussQ(-1))
        x, y = complex(x), complex(y)
    x, y = complex(x), complex(y)
    s = x if abs(x) >= abs(y) else y
    if s == 0:
        raise ValueError("zero pair")
    x, y = x / s, y / s
    first = x if abs(x) > 1e-14 else y
    ph = first / abs(first)
    x, y = x / ph, y / ph
    if abs(x) <= 1e-14:
        x = 0j
    if abs(x.imag) <= 1e-15 * max(1.0, abs(x)):
        x = complex(x.real, 0.0)
    if abs(y.imag) <= 1e-15 * max(1.0, abs(y)):
        y = complex(y.real, 0.0)
    return x, y


def chordal(p, q) -> float:
    """Chordal distance between two projective points given as pairs."""
    z1, w1 = complex(p[0]), complex(p[1])
    z2, w2 = complex(q[0]), complex(q[1])
    n1 = math.hypot(abs(z1), abs(w1))
    n2 = math.hypot(abs(z2), abs(w2))
    return abs(z1 * w2 - z2 * w1) / (n1 * n2)


def make_factor(point, alpha) -> LinearFactor:
    """Linear factor vanishing at the projective point ``[x : y]``."""
    a, b = normalize_pair(point[1], point[0])
    return LinearFactor(a, b, alpha)


# ---------------------------------------------------------------------------
# univariate roots
# ---------------------------------------------------------------------------

def _trim(c, eps=EPS_ZERO):
    c = list(c)
    if not c:
        return c
    scale = max(abs(complex(x)) for x in c)
    while c and _czero(c[-1], scale, eps):
        c.pop()
    return c


def _aberth(c: np.ndarray, max_iter: int, tol: float):
    n = len(c) - 1
    lead = c[-1]
    ratios = [abs(c[k] / lead) ** (1.0 / (n - k)) for k in range(n) if c[k] != 0]
    radius = 2.0 * max(ratios) if ratios else 1.0
    if radius == 0:
        radius = 1.0
    z = radius * np.exp(1j * (2 * np.pi * np.arange(n) / n + 0.4))
    dc = np.polynomial.polynomial.polyder(c)
    for _ in range(max_iter):
        pv = np.polynomial.polynomial.polyval(z, c)
        dv = np.polynomial.polynomial.polyval(z, dc)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = pv / dv
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, 1.0)
            inv = 1.0 / diff
            np.fill_diagonal(inv, 0.0)
            s = inv.sum(axis=1)
            step = ratio / (1.0 - ratio * s)
        step = np.where(np.isfinite(step), step, 0.0)
        z = z - step
        if np.all(np.abs(step) <= tol * np.maximum(1.0, np.abs(z))):
            return z, True
    return z, False


def _taylor(c: np.ndarray, x: complex, m: int):
    """Taylor coefficients t_0..t_m of the polynomial at x."""
    out = []
    d = np.asarray(c, dtype=complex)
    fact = 1.0
    for j in range(m + 1):
        if j:
            fact *= j
        out.append(np.polynomial.polynomial.polyval(x, d) / fact if len(d) else 0.0)
        d = np.polynomial.polynomial.polyder(d) if len(d) > 1 else np.array([0j])
    return out


def _cluster_radius(c: np.ndarray, x: complex, m: int, eps_cluster: float) -> float:
    """Scatter expected for an m-fold root under double rounding."""
    t = _taylor(c, x, m)
    tm = abs(t[m])
    S = float(np.sum(np.abs(c) * max(1.0, abs(x)) ** np.arange(len(c))))
    if tm == 0:
        return eps_cluster * max(1.0, abs(x))
    rho = (1e3 * _MACHEPS * S / tm) ** (1.0 / m)
    return max(eps_cluster * max(1.0, abs(x)), rho)


def _near_root(c: np.ndarray, x: complex, m: int, rad: float) -> bool:
    """An m-fold cluster of radius ``rad`` at ``x`` forces ``|p(x)|`` down to
    about ``|p^(m)(x)/m!| rad^m``; a symmetric pair of distinct roots does not."""
    t = _taylor(c, x, m)
    S = float(np.sum(np.abs(c) * max(1.0, abs(x)) ** np.arange(len(c))))
    return abs(t[0]) <= 4 * max(abs(t[m]) * rad**m, 1e3 * _MACHEPS * S)


def _cluster(c: np.ndarray, roots: np.ndarray, eps_cluster: float):
    groups = [[r] for r in roots]
    merged = True
    while merged and len(groups) > 1:
        merged = False
        for a, b in itertools.combinations(range(len(groups)), 2):
            ga, gb = groups[a], groups[b]
            cand = ga + gb
            centre = complex(np.mean(cand))
            rad = _cluster_radius(c, centre, len(cand), eps_cluster)
            gap = min(abs(x - y) for x in ga for y in gb)
            if gap <= 2 * rad and _near_root(c, centre, len(cand), rad):
                groups[a] = cand
                del groups[b]
                merged = True
                break
    out = []
    for g in groups:
        m = len(g)
        centre = complex(np.mean(g))
        if m > 1:
            # polish on the (m-1)th derivative, where the root is simple
            d = np.polynomial.polynomial.polyder(c, m - 1)
            dd = np.polynomial.polynomial.polyder(d)
            x = centre
            for _ in range(20):
                dv = np.polynomial.polynomial.polyval(x, dd)
                if dv == 0:
                    break
                step = np.polynomial.polynomial.polyval(x, d) / dv
                x -= step
                if abs(step) <= 1e-15 * max(1.0, abs(x)):
                    break
            rad = _cluster_radius(c, centre, m, eps_cluster)
            if abs(x - centre) > 2 * rad:
                raise IllConditioned(f"cluster of size {m} near {centre} is ambiguous")
            centre = x
        out.append((complex(centre), m))
    # distinct clusters must be resolvable at the requested radius
    for (x, _), (y, _) in itertools.combinations(out, 2):
        if abs(x - y) <= eps_cluster * max(1.0, abs(x)):
            raise IllConditioned(f"roots {x} and {y} closer than cluster radius")
    return out


def uni_roots(c, eps: float = EPS_CLUSTER, max_iter: int = 500):
    """Roots of ``sum c[k] x**k`` with multiplicities.

    Aberth-Ehrlich simultaneous iteration, falling back to companion-matrix
    eigenvalues when it stalls.  Roots closer than ``eps`` (relative) are
    merged into one root of higher multiplicity.
    """
    c = _trim([complex(x) for x in c])
    if not c:
        raise DegenerateInput("zero polynomial has no finite root set")
    if len(c) == 1:
        return []
    arr = np.asarray(c, dtype=complex)
    # exact zero roots first
    k0 = 0
    while arr[k0] == 0:
        k0 += 1
    core = arr[k0:]
    roots = np.zeros(0, dtype=complex)
    if len(core) > 1:
        roots, ok = _aberth(core, max_iter, 1e-14)
        if not ok or not np.all(np.isfinite(roots)):
            roots = np.polynomial.polynomial.polyroots(core)
            if not np.all(np.isfinite(roots)):
                raise NonConvergence("root finder failed")
    out = _cluster(core, roots, eps) if len(roots) else []
    if k0:
        out = [(0j, k0)] + [(x, m) for x, m in out if abs(x) > eps]
        # a nonzero cluster at 0 would already have been exact
    return out


def _exact_div_linear(c, r):
    """Synthetic division of ascending coeffs by (x - r); returns (q, rem)."""
    n = len(c) - 1
    q = [0] * n
    acc = c[n]
    for k in range(n - 1, -1, -1):
        q[k] = acc
        acc = c[k] + acc * r
    return q, acc


def exact_roots(c, max_den: int = 10**6):
    """All roots of an exact polynomial as Gaussian rationals, or None.

    Float roots are rationalized and verified by exact synthetic division, so
    a non-None answer is a certified complete factorization.
    """
    c = [exactify(x) for x in c]
    while c and not c[-1]:
        c.pop()
    if not c or not all(isinstance(x, GaussQ) for x in c):
        return None
    out = []
    k0 = 0
    while k0 < len(c) and not c[k0]:
        k0 += 1
    if k0:
        out.append((GaussQ(0), k0))
    c = c[k0:]
    if len(c) <= 1:
        return out
    approx = uni_roots([complex(x) for x in c], eps=1e-6)
    for x, m in approx:
        r = rationalize(x, max_den, tol=1e-5)
        if r is None:
            return None
        mult = 0
        while len(c) > 1:
            q, rem = _exact_div_linear(c, r)
            if rem:
                break
            c = q
            mult += 1
        if mult == 0:
            return None
        out.append((r, mult))
    if len(c) != 1:
        return None
    return out


# ---------------------------------------------------------------------------
# factoring and gcd of binary forms
# ---------------------------------------------------------------------------

def _strip_ends(p: HomPoly, eps: float):
    c = list(p.coeffs)
    scale = max(abs(complex(x)) for x in c)
    lo = 0
    while lo < len(c) and _czero(c[lo], scale, eps):
        lo += 1
    hi = len(c) - 1
    while hi >= 0 and _czero(c[hi], scale, eps):
        hi -= 1
    return c, lo, hi


def hom_roots(p: HomPoly, eps_cluster: float = EPS_CLUSTER, exact=None):
    """Projective zeros ``([x : y], multiplicity)`` of a binary form."""
    c, lo, hi = _strip_ends(p, EPS_ZERO)
    if hi < lo:
        raise DegenerateInput("identically zero form")
    n = p.degree
    pts = []
    if lo:
        pts.append(((0, 1), lo))           # z^lo divides: zero at [0:1]
    if n - hi:
        pts.append(((1, 0), n - hi))       # w^(n-hi) divides: zero at [1:0]
    core = c[lo:hi + 1]
    if len(core) <= 1:
        return pts, True if (exact is not False and p.exact) else False
    want_exact = p.exact if exact is None else exact
    if want_exact and p.exact:
        ex = exact_roots(core)
        if ex is not None:
            finite = [((r, GaussQ(1)), m) for r, m in ex]
            return finite + [((GaussQ(a), GaussQ(b)), m) for (a, b), m in pts], True
    if abs(complex(core[-1])) >= abs(complex(core[0])):
        roots = uni_roots([complex(x) for x in core], eps_cluster)
        pts += [((r, 1.0), m) for r, m in roots]
    else:
        roots = uni_roots([complex(x) for x in reversed(core)], eps_cluster)
        pts += [((1.0, r), m) for r, m in roots]
    return [((complex(a), complex(b)), m) for (a, b), m in pts], False


def hom_factor_linear(p: HomPoly, eps_cluster: float = EPS_CLUSTER, exact=None) -> list[LinearFactor]:
    """Split a binary form into normalized linear factors with multiplicity."""
    if p.is_zero():
        raise DegenerateInput("cannot factor the zero form")
    if p.degree == 0:
        return []
    pts, _ = hom_roots(p, eps_cluster, exact)
    factors = [make_factor(pt, m) for pt, m in pts]
    total = sum(f.alpha for f in factors)
    if total != p.degree:
        raise IllConditioned(f"factor multiplicities sum to {total}, expected {p.degree}")
    return factors


def product_of_factors(factors, degree_hint: int = 0) -> HomPoly:
    out = HomPoly(0, [1])
    for f in factors:
        out = out * f.form()
    return out


def factor_constant(p: HomPoly, factors) -> object:
    """Leading constant c with ``p = c * prod(factors)``."""
    q = product_of_factors(factors)
    k = max(range(len(q.coeffs)), key=lambda i: abs(complex(q.coeffs[i])))
    return p.coeffs[k] / q.coeffs[k]


def reconstruction_error(p: HomPoly, factors) -> float:
    c = factor_constant(p, factors)
    q = product_of_factors(factors) * c
    scale = p.max_abs()
    return max(abs(complex(a) - complex(b)) for a, b in zip(p.coeffs, q.coeffs)) / scale


def hom_divide(p: HomPoly, q: HomPoly):
    """Exact-or-floating division of forms: returns (quotient, remainder_norm)."""
    if q.degree > p.degree:
        raise ValueError("divisor degree exceeds dividend degree")
    qc, lo, hi = _strip_ends(q, 0.0 if q.exact else EPS_ZERO)
    if hi < lo:
        raise ZeroDivisionError("division by zero form")
    # q = z^lo w^(m-hi) * core, core has nonzero end coefficients
    m = q.degree
    pc = list(p.coeffs)
    shift_hi = m - hi
    # dividing by z^lo removes the first lo coefficients, by w^k the last k
    rem = 0.0
    for x in pc[:lo] + (pc[len(pc) - shift_hi:] if shift_hi else []):
        rem = max(rem, abs(complex(x)))
    pc = pc[lo:len(pc) - shift_hi]
    core = qc[lo:hi + 1]
    # polynomial long division in u on ascending coefficients
    n_out = len(pc) - len(core)
    if n_out < 0:
        return HomPoly(p.degree - m, [0] * (p.degree - m + 1)), max(rem, max(abs(complex(x)) for x in pc))
    work = list(pc)
    quot = [0] * (n_out + 1)
    lead = core[-1]
    for k in range(n_out, -1, -1):
        coef = work[k + len(core) - 1] / lead
        quot[k] = coef
        for j, cj in enumerate(core):
            work[k + j] = work[k + j] - coef * cj
    for x in work[:len(core) - 1]:
        rem = max(rem, abs(complex(x)))
    scale = max(1e-300, p.max_abs())
    return HomPoly(p.degree - m, quot), rem / scale


def _merge_points(pts_p, pts_q, eps):
    out = []
    for pp, mp in pts_p:
        for pq, mq in pts_q:
            if chordal(pp, pq) <= eps:
                out.append((pp, min(mp, mq)))
                break
    return out


def hom_gcd(p: HomPoly, q: HomPoly, eps_cluster: float = EPS_CLUSTER) -> HomPoly:
    """Product of the common linear factors (monic-normalized factors)."""
    if p.is_zero() and q.is_zero():
        raise DegenerateInput("gcd of two zero forms")
    if p.is_zero():
        return hom_from_factors(hom_factor_linear(q, eps_cluster))
    if q.is_zero():
        return hom_from_factors(hom_factor_linear(p, eps_cluster))
    fp = hom_factor_linear(p, eps_cluster)
    fq = hom_factor_linear(q, eps_cluster)
    common = common_factors(fp, fq, eps_cluster)
    return hom_from_factors(common)


def common_factors(fp, fq, eps: float = EPS_CLUSTER):
    out = []
    for a in fp:
        for b in fq:
            if chordal(a.point, b.point) <= eps:
                out.append(LinearFactor(a.a, a.b, min(a.alpha, b.alpha)))
                break
    return out


def hom_from_factors(factors) -> HomPoly:
    if not factors:
        return HomPoly(0, [GaussQ(1)])
    return product_of_factors(factors)


# ---------------------------------------------------------------------------
# composition and elimination
# ---------------------------------------------------------------------------

def compose_pair(f, g, term_cap: int = TERM_CAP):
    """``f o g`` for pairs of BiPolys: ``(f1(g1, g2), f2(g1, g2))``."""
    f1, f2 = f
    g1, g2 = g
    return f1.substitute(g1, g2, term_cap), f2.substitute(g1, g2, term_cap)


def _poly_mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return out


def _poly_eval(c, x):
    acc = 0
    for coef in reversed(c):
        acc = acc * x + coef
    return acc


def _det_exact(mat):
    n = len(mat)
    a = [list(row) for row in mat]
    det = GaussQ(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col]), None)
        if piv is None:
            return GaussQ(0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        det = det * a[col][col]
        for r in range(col + 1, n):
            if a[r][col]:
                fac = a[r][col] / a[col][col]
                for k in range(col, n):
                    a[r][k] = a[r][k] - fac * a[col][k]
    return det


def _sylvester(pc, qc):
    """Sylvester matrix with univariate-polynomial entries (descending in var)."""
    m, n = len(pc) - 1, len(qc) - 1
    size = m + n
    zero = [0]
    rows = []
    pdesc, qdesc = list(reversed(pc)), list(reversed(qc))
    for i in range(n):
        rows.append([zero] * i + pdesc + [zero] * (size - m - 1 - i))
    for i in range(m):
        rows.append([zero] * i + qdesc + [zero] * (size - n - 1 - i))
    return rows


def resultant_eliminate(p: BiPoly, q: BiPoly, var: str = "w"):
    """Classical resultant with respect to ``var``; ascending coefficients in
    the remaining variable."""
    if p.is_zero() or q.is_zero():
        raise DegenerateInput("resultant with a zero polynomial")
    pc = p.coeffs_in(var)
    qc = q.coeffs_in(var)
    exact = p.exact and q.exact
    m, n = len(pc) - 1, len(qc) - 1
    if m == 0 and n == 0:
        return [exactify(1) if exact else 1.0 + 0j]
    rows = _sylvester(pc, qc)
    bound = sum(max(len(e) - 1 for e in row) for row in rows)
    bound = max(bound, 0)
    npts = bound + 1
    if exact:
        xs = [GaussQ(k) for k in range(npts)]
        vals = [_det_exact([[_poly_eval([exactify(c) for c in e], x) for e in row] for row in rows]) for x in xs]
        # Newton divided differences, then expand to monomial basis
        coef = list(vals)
        for j in range(1, npts):
            for i in range(npts - 1, j - 1, -1):
                coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - j])
        poly = [coef[-1]]
        for i in range(npts - 2, -1, -1):
            poly = _poly_mul(poly, [-xs[i], GaussQ(1)])
            poly[0] = poly[0] + coef[i]
        while len(poly) > 1 and not poly[-1]:
            poly.pop()
        return poly
    omega = np.exp(2j * np.pi * np.arange(npts) / npts)
    vals = np.empty(npts, dtype=complex)
    for k, x in enumerate(omega):
        mat = np.array([[_poly_eval([complex(c) for c in e], x) for e in row] for row in rows], dtype=complex)
        vals[k] = np.linalg.det(mat)
    coef = np.fft.fft(vals) / npts
    coef = list(coef)
    scale = max(abs(c) for c in coef) if coef else 0.0
    coef = [0j if abs(c) <= 1e-10 * scale else c for c in coef]
    while len(coef) > 1 and coef[-1] == 0:
        coef.pop()
    return coef


def poly_mul(a, b):
    return _poly_mul(a, b)


def poly_eval(c, x):
    return _poly_eval(c, x)
