"""Growth exponents at indeterminacy points, topological degree and escape rates."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import mpmath as mp
import numpy as np
from scipy import stats

from .charts import PREC, CentredMap, chart_log_norm, chart_of, mpc
from .errors import (DegenerateTarget, IllConditioned, InsufficientSamples, NonIntegerExponent, NotInClass)
from .numbers import exactify
from .polyalg import BiPoly, chordal, resultant_eliminate, uni_roots
from .sphere_dyn import first_hit
from .subshift import rng_for, sample_itinerary, sample_words

NONINDET = "NONINDET"
SNAP_TOL = 0.1
DEFAULT_SHELLS = (1e3, 1e4, 1e5, 1e6, 1e7)


@dataclass
class GrowthExponent:
    point: object           # IndetPoint or NONINDET
    l: float
    snapped: bool = True
    raw: float | None = None
    stderr: float = 0.0
    samples: int = 0
    shells: tuple = ()

    @property
    def alpha(self) -> int:
        return getattr(self.point, "alpha", 0)

    def to_json(self):
        pt = NONINDET if self.point == NONINDET else self.point.point.label()
        return {"point": pt, "l": self.l, "snapped": self.snapped, "raw_slope": self.raw,
                "stderr": self.stderr, "samples": self.samples, "shells": list(self.shells)}


def nonindet_exponent(f) -> GrowthExponent:
    """Away from the indeterminacy set the exponent is ``D`` by definition."""
    return GrowthExponent(NONINDET, float(f.D), True, float(f.D))


def estimate_growth_exponent(f, I, shells=DEFAULT_SHELLS, samples: int = 64, seed: int = 0,
                             v_radius: float = 0.05, snap_tol: float = SNAP_TOL,
                             min_samples: int = 8, prec: int = PREC) -> GrowthExponent:
    """Slope of ``log ||f(p)||`` against ``log ||p||`` for ``p`` near ``I``.

    Sample points are paired across shells: each pair fixes the ratio
    ``kappa = e/t`` of base offset to vertical coordinate (log-uniform over
    [1e-2, 1e2], random phases), so every shell sees the same approach
    direction.  Pairs with any image within chordal ``v_radius`` of
    ``f_inf(I)`` are rejected.  The slope is fitted with per-pair intercepts.
    """
    rng = rng_for(seed, 1)
    p = I.point
    chart, s_c = chart_of(p.z, p.w)
    cm = CentredMap(f, chart, s_c, chart, s_c)
    fI = f.f_inf()(p)
    fI_c = fI.to_complex()
    kappa = 10 ** rng.uniform(-2, 2, samples) * np.exp(2j * np.pi * rng.uniform(0, 1, samples))
    phase = np.exp(2j * np.pi * rng.uniform(0, 1, samples))
    xs, ys, kept = [], [], 0
    with mp.workprec(prec):
        c = mpc(s_c)
        for k in range(samples):
            row_x, row_y, ok = [], [], True
            for R in shells:
                # |t| from ||p|| = sqrt(|s|^2 + 1)/|t|, iterated once for the offset
                t = phase[k] * math.sqrt(abs(complex(s_c)) ** 2 + 1) / R
                e = kappa[k] * t
                t = phase[k] * math.sqrt(abs(complex(s_c) + e) ** 2 + 1) / R
                e = kappa[k] * t
                em, tm = mp.mpc(e), mp.mpc(t)
                X = cm.N(em, tm) + c * cm.B(em, tm)
                Bv = cm.B(em, tm)
                Tv = cm.T(em, tm)
                img = (complex(X), complex(Bv)) if chart == "u_v" else (complex(Bv), complex(X))
                if chordal(img, fI_c) <= v_radius:
                    ok = False
                    break
                row_x.append(float(chart_log_norm(c + em, tm)))
                row_y.append(float(mp.log(abs(X) ** 2 + abs(Bv) ** 2) / 2 - mp.log(abs(Tv))))
            if ok:
                kept += 1
                mx, my = np.mean(row_x), np.mean(row_y)
                xs += [x - mx for x in row_x]
                ys += [y - my for y in row_y]
    if kept < min_samples:
        raise InsufficientSamples(f"only {kept} of {samples} sample pairs survive the image filter")
    fit = stats.linregress(xs, ys)
    slope = float(fit.slope)
    near = round(slope)
    snapped = abs(slope - near) <= snap_tol
    return GrowthExponent(I, float(near) if snapped else slope, snapped, slope,
                          float(fit.stderr), kept, tuple(shells))


def exponents_for(f, **kw):
    return [estimate_growth_exponent(f, ip, **kw) for ip in f.indeterminacy()]


def hits_E(f) -> list:
    """For each indeterminacy point, whether ``f_inf(I)`` lies in E, i.e. its
    forward orbit meets the indeterminacy set."""
    return [first_hit(f, j) is not None for j in range(len(f.indeterminacy()))]


def topological_degree(f, exponents) -> int:
    """``sum l_I alpha_I + d' D``."""
    for ex in exponents:
        if not ex.snapped or abs(ex.l - round(ex.l)) > 0:
            raise NonIntegerExponent(f"exponent {ex.l} at {ex.point} is not an integer")
    if any(hits_E(f)):
        warnings.warn("f_inf(I(f)) meets E: the degree formula is outside its hypotheses",
                      stacklevel=2)
    dt = sum(int(round(ex.l)) * ex.alpha for ex in exponents) + f.dprime * f.D
    if dt <= f.D:
        raise NotInClass(f"topological degree {dt} does not exceed D = {f.D}")
    return dt


def _refine(g1, g2, z, w, iters: int = 30):
    """Newton on the system ``g1 = g2 = 0``."""
    d1z, d1w = _partials(g1)
    d2z, d2w = _partials(g2)
    for _ in range(iters):
        F = np.array([g1(z, w), g2(z, w)], dtype=complex)
        J = np.array([[d1z(z, w), d1w(z, w)], [d2z(z, w), d2w(z, w)]], dtype=complex)
        try:
            dz, dw = np.linalg.solve(J, F)
        except np.linalg.LinAlgError:
            break
        z, w = z - dz, w - dw
        if abs(dz) + abs(dw) <= 1e-15 * (1 + abs(z) + abs(w)):
            break
    return complex(z), complex(w)


def _partials(p: BiPoly):
    dz = BiPoly({(i - 1, j): c * i for (i, j), c in p.terms.items() if i}).to_float()
    dw = BiPoly({(i, j - 1): c * j for (i, j), c in p.terms.items() if j}).to_float()
    return dz, dw


def _solve_system(f1, f2, target, eps_match):
    a, b = target
    g1, g2 = f1 - a, f2 - b
    res = resultant_eliminate(g1, g2, "w")
    degR = len(res) - 1
    zroots = uni_roots(res)
    gf1, gf2 = g1.to_float(), g2.to_float()
    sols = []
    for z, _ in zroots:
        c1 = [sum(complex(c) * z**k for k, c in enumerate(row)) for row in gf1.coeffs_in("w")]
        c2 = [sum(complex(c) * z**k for k, c in enumerate(row)) for row in gf2.coeffs_in("w")]
        s1 = max((abs(c) for c in c1), default=0.0)
        s2 = max((abs(c) for c in c2), default=0.0)
        if s1 <= 1e-12 * (1 + gf1.max_abs()):
            if s2 <= 1e-12 * (1 + gf2.max_abs()):
                return None, degR       # a whole line of solutions
            c1, c2 = c2, c1
        w1 = [w for w, _ in uni_roots(c1)] if len(c1) > 1 else []
        for w in w1:
            val = abs(np.polynomial.polynomial.polyval(w, c2))
            scale = sum(abs(c) * abs(w) ** k for k, c in enumerate(c2)) + 1e-300
            if val <= 1e-6 * scale:
                zz, ww = _refine(gf1, gf2, z, w)
                if abs(gf1(zz, ww)) + abs(gf2(zz, ww)) <= 1e-8 * (1 + abs(zz) + abs(ww)) ** f1.degree:
                    sols.append((zz, ww))
    uniq = []
    for s in sols:
        if all(abs(s[0] - u[0]) + abs(s[1] - u[1]) > eps_match * (1 + abs(s[0]) + abs(s[1])) for u in uniq):
            uniq.append(s)
    return uniq, degR


def count_preimages_numeric(f, target=(0, 1), seed: int = 0, max_resamples: int = 10,
                            eps_match: float = 1e-7) -> int:
    """Solutions of ``f(z, w) = target``: eliminate ``w`` by a resultant, solve
    in ``z``, back-substitute and keep common roots, deduplicated.

    A target is degenerate when the distinct solutions do not account for the
    full degree of the resultant (a multiple solution or a solution at
    infinity); it is then perturbed with a seeded random offset.
    """
    f1, f2 = f.components()
    rng = rng_for(seed, 2)
    tgt = (exactify(target[0]), exactify(target[1])) if f.exact else target
    for attempt in range(max_resamples + 1):
        try:
            sols, degR = _solve_system(f1, f2, tgt, eps_match)
        except IllConditioned:       # near-multiple root: treat the target as degenerate
            sols, degR = None, 0
        if sols is not None and len(sols) == degR and degR > 0:
            return len(sols)
        off = rng.normal(size=4) * 0.1
        tgt = (complex(target[0]) + complex(off[0], off[1]), complex(target[1]) + complex(off[2], off[3]))
        if f.exact:      # a rational target keeps the resultant exact
            tgt = tuple(exactify(complex(round(x.real, 6), round(x.imag, 6))) for x in tgt)
    raise DegenerateTarget(f"no generic target found after {max_resamples} resamples")


def escape_range(exponents, D: int):
    """``[min l_I, D]``; the whole interval is claimed, only its ends are sampled."""
    lo = min([ex.l for ex in exponents if ex.point != NONINDET] + [float(D)])
    return (min(lo, float(D)), float(D))


def lambda_indet(table, f):
    """Limit weights of the indeterminacy points, in factor order."""
    out = [None] * len(f.indeterminacy())
    for nd in table.tree.nodes:
        if nd.is_indeterminate:
            out[nd.indet_index] = table.limit[nd.id]
    return out


def mean_escape_rate(table, exponents, f) -> float:
    """``D^lambda prod l_I^lambda_I`` with ``lambda = 1 - sum lambda_I``."""
    lam_I = lambda_indet(table, f)
    lam = 1 - sum(float(x) for x in lam_I)
    log_rate = lam * math.log(f.D) + sum(float(li) * math.log(ex.l) for li, ex in zip(lam_I, exponents))
    return math.exp(log_rate)


def mean_escape_rate_from(lams, ls, D: int) -> float:
    lam = 1 - sum(lams)
    return math.exp(lam * math.log(D) + sum(a * math.log(b) for a, b in zip(lams, ls)))


def _state_logs(m, tree, exponents, D: int) -> np.ndarray:
    logs = np.empty(m.n_explicit + 1)
    for i, nid in enumerate(m.node_ids):
        nd = tree.nodes[nid]
        logs[i] = math.log(exponents[nd.indet_index].l) if nd.is_indeterminate else math.log(D)
    logs[-1] = math.log(D)
    return logs


def birkhoff_check(f, tree, m, table, exponents, n_words: int = 10_000, length: int = 1000,
                   seed: int = 0, tol: float = 0.02) -> dict:
    """Time averages of ``log l`` along nu-sampled words against
    ``log`` of the mean escape rate, with a Monte Carlo error check at
    ``n_words/4`` and ``n_words`` words."""
    logs = _state_logs(m, tree, exponents, f.D)
    target = math.log(mean_escape_rate(table, exponents, f))
    words = sample_words(m, n_words, length, seed)
    avg = logs[words].mean(axis=1)
    mean = float(avg.mean())
    se_full = float(avg.std(ddof=1) / math.sqrt(n_words))
    quarter = avg[: n_words // 4]
    se_quarter = float(quarter.std(ddof=1) / math.sqrt(len(quarter)))
    ratio = se_quarter / se_full
    rel = abs(mean - target) / abs(target)
    return {"target_log_rate": target, "mean": mean, "relative_error": rel,
            "stderr_quarter": se_quarter, "stderr_full": se_full, "stderr_ratio": ratio,
            "within_tol": rel <= tol, "mc_halves": abs(ratio - 2) <= 0.3 * 2,
            "n_words": n_words, "length": length}


def attraction_probe(f, R: float = 1e3, samples: int = 2000, seed: int = 0) -> dict:
    """``min ||f(p)|| / ||p||`` on the sphere ``||p|| = R`` and the growth slope
    between ``R`` and ``10 R`` along the same directions."""
    rng = rng_for(seed, 3)
    v = rng.normal(size=(samples, 4))
    dirs = (v[:, 0] + 1j * v[:, 1], v[:, 2] + 1j * v[:, 3])
    nrm = np.sqrt(np.abs(dirs[0]) ** 2 + np.abs(dirs[1]) ** 2)
    z, w = dirs[0] / nrm, dirs[1] / nrm
    f1, f2 = (p.to_float() for p in f.components())

    def fnorm(scale):
        a = np.array([f1(zz, ww) for zz, ww in zip(scale * z, scale * w)])
        b = np.array([f2(zz, ww) for zz, ww in zip(scale * z, scale * w)])
        return np.sqrt(np.abs(a) ** 2 + np.abs(b) ** 2)

    n1, n2 = fnorm(R), fnorm(10 * R)
    ratio = n1 / R
    slope = np.log10(n2 / n1)
    return {"R": R, "min_ratio": float(ratio.min()), "min_slope": float(slope.min()),
            "attracting": bool(ratio.min() > 1)}


@dataclass
class EscapeLawReport:
    ns: tuple
    deviations: dict = field(default_factory=dict)   # n -> list over orbits
    envelope: dict = field(default_factory=dict)     # n -> max_dev * n / log n
    C_fit: float = 0.0
    stable: bool = False
    semi_conjugate: bool = False
    max_residual: float = 0.0
    orbits: list = field(default_factory=list)

    def to_json(self):
        return {"ns": list(self.ns), "envelope": {str(k): v for k, v in self.envelope.items()},
                "C_fit": self.C_fit, "stable": self.stable, "semi_conjugate": self.semi_conjugate,
                "max_step_residual": self.max_residual,
                "max_deviation": {str(k): max(v) for k, v in self.deviations.items()}}

    def to_csv(self) -> str:
        lines = ["orbit,n,empirical,predicted,envelope"]
        for k, (emp, pred) in enumerate(self.orbits):
            for n in self.ns:
                lines.append(f"{k},{n},{emp[n]!r},{pred[n]!r},{self.C_fit * math.log(n) / n!r}")
        return "\n".join(lines) + "\n"


def itinerary_escape_law_check(f, m, tree, boxes, exponents, word_length: int = 26,
                               n_orbits: int = 50, seed: int = 0, ns=(10, 20, 25),
                               band: float = 0.5) -> EscapeLawReport:
    """Shoot orbits along nu-sampled itineraries and compare
    ``(1/n) log log ||f^n(q)||`` with ``(1/n) sum log l_{alpha(i)}``.

    ``C_n`` is the envelope ``max_orbits dev_n * n / log n``; ``C_fit`` is the
    least-squares fit of ``max dev_n`` against ``log n / n``.  Stability means
    every ``C_n`` lies within ``band`` of ``C_fit``.
    """
    from .orbit_lab import Shooter

    box_of = {b.node_id: k for k, b in enumerate(boxes)}
    state_box = [box_of[nid] for nid in m.node_ids]
    l_of = []
    for b in boxes:
        nd = tree.nodes[b.node_id]
        l_of.append(exponents[nd.indet_index].l if nd.is_indeterminate else float(f.D))
    l_of = [int(x) if float(x).is_integer() else x for x in l_of]
    shooter = Shooter(f, boxes, l_of)
    rep = EscapeLawReport(tuple(ns), {n: [] for n in ns})
    semi, resid = True, 0.0
    for k in range(n_orbits):
        word = sample_itinerary(m, word_length, seed, on_rest="resample", stream=k)
        bw = [state_box[s] for s in word]
        rec = shooter.shoot(bw)
        semi &= rec.semi_conjugate() and rec.itinerary == [boxes[i].id for i in bw]
        resid = max(resid, max(rec.residuals))
        emp, pred = {}, {}
        for n in ns:
            emp[n] = float(mp.log(rec.log_norms[n])) / n
            pred[n] = sum(math.log(l_of[i]) for i in bw[:n]) / n
            rep.deviations[n].append(abs(emp[n] - pred[n]))
        rep.orbits.append((emp, pred))
    x = np.array([math.log(n) / n for n in ns])
    y = np.array([max(rep.deviations[n]) for n in ns])
    rep.C_fit = float((x @ y) / (x @ x))
    rep.envelope = {n: float(max(rep.deviations[n]) * n / math.log(n)) for n in ns}
    rep.stable = all(abs(c / rep.C_fit - 1) <= band for c in rep.envelope.values())
    rep.semi_conjugate = bool(semi)
    rep.max_residual = resid
    return rep
