"""Bidisks around the points of E, horizontal-like certificates and orbits.

Each box is ``{|s - c| < r, |t| < v_bound}`` in the chart where its centre is
finite.  Certificates are sampled checks of the boundary conditions of a
horizontal-like map, not proofs.  Orbits near infinity grow double
exponentially, so all orbit code runs in mpmath and records ``log ||p||``
from chart data.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath as mp
import numpy as np

from .charts import (PREC, U_V, UPRIME, CentredMap, HomMap, best_chart, chart_log_norm, chart_of,
                     lift, log_norm, mpc, normalize, to_chart)
from .errors import (CertificateFailure, HypothesisViolation, IndeterminateEvaluation, OrbitLost,
                     SeparationFailure)
from .polyalg import uni_roots
from .sphere_dyn import ProjPoint, periodicity_check
from .subshift import rng_for, transition_degree

OUTSIDE = "OUTSIDE"
EXPAND = 1.2            # f_inf(D_p) must cover EXPAND * r_q around the parent centre


@dataclass
class Box:
    id: str
    center: ProjPoint
    s_c: object             # exact chart coordinate of the centre
    chart: str
    disk_radius: float
    v_bound: float
    node_id: int | None = None
    indeterminate: bool = False

    def centred(self, H):
        s, t = to_chart(H, self.chart)
        return s - mpc(self.s_c), t

    def contains(self, H) -> bool:
        try:
            e, t = self.centred(H)
        except ZeroDivisionError:
            return False
        return abs(e) < self.disk_radius and abs(t) < self.v_bound

    def in_uv(self):
        """The base disk in the ``u`` chart: (kind, centre, radius) with kind
        ``disk`` or ``exterior``."""
        c, r = complex(self.s_c), self.disk_radius
        if self.chart == U_V:
            return "disk", c, r
        m = abs(c) ** 2 - r * r
        if abs(m) < 1e-15:
            raise SeparationFailure(f"box {self.id} passes through u = 0 in the u chart")
        kind = "disk" if m > 0 else "exterior"
        return kind, c.conjugate() / m, r / abs(m)

    def to_json(self):
        return {"id": self.id, "node_id": self.node_id, "center": self.center.label(),
                "chart": self.chart, "disk_radius": self.disk_radius,
                "v_bound": self.v_bound, "indeterminate": self.indeterminate}


def boxes_disjoint(a: Box, b: Box, margin: float = 1e-12) -> bool:
    """Exact disjointness of two base disks (round disks or disk exteriors on
    the sphere)."""
    ka, ca, ra = a.in_uv()
    kb, cb, rb = b.in_uv()
    d = abs(ca - cb)
    if ka == "disk" and kb == "disk":
        return d > ra + rb + margin
    if ka == "exterior" and kb == "exterior":
        return False
    if ka == "exterior":
        ca, ra, cb, rb = cb, rb, ca, ra
    # disk (ca, ra) must lie inside the complement of the exterior, i.e. inside disk (cb, rb)
    return d + ra < rb - margin


def make_box(box_id: str, p: ProjPoint, r: float, eps: float, node_id=None,
             indeterminate=False) -> Box:
    chart, s_c = chart_of(p.z, p.w)
    vb = eps / math.sqrt(1 + abs(complex(s_c)) ** 2)
    return Box(box_id, p, s_c, chart, r, vb, node_id, indeterminate)


def _child_radius(f, child: Box, parent: Box, r_max: float, samples: int = 64) -> float:
    """Least radius whose base-circle image stays ``EXPAND * r_parent`` away
    from the parent centre."""
    cm = CentredMap(f, child.chart, child.s_c, parent.chart, parent.s_c)
    theta = np.exp(2j * np.pi * np.arange(samples) / samples)
    target = EXPAND * parent.disk_radius

    def ok(rho):
        e, _ = cm.np_image(rho * theta, np.zeros(samples))
        return bool(np.all(np.isfinite(e))) and float(np.min(np.abs(e))) >= target

    if not ok(r_max):
        return r_max
    lo, hi = 0.0, r_max
    for _ in range(40):
        mid = 0.5 * (lo + hi)
        lo, hi = (lo, mid) if ok(mid) else (mid, hi)
    return hi


def _layout(f, tree, r, eps, depth):
    nodes = [nd for nd in tree.nodes if nd.depth <= depth]
    boxes = {}
    for nd in nodes:
        if nd.is_indeterminate:
            boxes[nd.id] = make_box(f"n{nd.id}", nd.point, r, eps, nd.id, True)
    # an indeterminacy point mapped onto another one: shrink the image box
    # until the image of the source circle clears it
    theta = np.exp(2j * np.pi * np.arange(64) / 64)
    for _ in range(len(boxes) + 1):
        changed = False
        for nd in nodes:
            if not nd.is_indeterminate or nd.parent_id in (None, nd.id) or nd.parent_id not in boxes:
                continue
            src, dst = boxes[nd.id], boxes[nd.parent_id]
            cm = CentredMap(f, src.chart, src.s_c, dst.chart, dst.s_c)
            e, _ = cm.np_image(src.disk_radius * theta, np.zeros(64))
            reach = float(np.min(np.abs(e)))
            if reach < EXPAND * dst.disk_radius:
                dst.disk_radius = reach / (EXPAND * 1.05)
                changed = True
        if not changed:
            break
    for nd in nodes:
        if nd.is_indeterminate:
            continue
        b = make_box(f"n{nd.id}", nd.point, r, eps, nd.id, False)
        b.disk_radius = _child_radius(f, b, boxes[nd.parent_id], r)
        boxes[nd.id] = b
    return [boxes[nd.id] for nd in nodes]


def build_boxes(f, tree, r: float = 0.1, eps: float = 1e-3, depth: int | None = None,
                max_rounds: int = 20):
    """Boxes for the tree nodes of depth <= ``depth``.

    Indeterminacy boxes get radius ``r``; a child's radius is the least one
    whose f_inf-image covers ``EXPAND`` times its parent's disk.  All boxes
    must be pairwise disjoint; otherwise ``r`` and ``eps`` are halved.
    """
    bad = [rep for rep in periodicity_check(f) if rep.status == "Periodic"]
    if bad:
        raise HypothesisViolation(
            f"indeterminacy point {bad[0].index} is periodic for f_inf (period {bad[0].k}); "
            "the decomposition needs a special layout")
    if depth is None:
        depth = tree.depth_max
    for _ in range(max_rounds):
        boxes = _layout(f, tree, r, eps, depth)
        clash = next(((a, b) for k, a in enumerate(boxes) for b in boxes[k + 1:]
                      if not boxes_disjoint(a, b)), None)
        if clash is None:
            return boxes
        r, eps = r / 2, eps / 2
    raise SeparationFailure(f"boxes {clash[0].id} and {clash[1].id} still overlap "
                            f"after {max_rounds} rounds")


def example3_boxes(eps: float = 1e-3):
    """Nested disks around the indeterminacy point and one disk around [1:0]
    holding the unit circle: D0 = |u| < 0.02, D1 = |u| < 0.2, D2 = |W/Z| < 4."""
    I0 = ProjPoint.make(0, 1)
    inf = ProjPoint.make(1, 0)
    return [make_box("D0", I0, 0.02, eps, 0, True),
            make_box("D1", I0, 0.2, eps, 0, True),
            make_box("D2", inf, 4.0, eps, None, False)]


# ---------------------------------------------------------------------------
# certificates and slice degrees
# ---------------------------------------------------------------------------

def slice_degree_numeric(f, src: Box, dst: Box, t0=None) -> int:
    """Solutions in ``src`` of ``f(.) in`` the vertical line through the centre
    of ``dst``, on the horizontal slice ``t = t0`` (default ``v_bound/2``),
    counted with multiplicity and kept only when the image lies in ``dst``."""
    cm = CentredMap(f, src.chart, src.s_c, dst.chart, dst.s_c)
    if t0 is None:
        t0 = src.v_bound / 2
    count = 0
    for root, mult in uni_roots(cm.np_slice_coeffs(complex(t0))):
        if abs(root) >= src.disk_radius:
            continue
        _, tp = cm.np_image(np.array([root]), np.array([t0]))
        if np.isfinite(tp[0]) and abs(tp[0]) < dst.v_bound:
            count += mult
    return count


def horizontal_like_certificate(f, src: Box, dst: Box, boundary_samples: int = 256,
                                interior_samples: int = 2048, seed: int = 0) -> dict:
    """Sampled check that ``f: src -> dst`` is horizontal-like.

    (i) images of the vertical boundary avoid the closure of ``dst``;
    (ii) interior images landing over the base disk of ``dst`` stay below
    its vertical bound; (iii) ``f(src)`` meets ``dst`` (a slice root).
    """
    rng = rng_for(seed, 0)
    cm = CentredMap(f, src.chart, src.s_c, dst.chart, dst.s_c)
    r, vb = src.disk_radius, src.v_bound
    # (i)
    th = rng.uniform(0, 2 * np.pi, boundary_samples)
    rho = np.concatenate([[0.0, 1.0], rng.uniform(0, 1, boundary_samples - 2)])
    ph = rng.uniform(0, 2 * np.pi, boundary_samples)
    e = r * np.exp(1j * th)
    t = vb * rho * np.exp(1j * ph)
    ep, tp = cm.np_image(e, t)
    ratio = np.maximum(np.abs(ep) / dst.disk_radius, np.abs(tp) / dst.v_bound)
    ratio = np.where(np.isfinite(ratio), ratio, np.inf)
    k = int(np.argmin(ratio))
    margin_i = float(ratio[k]) - 1.0
    if margin_i <= 0:
        raise CertificateFailure(f"condition (i): vertical boundary of {src.id} maps into {dst.id}",
                                 sample={"e": complex(e[k]), "t": complex(t[k])})
    # (ii)
    e = r * np.sqrt(rng.uniform(0, 1, interior_samples)) * np.exp(1j * rng.uniform(0, 2 * np.pi, interior_samples))
    t = vb * np.sqrt(rng.uniform(0, 1, interior_samples)) * np.exp(1j * rng.uniform(0, 2 * np.pi, interior_samples))
    ep, tp = cm.np_image(e, t)
    land = np.isfinite(ep) & (np.abs(ep) < dst.disk_radius)
    worst = float(np.max(np.abs(tp[land]) / dst.v_bound)) if land.any() else 0.0
    margin_ii = 1.0 - worst
    if margin_ii <= 0:
        k = int(np.flatnonzero(land)[np.argmax(np.abs(tp[land]))])
        raise CertificateFailure(f"condition (ii): {src.id} image crosses the horizontal boundary of {dst.id}",
                                 sample={"e": complex(e[k]), "t": complex(t[k])})
    # (iii)
    deg = slice_degree_numeric(f, src, dst)
    if deg == 0:
        raise CertificateFailure(f"condition (iii): f({src.id}) misses {dst.id}")
    return {"src": src.id, "dst": dst.id, "margin_boundary": margin_i,
            "margin_horizontal": margin_ii, "landing_samples": int(land.sum()),
            "boundary_samples": boundary_samples, "interior_samples": interior_samples,
            "slice_degree": deg}


def certify_tree(f, tree, boxes, seed: int = 0, **kw):
    """Certificates for every box pair with positive transition degree."""
    by_node = {b.node_id: b for b in boxes}
    out = []
    for p, src in by_node.items():
        for q, dst in by_node.items():
            d = transition_degree(f, tree, p, q)
            if d == 0:
                continue
            cert = horizontal_like_certificate(f, src, dst, seed=seed, **kw)
            out.append({"p": p, "q": q, "transition_degree": d,
                        "slice_degree": cert["slice_degree"], "certificate": cert})
    return out


# ---------------------------------------------------------------------------
# forward orbits
# ---------------------------------------------------------------------------

@dataclass
class OrbitRecord:
    points: list            # (chart, s, t) per step, mpmath values
    log_norms: list
    itinerary: list         # box id or OUTSIDE per step
    image_itinerary: list = field(default_factory=list)   # box of f(point) per step (shot orbits)
    residuals: list = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["step", "chart", "coord1", "coord2", "log_norm", "box_id"])
        for k, ((chart, s, t), ln, b) in enumerate(zip(self.points, self.log_norms, self.itinerary)):
            wr.writerow([k, chart, mp.nstr(s, 17), mp.nstr(t, 17), mp.nstr(ln, 17), b])
        return buf.getvalue()

    def semi_conjugate(self) -> bool:
        return list(self.image_itinerary) == list(self.itinerary[1:len(self.image_itinerary) + 1])


def which_box(boxes, H) -> str:
    hits = [b for b in boxes if b.contains(H)]
    if not hits:
        return OUTSIDE
    return min(hits, key=lambda b: b.disk_radius).id


def iterate_orbit(f, q, n_steps: int, boxes=(), prec: int = PREC, eps_hit: float = 1e-30) -> OrbitRecord:
    """Forward orbit of ``q`` (an affine point ``(z, w)`` or a chart point
    ``(chart, s, t)``) with chart switching and box membership."""
    with mp.workprec(prec):
        if len(q) == 3 and isinstance(q[0], str):
            H = lift(q[0], mpc(q[1]), mpc(q[2]))
        else:
            H = (mpc(q[0]), mpc(q[1]), mp.mpc(1))
        H = normalize(H)
        F = HomMap(f)
        chart = best_chart(H)
        pts, norms, itin = [], [], []
        for k in range(n_steps + 1):
            chart = best_chart(H, chart)
            if abs(H[0 if chart == UPRIME else 1]) == 0:
                s, t = mp.mpc(0), mp.mpc(0)
            else:
                s, t = to_chart(H, chart)
            pts.append((chart, s, t))
            norms.append(log_norm(H))
            itin.append(which_box(boxes, H))
            if k == n_steps:
                break
            img = F(H)
            if max(abs(x) for x in img) <= eps_hit:
                raise IndeterminateEvaluation(f"iterate {k} lies on an indeterminacy point")
            H = normalize(img)
        return OrbitRecord(pts, norms, itin)


def green_function_seq(f, q, n_max: int = 20, prec: int = PREC) -> dict:
    """``u_n = D^-n log+ ||f^n(q)||`` with an almost-decreasing certificate.

    ``c_n`` is the tail sum of the increases of ``u``; ``u_n + c_n`` is then
    non-increasing on the computed range, and ``K = max c_n D^n`` bounds
    ``c_n <= K D^-n``.
    """
    rec = iterate_orbit(f, q, n_max, prec=prec)
    D = f.D
    u = []
    for n, ln in enumerate(rec.log_norms):
        val = 0.0 if ln == -mp.inf else max(float(ln), 0.0)
        u.append(val / D**n)
    inc = [max(u[n + 1] - u[n], 0.0) for n in range(n_max)]
    c = [sum(inc[n:]) for n in range(n_max + 1)]
    mono = all(u[n + 1] + c[n + 1] <= u[n] + c[n] + 1e-15 for n in range(n_max))
    K = max(cn * D**n for n, cn in enumerate(c))
    return {"u": u, "c": c, "monotone": mono, "K": K,
            "log_norms": [float(x) for x in rec.log_norms]}


# ---------------------------------------------------------------------------
# backward shooting
# ---------------------------------------------------------------------------

class Shooter:
    """Orbits with a prescribed itinerary, found by solving backwards.

    Starting from ``y_n`` deep in the last box, each ``y_j`` is the point of
    box ``alpha(j)`` with ``f(y_j) = y_{j+1}``: an inner Newton solve in the
    base coordinate on each horizontal slice, and an outer secant solve in
    ``log t`` for the vertical coordinate.  The result is a pseudo-orbit with
    step residuals at working precision.
    """

    def __init__(self, f, boxes, l_of, prec: int = PREC):
        self.f, self.boxes, self.l_of, self.prec = f, list(boxes), l_of, prec
        self._maps = {}

    def cmap(self, i: int, j: int) -> CentredMap:
        key = (i, j)
        if key not in self._maps:
            a, b = self.boxes[i], self.boxes[j]
            self._maps[key] = CentredMap(self.f, a.chart, a.s_c, b.chart, b.s_c)
        return self._maps[key]

    def _inner(self, cm, t, e_target, e_guess, r):
        tol = mp.mpf(2) ** (-(self.prec - 24))
        c = cm.slice_coeffs(t, e_target)
        dc = [k * c[k] for k in range(1, len(c))]
        e = e_guess
        for _ in range(100):
            p = mp.polyval(c[::-1], e)
            dp = mp.polyval(dc[::-1], e) if dc else mp.mpc(0)
            if dp == 0:
                break
            step = p / dp
            e -= step
            if abs(step) <= tol * abs(e) or p == 0:
                if abs(e) < r:
                    return e
                break
        roots = mp.polyroots(c[::-1], maxsteps=400, extraprec=2 * self.prec)
        inside = [x for x in roots if abs(x) < r]
        if not inside:
            raise OrbitLost("no slice root inside the source box")
        return min(inside, key=lambda x: abs(x - e_guess))

    def _step_back(self, i, j, e_next, t_next):
        """Point of box ``i`` mapping to ``(e_next, t_next)`` in box ``j``."""
        cm = self.cmap(i, j)
        src = self.boxes[i]
        l = self.l_of[i]
        tol = mp.mpf(2) ** (-(self.prec - 32))
        log_target = mp.log(t_next)

        def g(tau, e_guess):
            t = mp.exp(tau)
            e = self._inner(cm, t, e_next, e_guess, src.disk_radius)
            tp = cm.T(e, t) / cm.B(e, t)
            return mp.log(tp / t_next), e

        tau0 = log_target / l
        g0, e = g(tau0, mp.mpc(0))
        step = -g0 / l
        for _ in range(200):
            # halve the secant step while the slice loses its root in the box
            for _ in range(60):
                try:
                    g1, e1 = g(tau0 + step, e)
                    break
                except OrbitLost:
                    step /= 2
            else:
                raise OrbitLost("vertical solve left the source box")
            tau1, e = tau0 + step, e1
            if abs(g1) <= tol:
                return e, mp.exp(tau1)
            slope = (g1 - g0) / (tau1 - tau0)
            if slope == 0:
                slope = mp.mpf(l)
            tau0, g0 = tau1, g1
            step = -g1 / slope
        raise OrbitLost("vertical solve did not converge")

    def shoot(self, word, L: float | None = None, max_retries: int = 12) -> OrbitRecord:
        """Orbit with box itinerary ``word`` (box indices), ``len(word) - 1`` steps."""
        n = len(word) - 1
        with mp.workprec(self.prec):
            if L is None:
                L = math.log(1 / min(self.boxes[k].v_bound for k in word)) + 3
            for _ in range(max_retries):
                prod = 1
                for k in word[:-1]:
                    prod *= self.l_of[k]
                ys = [None] * (n + 1)
                ys[n] = (mp.mpc(0), mp.exp(-mp.mpf(L) * prod))
                try:
                    for j in range(n - 1, -1, -1):
                        ys[j] = self._step_back(word[j], word[j + 1], *ys[j + 1])
                except OrbitLost:
                    # too shallow: a run of contracting steps pushed |t| out of a box
                    L += 4
                    continue
                if all(abs(ys[j][1]) < self.boxes[word[j]].v_bound for j in range(n + 1)):
                    return self._record(word, ys)
                L += 4
            raise OrbitLost(f"could not place the orbit inside its boxes (L = {L})")

    def _record(self, word, ys) -> OrbitRecord:
        pts, norms, itin, img_itin, res = [], [], [], [], []
        for j, (e, t) in enumerate(ys):
            b = self.boxes[word[j]]
            s = mpc(b.s_c) + e
            pts.append((b.chart, s, t))
            norms.append(chart_log_norm(s, t))
            itin.append(which_box(self.boxes, lift(b.chart, s, t)))
            if j + 1 < len(ys):
                hit = []
                for k, dst in enumerate(self.boxes):
                    cm = self.cmap(word[j], k)
                    if cm.B(e, t) == 0:      # image at infinity in this chart
                        continue
                    ep, tp = cm.image(e, t)
                    if abs(ep) < dst.disk_radius and abs(tp) < dst.v_bound:
                        hit.append(dst)
                img_itin.append(min(hit, key=lambda x: x.disk_radius).id if hit else OUTSIDE)
                ep, tp = self.cmap(word[j], word[j + 1]).image(e, t)
                e1, t1 = ys[j + 1]
                res.append(float(max(abs(ep - e1) / self.boxes[word[j + 1]].disk_radius,
                                     abs(mp.log(tp / t1)))))
        return OrbitRecord(pts, norms, itin, img_itin, res)


# ---------------------------------------------------------------------------
# the totally invariant example
# ---------------------------------------------------------------------------

def example3_chart_map(u, v):
    """``(u, v) -> ((u^3 + v)/u, v^3/u)``."""
    return (u**3 + v) / u, v**3 / u


def example3_region_check(samples: int = 100_000, seed: int = 0) -> dict:
    """Rejection-sample ``V = {|u| < 1/2, |v| < |u|^3/4}`` and check ``f(V) in V``.

    Margins: ``1/2 - |u'|``; ``|u'| - |u|^2/2``; and the relative gap
    ``1 - |v'| / (|u'|^3/4)``.
    """
    rng = rng_for(seed, 0)
    us, vs = [], []
    have = 0
    while have < samples:
        m = 4 * (samples - have) + 1000
        u = 0.5 * np.sqrt(rng.uniform(0, 1, m)) * np.exp(2j * np.pi * rng.uniform(0, 1, m))
        v = (1 / 32) * np.sqrt(rng.uniform(0, 1, m)) * np.exp(2j * np.pi * rng.uniform(0, 1, m))
        keep = (np.abs(v) < np.abs(u) ** 3 / 4) & (np.abs(u) > 0)
        us.append(u[keep])
        vs.append(v[keep])
        have += int(keep.sum())
    u = np.concatenate(us)[:samples]
    v = np.concatenate(vs)[:samples]
    up, vp = example3_chart_map(u, v)
    inside = (np.abs(up) < 0.5) & (np.abs(vp) < np.abs(up) ** 3 / 4)
    m1 = 0.5 - np.abs(up)
    m2 = np.abs(up) - np.abs(u) ** 2 / 2
    m3 = 1 - np.abs(vp) / (np.abs(up) ** 3 / 4)
    # boundary stress at |u| = 0.499
    ub = 0.499 * np.exp(2j * np.pi * rng.uniform(0, 1, 1000))
    vb = (np.abs(ub) ** 3 / 4) * 0.999 * np.exp(2j * np.pi * rng.uniform(0, 1, 1000))
    ubp, _ = example3_chart_map(ub, vb)
    worst = float(min(m1.min(), m2.min(), m3.min()))
    return {"samples": int(samples), "violations": int((~inside).sum()),
            "margin_u_upper": float(m1.min()), "margin_u_lower": float(m2.min()),
            "margin_v": float(m3.min()), "worst_margin": worst,
            "boundary_max_abs_u": float(np.abs(ubp).max()),
            "boundary_bound": 0.25 + 0.499**2 / 4}


def example3_mass_collapse(depth: int = 20, degrees=(3, 1, 2), D: int = 3, start=(0, 1)) -> dict:
    """Iterate the slice-mass transfer ``m1 <- (d10 m1 + d12 m2)/D``,
    ``m2 <- d22 m2 / D`` exactly."""
    d10, d12, d22 = degrees
    m1, m2 = Fraction(start[0]), Fraction(start[1])
    hist = [(m1, m2)]
    for _ in range(depth):
        m1, m2 = (d10 * m1 + d12 * m2) / D, d22 * m2 / D
        hist.append((m1, m2))
    bound = Fraction(d22, D) ** depth
    return {"depth": depth, "degrees": list(degrees), "m1": m1, "m2": m2, "bound": bound,
            "m2_ok": m2 <= bound, "m1_ok": m1 >= 1 - bound, "history": hist}
