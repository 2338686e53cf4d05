"""Projective charts near the line at infinity, re-centred at exact points.

A chart point is ``(s, t)``; its homogeneous lift is ``(s, 1, t)`` in the
``u_v`` chart (s = Z/W, t = T/W) and ``(1, s, t)`` in the ``uprime_vprime``
chart (s = W/Z, t = T/Z).  The line at infinity is ``t = 0``.  Around a centre
``c`` we work with ``e = s - c``.  A :class:`CentredMap` keeps the image
polynomials in ``(e, t)`` with exact coefficients and already centred at the
destination, so points very close to either centre lose nothing to
cancellation.
"""

from __future__ import annotations

import mpmath as mp
import numpy as np

from .gclass import homogenize
from .numbers import GaussQ
from .polyalg import BiPoly

PREC = 256
U_V = "u_v"
UPRIME = "uprime_vprime"


def mpc(x):
    if isinstance(x, GaussQ):
        return mp.mpc(mp.mpf(x.re.numerator) / x.re.denominator,
                      mp.mpf(x.im.numerator) / x.im.denominator)
    if isinstance(x, (mp.mpc, mp.mpf)):
        return mp.mpc(x)
    x = complex(x)
    return mp.mpc(x.real, x.imag)


def chart_of(z, w):
    """Chart with the larger base coordinate and the exact centre in it."""
    if abs(complex(w)) >= abs(complex(z)):
        return U_V, z / w
    return UPRIME, w / z


class Poly2:
    """A polynomial in ``(e, t)`` (stored as BiPoly in ``(z, w)``) with mpmath
    and vectorized numpy evaluation."""

    def __init__(self, p: BiPoly):
        self.p = p
        items = sorted(p.terms.items())
        self.terms = [(i, j, mpc(c)) for (i, j), c in items]
        self.np_terms = [(i, j, complex(c)) for (i, j), c in items]
        self.deg_e = max((i for i, _, _ in self.terms), default=0)

    def __call__(self, e, t):
        acc = mp.mpc(0)
        for i, j, c in self.terms:
            acc += c * e**i * t**j
        return acc

    def np_eval(self, e, t):
        e = np.asarray(e, dtype=complex)
        t = np.asarray(t, dtype=complex)
        acc = np.zeros(np.broadcast(e, t).shape, dtype=complex)
        for i, j, c in self.np_terms:
            acc = acc + c * e**i * t**j
        return acc

    def coeffs_in_e(self, t):
        """Ascending coefficients in ``e`` at fixed ``t`` (mpmath)."""
        out = [mp.mpc(0)] * (self.deg_e + 1)
        for i, j, c in self.terms:
            out[i] += c * t**j
        return out

    def np_coeffs_in_e(self, t: complex):
        out = [0j] * (self.deg_e + 1)
        for i, j, c in self.np_terms:
            out[i] += c * t**j
        return out


def _lift_components(f, chart: str, c):
    """Homogeneous image ``(X, Y, T^D)`` of the lift of ``(c + e, t)``."""
    e, t = BiPoly.z(), BiPoly.w()
    s = e + c if c != 0 else e
    if chart == U_V:
        Z, W = s, BiPoly.const(1)
    else:
        Z, W = BiPoly.const(1), s
    f1, f2 = f.components()
    D = f.D
    out = []
    for H in (homogenize(f1, D), homogenize(f2, D), {(0, 0, D): 1}):
        acc = BiPoly()
        for (i, j, k), coef in H.items():
            acc = acc + (Z ** i) * (W ** j) * (t ** k) * coef
        out.append(acc)
    return out


class CentredMap:
    """``f`` from a centred source chart to a centred destination chart.

    With ``(X, Y, T')`` the homogeneous image, the destination base
    coordinate is ``c' + N/B`` and the vertical one ``T'/B`` where ``B`` is
    the destination's normalizing coordinate and ``N = A - c' B`` is formed
    exactly.
    """

    def __init__(self, f, src_chart: str, src_centre, dst_chart: str, dst_centre):
        self.src_chart, self.src_centre = src_chart, src_centre
        self.dst_chart, self.dst_centre = dst_chart, dst_centre
        X, Y, T = _lift_components(f, src_chart, src_centre)
        A, B = (X, Y) if dst_chart == U_V else (Y, X)
        N = A - B * dst_centre if dst_centre != 0 else A
        self.N, self.B, self.T = Poly2(N), Poly2(B), Poly2(T)
        self.c_dst = mpc(dst_centre)

    def image(self, e, t):
        """Centred destination coordinates ``(e', t')`` (mpmath)."""
        b = self.B(e, t)
        return self.N(e, t) / b, self.T(e, t) / b

    def np_image(self, e, t):
        with np.errstate(divide="ignore", invalid="ignore"):
            b = self.B.np_eval(e, t)
            return self.N.np_eval(e, t) / b, self.T.np_eval(e, t) / b

    def slice_coeffs(self, t, e_target=0):
        """Ascending coefficients in ``e`` of ``N - e_target * B`` at fixed ``t``."""
        n = self.N.coeffs_in_e(t)
        if e_target == 0:
            return n
        b = self.B.coeffs_in_e(t)
        m = max(len(n), len(b))
        n = n + [mp.mpc(0)] * (m - len(n))
        b = b + [mp.mpc(0)] * (m - len(b))
        return [x - e_target * y for x, y in zip(n, b)]

    def np_slice_coeffs(self, t: complex):
        return self.N.np_coeffs_in_e(t)


class HomMap:
    """The homogeneous extension ``[Z:W:T] -> [X:Y:T^D]`` with mpmath terms."""

    def __init__(self, f):
        f1, f2 = f.components()
        self.D = f.D
        self.parts = [[(i, j, k, mpc(c)) for (i, j, k), c in sorted(homogenize(p, f.D).items())]
                      for p in (f1, f2)]

    def __call__(self, H):
        Z, W, T = H
        out = []
        for part in self.parts:
            acc = mp.mpc(0)
            for i, j, k, c in part:
                acc += c * Z**i * W**j * T**k
            out.append(acc)
        return out[0], out[1], T**self.D


def lift(chart: str, s, t):
    if chart == U_V:
        return (s, mp.mpc(1), t)
    return (mp.mpc(1), s, t)


def normalize(H):
    """Scale so the largest coordinate has modulus 1."""
    m = max(abs(x) for x in H)
    if m == 0:
        raise ZeroDivisionError("zero homogeneous vector")
    return tuple(x / m for x in H)


def log_norm(H):
    """``log ||(Z/T, W/T)||``; ``-inf`` for the origin, ``inf`` at infinity."""
    Z, W, T = H
    top = abs(Z) ** 2 + abs(W) ** 2
    if top == 0:
        return -mp.inf
    if T == 0:
        return mp.inf
    return mp.log(top) / 2 - mp.log(abs(T))


def chart_log_norm(s, t):
    """``log ||p||`` from chart data: ``1/2 log(|s|^2 + 1) - log|t|``."""
    return mp.log(abs(s) ** 2 + 1) / 2 - mp.log(abs(t))


def to_chart(H, chart: str):
    """Chart coordinates ``(s, t)`` of a homogeneous point."""
    Z, W, T = H
    if chart == U_V:
        return Z / W, T / W
    return W / Z, T / Z


def best_chart(H, current: str | None = None, hysteresis: float = 0.1) -> str:
    """Chart with the larger base coordinate; leave the current chart only
    when the other coordinate dominates by more than ``hysteresis``."""
    Z, W, _ = H
    az, aw = abs(Z), abs(W)
    if current == U_V and aw * (1 + hysteresis) >= az:
        return U_V
    if current == UPRIME and az * (1 + hysteresis) >= aw:
        return UPRIME
    return U_V if aw >= az else UPRIME
