"""Independent test oracles: brute-force constructions that never share code
paths with the implementations they check."""

from __future__ import annotations

import cmath
import math

import numpy as np


def rho_from_ad_trace(n: int) -> np.ndarray:
    """rho via (1/2) tr(ad h | n) on literal matrix commutators, one e_k at a time."""
    out = np.zeros(n)
    basis_n = [(i, j) for i in range(n) for j in range(i + 1, n)]
    for k in range(n):
        h = np.zeros((n, n))
        h[k, k] = 1.0
        tr = 0.0
        for (i, j) in basis_n:
            e = np.zeros((n, n))
            e[i, j] = 1.0
            comm = h @ e - e @ h
            tr += comm[i, j]  # ad(h) is diagonal on the E_ij basis
        out[k] = 0.5 * tr
    return out


def bessel_k_raw_quadrature(mu: float, z: float, tmax: float | None = None) -> float:
    """K_{i mu}(z) by step-halved trapezoid on the real-axis cosh integral.

    Only trustworthy where the answer is not exponentially small against the
    integrand (mu <~ 5); used as an oracle in precisely that regime.
    """
    if tmax is None:
        tmax = math.acosh(746.0 / z) if z < 700.0 else 1.0
    n = 512
    prev = None
    for _ in range(14):
        t = np.linspace(0.0, tmax, n + 1)
        f = np.exp(-z * np.cosh(t)) * np.cos(mu * t)
        val = np.trapezoid(f, t)
        if prev is not None and abs(val - prev) <= 1e-14 * max(1.0, abs(val)):
            return val
        prev = val
        n *= 2
    return prev


def log_gamma_series(z: complex, terms: int = 200000) -> complex:
    """log Gamma via the Euler product-limit definition (slow, independent)."""
    z = complex(z)
    n = terms
    s = z * math.log(n) - cmath.log(z)
    for k in range(1, n + 1):
        s += math.log(k) - cmath.log(z + k)
    return s


def bessel_i_imag_order_series(mu: float, z: float, terms: int = 120) -> complex:
    """I_{i mu}(z) by its Maclaurin series using log-gamma from math/cmath only."""
    out = 0.0 + 0.0j
    half = z / 2.0
    log_half = math.log(half)
    for k in range(terms):
        lg = _lgamma_complex(k + 1.0 + 1j * mu)
        term = cmath.exp((2 * k + 1j * mu) * log_half - math.lgamma(k + 1) - lg)
        out += term
        if abs(term) < 1e-25 * max(1.0, abs(out)) and k > 4:
            break
    return out


def _lgamma_complex(w: complex) -> complex:
    """log Gamma for Re w >= 1 via Stirling with argument shifting (oracle-grade)."""
    shift = 0
    while w.real < 20.0:
        w += 1.0
        shift += 1
    b = [1.0 / 12, -1.0 / 360, 1.0 / 1260, -1.0 / 1680, 1.0 / 1188,
         -691.0 / 360360, 1.0 / 156, -3617.0 / 122400]
    s = (w - 0.5) * cmath.log(w) - w + 0.5 * math.log(2 * math.pi)
    wk = w
    for i, c in enumerate(b):
        s += c / wk
        wk *= w * w
    for j in range(shift):
        s -= cmath.log(w - 1 - j)
    return s


def bessel_k_from_i_series(mu: float, z: float) -> float:
    """K_{i mu}(z) = -pi Im I_{i mu}(z) / sinh(pi mu); series-based oracle.

    Loses relative accuracy like exp(2 z) * eps; use for z <= ~6.
    """
    if mu == 0.0:
        raise ValueError("combination formula needs mu != 0")
    im = bessel_i_imag_order_series(mu, z).imag
    return -math.pi * im / math.sinh(math.pi * mu)


def adaptive_simpson(f, a: float, b: float, tol: float = 1e-10, depth: int = 24):
    """Plain recursive adaptive Simpson for scalar integrands (oracle only)."""
    fa, fm, fb = f(a), f(0.5 * (a + b)), f(b)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)

    def rec(a, b, fa, fm, fb, whole, d):
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
        right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
        if d <= 0 or abs(left + right - whole) <= 15.0 * tol:
            return left + right + (left + right - whole) / 15.0
        return (rec(a, m, fa, flm, fm, left, d - 1)
                + rec(m, b, fm, frm, fb, right, d - 1))

    return rec(a, b, fa, fm, fb, whole, depth)


def fd_second_derivative(f, x: float, h: float = 1e-3) -> float:
    """5-point fourth-order central second derivative."""
    return (-f(x + 2 * h) + 16 * f(x + h) - 30 * f(x) + 16 * f(x - h) - f(x - 2 * h)) / (12 * h * h)
