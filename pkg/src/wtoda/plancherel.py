"""Harish-Chandra c-function via the Gindikin-Karpelevic product and the
Plancherel density mu(nu) = 1 / (c(i nu) c(-i nu)).

Argument convention: the Beta factor is evaluated at -(nu, alpha)/(alpha,
alpha).  With this sign the product equals the defining integral
int_N a(n)^{nu - rho} dn exactly (flat measure on the strict upper-triangular
coordinates, ratio 1 verified numerically for SL(2) and SL(3)); the density
mu is insensitive to the choice because it pairs nu with -nu.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from wtoda.core_algebra import RootSystem, SpectralParam, dual_inner
from wtoda.errors import InvalidArgument
from wtoda.special_functions import POLE, log_beta

MU_CEILING = 1e15


@dataclass(frozen=True)
class PlancherelDensity:
    """mu with the measure-normalisation constant for the inversion formula.

    mu(nu) >= 0, mu(nu) = mu(-nu) = mu(w nu); values at c-zeros are clamped
    to MU_CEILING (cannot occur for type-A real nu away from the walls).
    """

    rs: RootSystem
    calibration_constant: float

    def __call__(self, nu) -> float:
        return mu_density(self, nu)


def c_alpha(rs: RootSystem, alpha, nu: SpectralParam) -> complex:
    """One Gindikin-Karpelevic factor; type A uses the single-Beta branch.

    The 2*alpha branch follows the product form with the doubled-root Beta
    factor; no supported group exercises it (type A is reduced), so it is a
    formula stub tested only at unit level.
    """
    alpha = np.asarray(alpha, dtype=float)
    z = -dual_inner(nu.as_complex(), alpha) / dual_inner(alpha, alpha)
    m_a = 1.0  # split type A
    doubled = tuple(2 * c for c in alpha) in {tuple(r) for r in rs.positive_roots}
    lb = log_beta(0.5 * m_a, z)
    if not doubled:
        if lb.real == math.inf:
            return POLE
        return cmath.exp(lb) if lb.real > -math.inf else 0.0
    m_2a = 1.0
    lb2 = log_beta(0.5 * m_2a, 0.5 * z + 0.5 * (m_a + m_2a))
    tot = lb + lb2
    if lb.real == math.inf or lb2.real == math.inf:
        return POLE
    return cmath.exp(tot) if tot.real > -math.inf else 0.0


def log_c_function(rs: RootSystem, nu: SpectralParam) -> complex:
    """log of the GK product; +inf real part marks a pole, -inf a zero."""
    total = 0.0 + 0.0j
    nu_c = nu.as_complex()
    for alpha in rs.positive():
        z = -np.dot(nu_c, alpha) / float(alpha @ alpha)
        lb = log_beta(0.5, z)
        if lb.real == math.inf:
            return POLE
        if lb.real == -math.inf:
            return complex(-math.inf, 0.0)
        total += lb
    return total


def c_function(rs: RootSystem, nu: SpectralParam) -> complex:
    """c(nu) = prod over positive roots of the GK factors (reduced system)."""
    lc = log_c_function(rs, nu)
    if lc.real == math.inf:
        return POLE
    if lc.real == -math.inf:
        return 0.0
    return cmath.exp(lc)


def mu_density(pd: PlancherelDensity, nu) -> float:
    """mu(nu) = calibration / (c(i nu) c(-i nu)) for real nu, in log space.

    Zeros of a c-factor give mu = 0; poles would give +inf and are clamped at
    MU_CEILING (documented ceiling; measure-zero set for type A).
    """
    nu = np.asarray(nu, dtype=float)
    if nu.shape != (pd.rs.n,):
        raise InvalidArgument(f"expected a real dual vector of length {pd.rs.n}")
    log_sum = 0.0
    for alpha in pd.rs.positive():
        s = float(nu @ alpha) / float(alpha @ alpha)
        lb_plus = log_beta(0.5, 1j * s)   # -(i nu, a)/(a,a) = -i s; pair with +i s
        lb_minus = log_beta(0.5, -1j * s)
        re = lb_plus.real + lb_minus.real
        if re == math.inf:   # Beta pole at s = 0: c blows up, mu vanishes
            return 0.0
        if re == -math.inf:  # would be a c-zero: mu = +inf, clamp
            return MU_CEILING
        log_sum += re
    val = pd.calibration_constant * math.exp(-log_sum)
    return min(val, MU_CEILING)


def mu_closed_form_a1(pd: PlancherelDensity, s: float) -> float:
    """Rank-1 closed form mu = cal * s tanh(pi s) / pi with s = (nu,a)/(a,a)."""
    return pd.calibration_constant * s * math.tanh(math.pi * s) / math.pi


def fit_polynomial_bound(pd: PlancherelDensity, nus: np.ndarray) -> tuple[float, float]:
    """Fit mu(nu) <= C (1 + ||nu||)^r over a grid; returns (C, r) with the
    bound exact-at-worst-point."""
    norms = np.array([math.sqrt(float(v @ v)) for v in nus])
    vals = np.array([mu_density(pd, v) for v in nus])
    keep = vals > 0.0
    if not np.any(keep):
        return 0.0, 0.0
    x = np.log1p(norms[keep])
    y = np.log(vals[keep])
    r = float(np.polyfit(x, y, 1)[0])
    c = float(np.max(vals[keep] / (1.0 + norms[keep]) ** r))
    return c, r
