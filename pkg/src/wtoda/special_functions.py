"""Gamma, Beta, and the modified Bessel function of imaginary order.

log_gamma uses a Lanczos rational approximation (g = 607/128, 15 terms) with
reflection for Re z < 1/2; poles are signalled by a +inf real part rather
than an exception so that downstream Beta/c-function arithmetic can treat
them in log space (pole -> +inf, zero -> -inf).

K_{i mu}(z) is the cosh-integral  int_0^inf exp(-z cosh t) cos(mu t) dt
evaluated on saddle-adapted contours.  The naive real-axis rule loses all
relative accuracy once mu > z (the result is exp(-pi mu / 2)-small against
an O(1) integrand), so two deformations are used:

* z >= mu: shift through the saddle i*arcsin(mu/z); the integrand becomes
  positive and monotone, no oscillation at all.
* z < mu: rectangle contour to Im t = -pi/2, which factors out the exact
  exp(-pi mu / 2) smallness and leaves bounded oscillatory pieces with
  frequency-matched panel counts.

Both branches were validated to ~1e-14 relative against high-precision
references over mu in [0, 20], z in [1e-5, 400].
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from wtoda.errors import InvalidArgument
from wtoda.quadrature import gauss_legendre, panel_nodes

_LANCZOS_G = 607.0 / 128.0
_LANCZOS = (
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
)
_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)

POLE = complex(math.inf, 0.0)


def _is_pole(z: complex) -> bool:
    return z.imag == 0.0 and z.real <= 0.0 and z.real == round(z.real)


def _lanczos_log_gamma(z: complex) -> complex:
    # requires Re z >= 0.5
    zm1 = z - 1.0
    s = _LANCZOS[0]
    for k in range(1, len(_LANCZOS)):
        s += _LANCZOS[k] / (zm1 + k)
    t = zm1 + _LANCZOS_G + 0.5
    return _LOG_SQRT_2PI + (zm1 + 0.5) * cmath.log(t) - t + cmath.log(s)


def _log_sin_pi_upper(z: complex) -> complex:
    # log sin(pi z) for Im z >= 0, overflow-free:
    # sin(pi z) = e^{-i pi z}(e^{2 i pi z} - 1)/(2i)
    return -1j * math.pi * z + cmath.log(cmath.exp(2j * math.pi * z) - 1.0) - cmath.log(2j)


def log_gamma(z) -> complex:
    """log Gamma(z); principal branch on Re z >= 1/2, poles return +inf."""
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise InvalidArgument("log_gamma needs a finite argument")
    if _is_pole(z):
        return POLE
    if z.imag < 0.0:
        return log_gamma(z.conjugate()).conjugate()
    if z.real >= 0.5:
        out = _lanczos_log_gamma(z)
    else:
        out = math.log(math.pi) - _log_sin_pi_upper(z) - _lanczos_log_gamma(1.0 - z)
    if z.imag == 0.0:
        out = complex(out.real, 0.0)
    return out


def gamma(z) -> complex:
    """Gamma(z) via exp(log_gamma); +inf at poles."""
    lg = log_gamma(z)
    if lg.real == math.inf:
        return POLE
    return cmath.exp(lg)


def log_beta(a, b) -> complex:
    """log B(a,b) in the pole/zero-tolerant log convention (+inf pole, -inf zero)."""
    la, lb, lab = log_gamma(a), log_gamma(b), log_gamma(complex(a) + complex(b))
    if lab.real == math.inf:
        if la.real == math.inf or lb.real == math.inf:
            return POLE  # indeterminate corner: dominated by the factor poles
        return complex(-math.inf, 0.0)
    if la.real == math.inf or lb.real == math.inf:
        return POLE
    return la + lb - lab


def beta(a, b) -> complex:
    """Euler Beta B(a,b) = Gamma(a)Gamma(b)/Gamma(a+b); symmetric in (a,b)."""
    lb = log_beta(a, b)
    if lb.real == math.inf:
        return POLE
    if lb.real == -math.inf:
        return complex(0.0, 0.0)
    return cmath.exp(lb)


def abs_gamma_half_plus_is(s: float) -> float:
    """|Gamma(1/2 + i s)| = sqrt(pi / cosh(pi s)), overflow-safe."""
    return math.sqrt(math.pi) * math.exp(-0.5 * _log_cosh(math.pi * s))


def _log_cosh(x: float) -> float:
    ax = abs(x)
    return ax + math.log1p(math.exp(-2.0 * ax)) - math.log(2.0)


def _k_monotone(mu: float, z: np.ndarray) -> np.ndarray:
    """K_{i mu}(z) for z >= mu: non-oscillatory shifted-contour integral.

    Path Im phi = 0 through the saddle i*arcsin(mu/z); integrand
    exp(-z cosh u cos v(u) - mu v(u)) with sin v(u) = mu u / (z sinh u).
    """
    zmin = float(z.min())
    arg = (55.0 + 2.0 * mu) / zmin
    U = max(3.0, math.acosh(arg) if arg > 1.0 else 3.0)
    u, w = panel_nodes(0.0, U, 16, max(8, int(2.0 * U)))
    small = np.abs(u) < 1e-6
    ratio = np.where(small, 1.0 - u * u / 6.0, u / np.sinh(np.where(small, 1.0, u)))
    sf = np.minimum(1.0, (mu / z)[:, None] * ratio[None, :])
    v = np.arcsin(sf)
    g = -z[:, None] * np.cosh(u)[None, :] * np.sqrt(1.0 - sf * sf) - mu * v
    s0 = np.minimum(1.0, mu / z)
    g0 = -z * np.sqrt(1.0 - s0 * s0) - mu * np.arcsin(s0)  # peak value g(0), per z
    out = np.exp(np.maximum(g - g0[:, None], -745.0)) @ w
    return np.where(g0 < -700.0, 0.0, np.exp(np.maximum(g0, -745.0)) * out)


def _k_oscillatory(mu: float, z: float) -> float:
    """K_{i mu}(z) for 0 < z < mu via the rectangle contour to Im t = -pi/2."""
    s1 = math.acosh(1.6 * mu / z)
    phase = mu * s1 + z * math.sinh(s1)
    u, w = panel_nodes(0.0, s1, 16, max(8, int(phase / 2.5) + 1))
    head = float(np.dot(w, np.cos(mu * u - z * np.sinh(u))))
    q, wq = panel_nodes(0.0, 0.5 * math.pi, 16, max(6, int(mu / 2.0) + 1))
    vert = float(np.dot(
        wq, np.exp(mu * q - z * math.cosh(s1) * np.sin(q))
        * np.sin(mu * s1 - z * math.sinh(s1) * np.cos(q))))
    umax = math.acosh((0.5 * math.pi * mu + 50.0) / z)
    uu, wu = panel_nodes(s1, umax, 16, max(6, int(mu * (umax - s1) / 2.5) + 2))
    horiz = float(np.dot(wu, np.exp(0.5 * math.pi * mu - z * np.cosh(uu)) * np.cos(mu * uu)))
    return math.exp(-0.5 * math.pi * mu) * (head + vert + horiz)


def bessel_k_imaginary_order(mu: float, z):
    """K_{i mu}(z) = int_0^inf exp(-z cosh t) cos(mu t) dt, real for real inputs.

    Parameters
    ----------
    mu : real order parameter (function is even in mu)
    z : positive scalar or array

    Accuracy ~1e-13 relative for mu in [0, 20], z in [1e-5, 400]; decays like
    exp(-z) for large z and is clamped to 0 below the double-precision floor.
    """
    mu = abs(float(mu))
    arr = np.asarray(z, dtype=float)
    scalar = arr.ndim == 0
    zv = np.atleast_1d(arr)
    if np.any(zv <= 0.0) or not np.all(np.isfinite(zv)):
        raise InvalidArgument("bessel_k_imaginary_order requires z > 0")
    out = np.empty_like(zv)
    mono = zv >= mu
    if mono.any():
        out[mono] = _k_monotone(mu, zv[mono])
    for i in np.nonzero(~mono)[0]:
        out[i] = _k_oscillatory(mu, float(zv[i]))
    return float(out[0]) if scalar else out
