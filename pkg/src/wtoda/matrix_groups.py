"""Matrix-level realisation of the group side: Iwasawa decompositions, the
norms |g| and ||g||, generic characters of N, and brute-force quadrature
oracles for the c-function, Jacquet integrals and the kernel-of-chi probe.

Conventions
-----------
* NbarAK: g = nbar * a * k (nbar lower unitriangular) via the lower Cholesky
  factor of g g^T; a(g) is its diagonal.  NAK analogously from the upper side.
* N is parametrised by its strict upper-triangular entries in the fixed order
  (1,2), (2,3), ..., (1,3), ...; Haar measure on N is the flat Lebesgue
  measure in these coordinates.
* Characters: chi(n) = exp(i * sum_alpha xi_alpha * x_alpha(n)) on the simple
  root coordinates; generic iff every xi_alpha is nonzero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from wtoda.core_algebra import RootSystem, SpectralParam
from wtoda.errors import InvalidArgument, PreconditionError
from wtoda.quadrature import gauss_legendre, graded_nodes

GROUP_GL_PLUS = "GL_plus"
GROUP_SL = "SL"


@dataclass(frozen=True)
class IwasawaNbarAK:
    nbar: np.ndarray
    a: np.ndarray
    k: np.ndarray

    def reassemble(self) -> np.ndarray:
        return self.nbar @ np.diag(self.a) @ self.k


@dataclass(frozen=True)
class CharacterData:
    """Generic character data: xi_alpha = -i * dchi(X_alpha) per simple root."""

    xi: tuple[float, ...]

    @property
    def generic(self) -> bool:
        return all(x != 0.0 for x in self.xi)

    def require_generic(self) -> None:
        if not self.generic:
            raise PreconditionError(f"character with xi={self.xi} is not generic")

    def inverse(self) -> "CharacterData":
        return CharacterData(xi=tuple(-x for x in self.xi))


@dataclass(frozen=True)
class QuadResult:
    value: complex
    err_est: float
    converged: bool

    def __complex__(self):
        return complex(self.value)


def check_group(g: np.ndarray, group_tag: str = GROUP_SL, tol: float = 1e-9) -> np.ndarray:
    g = np.asarray(g, dtype=float)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise InvalidArgument(f"expected a square matrix, got shape {g.shape}")
    det = np.linalg.det(g)
    if group_tag == GROUP_SL:
        if abs(det - 1.0) > tol * max(1.0, abs(det)):
            raise InvalidArgument(f"SL element must have det 1, got {det}")
    elif group_tag == GROUP_GL_PLUS:
        if det <= 0.0:
            raise InvalidArgument(f"GL_plus element must have det > 0, got {det}")
    else:
        raise InvalidArgument(f"unknown group tag {group_tag!r}")
    return g


def iwasawa_nbar_ak(g: np.ndarray) -> IwasawaNbarAK:
    """g = nbar a k with nbar lower unitriangular, a > 0 diagonal, k orthogonal.

    Lower Cholesky of g g^T; raises on numerically singular input with the
    condition estimate attached.
    """
    g = np.asarray(g, dtype=float)
    cond = np.linalg.cond(g)
    if not np.isfinite(cond) or cond > 1e12:
        raise PreconditionError(f"numerically singular input; cond(g) ~ {cond:.3e}")
    m = g @ g.T
    try:
        low = np.linalg.cholesky(m)
    except np.linalg.LinAlgError as exc:
        raise PreconditionError(
            f"Iwasawa factorisation failed; cond(g) ~ {cond:.3e}") from exc
    a = np.diag(low).copy()
    nbar = low / a[None, :]
    k = np.linalg.solve(low, g)
    return IwasawaNbarAK(nbar=nbar, a=a, k=k)


def iwasawa_nak(g: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """g = n a k with n upper unitriangular; consistency a_o(g) = a(theta g)^{-1}."""
    g = np.asarray(g, dtype=float)
    n_ = g.shape[0]
    cond = np.linalg.cond(g)
    if not np.isfinite(cond) or cond > 1e12:
        raise PreconditionError(f"numerically singular input; cond(g) ~ {cond:.3e}")
    flip = np.eye(n_)[::-1]
    m = flip @ g @ g.T @ flip
    try:
        low = np.linalg.cholesky(m)
    except np.linalg.LinAlgError as exc:
        raise PreconditionError(
            f"Iwasawa factorisation failed; cond(g) ~ {cond:.3e}") from exc
    upper = flip @ low @ flip  # upper triangular, positive diagonal, U U^T = g g^T
    a = np.diag(upper).copy()
    n = upper / a[None, :]
    k = np.linalg.solve(upper, g)
    return n, a, k


def a_of(g: np.ndarray) -> np.ndarray:
    """The positive diagonal a(g) of the NbarAK decomposition."""
    return iwasawa_nbar_ak(g).a


def a_o_of(g: np.ndarray) -> np.ndarray:
    """a_o(g): the A-part of NAK; equals a(theta(g))^{-1}."""
    return iwasawa_nak(g)[1]


def theta(g: np.ndarray) -> np.ndarray:
    """Cartan involution g -> (g^T)^{-1}."""
    return np.linalg.inv(np.asarray(g, dtype=float).T)


def _sl_basis(n: int) -> np.ndarray:
    """Orthonormal basis of sl(n) inside gl(n) ~ R^{n^2} (row-major vec)."""
    rows = []
    for i in range(n):
        for j in range(n):
            if i != j:
                e = np.zeros((n, n))
                e[i, j] = 1.0
                rows.append(e.ravel())
    for k in range(1, n):
        d = np.zeros(n)
        d[:k] = 1.0
        d[k] = -float(k)
        d /= np.linalg.norm(d)
        rows.append(np.diag(d).ravel())
    return np.array(rows)


def ad_matrix(g: np.ndarray, group_tag: str = GROUP_SL) -> np.ndarray:
    """Matrix of Int(g): x -> g x g^{-1} in an orthonormal basis of Lie(G)."""
    g = np.asarray(g, dtype=float)
    ginv = np.linalg.inv(g)
    full = np.kron(g, ginv.T)  # row-major vec(g X g^{-1}) = (g (x) g^{-T}) vec X
    if group_tag == GROUP_GL_PLUS:
        return full
    basis = _sl_basis(g.shape[0])
    return basis @ full @ basis.T


def norm_bars(g: np.ndarray, group_tag: str = GROUP_SL) -> float:
    """|g|: operator norm of the dim(n)-th exterior power of Int(g).

    Equals the product of the m = dim(nilradical) largest singular values of
    Ad(g); satisfies |g| >= 1 on SL and |kg| = |gk| = |g| for orthogonal k.
    """
    g = np.asarray(g, dtype=float)
    m = g.shape[0] * (g.shape[0] - 1) // 2
    sv = np.linalg.svd(ad_matrix(g, group_tag), compute_uv=False)
    return float(np.prod(sv[:m]))


def norm_doublebar(g: np.ndarray, group_tag: str = GROUP_SL) -> float:
    """||g||: for SL this is |g|^{1/2}; for GL_plus the central part contributes
    exp(||log(c I)||) with c = det(g)^{1/n}."""
    g = np.asarray(g, dtype=float)
    n = g.shape[0]
    if group_tag == GROUP_SL:
        return math.sqrt(norm_bars(g, group_tag))
    det = float(np.linalg.det(g))
    if det <= 0:
        raise InvalidArgument("GL_plus requires det > 0")
    c = det ** (1.0 / n)
    semisimple = g / c
    return math.exp(math.sqrt(n) * abs(math.log(c))) * math.sqrt(
        norm_bars(semisimple, GROUP_SL))


def wedge_top_norm(g: np.ndarray, lower: bool = True) -> float:
    """|| wedge^m Ad(g)^{-1} u_o || for u_o the unit top vector of wedge^m(nbar).

    Gram-determinant evaluation; the identity a(g)^{2 rho} = this norm is a
    property-test target.
    """
    g = np.asarray(g, dtype=float)
    n = g.shape[0]
    ginv = np.linalg.inv(g)
    vecs = []
    for i in range(n):
        for j in range(n):
            if (i > j) if lower else (i < j):
                e = np.zeros((n, n))
                e[i, j] = 1.0
                vecs.append((ginv @ e @ g).ravel())
    gram = np.array(vecs) @ np.array(vecs).T
    return float(math.sqrt(max(0.0, np.linalg.det(gram))))


def random_sl(n: int, rng: np.random.Generator) -> np.ndarray:
    """Seeded ensemble: i.i.d. standard normal entries, projected to SL by
    determinant rescaling (first row negated when det < 0)."""
    while True:
        g = rng.standard_normal((n, n))
        det = float(np.linalg.det(g))
        if abs(det) > 1e-8:
            break
    if det < 0:
        g[0] *= -1.0
        det = -det
    return g / det ** (1.0 / n)


# --- N-coordinate machinery -------------------------------------------------

def n_coordinate_order(n: int) -> list[tuple[int, int]]:
    """Fixed coordinate order on N: superdiagonals first, then longer ranges."""
    return [(i, i + d) for d in range(1, n) for i in range(n - d)]


def n_matrix(n: int, coords: np.ndarray) -> np.ndarray:
    out = np.eye(n)
    for c, (i, j) in zip(coords, n_coordinate_order(n)):
        out[i, j] = c
    return out


def _check_convergence_region(rs: RootSystem, nu: SpectralParam) -> np.ndarray:
    nu_c = nu.as_complex()
    if len(nu_c) != rs.n:
        raise InvalidArgument(f"nu has {len(nu_c)} coords, expected {rs.n}")
    for alpha in rs.positive():
        if (nu.re @ alpha) >= 0.0:
            raise PreconditionError(
                f"Re(nu, alpha) = {nu.re @ alpha:.3g} >= 0 for alpha={alpha}: "
                "outside the absolute convergence region")
    return nu_c


def _sl2_iwasawa_exponent(x, nu_c, rho, a0_diag=None):
    if a0_diag is None:
        t1 = t2 = 1.0
    else:
        t1, t2 = a0_diag
    d1 = t1 * t1 + (x * t2) ** 2
    la1 = 0.5 * np.log(d1)
    la2 = math.log(t1 * t2) - la1
    return (nu_c[0] - rho[0]) * la1 + (nu_c[1] - rho[1]) * la2


def _sl3_iwasawa_exponent(x, y, z, nu_c, rho, a0_diag=None):
    """log-exponent (nu - rho)(log a(n a0)) on the coordinate grid.

    n = [[1,x,z],[0,1,y],[0,0,1]]; optional right translation by a0 (diagonal).
    Principal minors of (n a0)(n a0)^T give the Iwasawa diagonal.
    """
    if a0_diag is None:
        t1 = t2 = t3 = 1.0
    else:
        t1, t2, t3 = a0_diag
    # rows of n a0: (t1, x t2, z t3), (0, t2, y t3), (0, 0, t3)
    m11 = t1 * t1 + (x * t2) ** 2 + (z * t3) ** 2
    m12 = x * t2 * t2 + z * y * t3 * t3
    m22 = t2 * t2 + (y * t3) ** 2
    d1 = m11
    d2 = m11 * m22 - m12 ** 2
    d3 = (t1 * t2 * t3) ** 2
    la1 = 0.5 * np.log(d1)
    la2 = 0.5 * (np.log(d2) - np.log(d1))
    la3 = 0.5 * (np.log(d3) - np.log(d2))
    return ((nu_c[0] - rho[0]) * la1 + (nu_c[1] - rho[1]) * la2
            + (nu_c[2] - rho[2]) * la3)


def _n_integral(rs: RootSystem, nu: SpectralParam, radius: float, nodes_1d: int,
                phase_xi: tuple[float, ...] | None, a0_diag=None) -> complex:
    """Flat-measure integral over N of chi(n)^{-1} a(n a0)^{nu - rho}.

    phase_xi None means chi = 1.  Graded panels toward 0 resolve the O(1)
    Iwasawa feature; the tail needs Re(nu, alpha) < 0.
    """
    nu_c = nu.as_complex()
    rho = rs.rho
    pps = max(8, int(nodes_1d / 16))
    cap = np.inf
    if phase_xi is not None:
        fmax = max(abs(x) for x in phase_xi)
        if a0_diag is not None:
            # translation rescales the frequency on each simple-root coordinate
            scale = max(float(a0_diag[j] / a0_diag[j + 1]) for j in range(rs.n - 1))
            fmax *= max(scale, 1.0)
        if fmax > 0:
            cap = 1.5 * 2.0 * math.pi / fmax
    xs, ws = graded_nodes(radius, 16, pps, max_panel=cap)
    if rs.n == 2:
        e = _sl2_iwasawa_exponent(xs, nu_c, rho, a0_diag)
        f = np.exp(e)
        if phase_xi is not None:
            f = f * np.exp(-1j * phase_xi[0] * xs)
        return complex(np.sum(ws * f))
    if rs.n == 3:
        total = 0.0 + 0.0j
        y = xs[None, :, None]
        zz = xs[None, None, :]
        wyz = ws[None, :, None] * ws[None, None, :]
        phase_yz = 1.0
        if phase_xi is not None:
            phase_yz = np.exp(-1j * phase_xi[1] * y)
        for i0 in range(0, len(xs), 24):
            x = xs[i0:i0 + 24][:, None, None]
            wx = ws[i0:i0 + 24][:, None, None]
            e = _sl3_iwasawa_exponent(x, y, zz, nu_c, rho, a0_diag)
            f = np.exp(e)
            if phase_xi is not None:
                f = f * np.exp(-1j * phase_xi[0] * x) * phase_yz
            total += np.sum(wx * wyz * f)
        return complex(total)
    raise InvalidArgument("N-integrals are implemented for n = 2 and n = 3")


def c_function_quadrature(rs: RootSystem, nu: SpectralParam, quad) -> QuadResult:
    """c(nu) = int_N a(n)^{nu - rho} dn by brute-force flat-measure quadrature.

    Requires Re(nu, alpha) < 0 for every positive root; reports a step-halving
    error estimate and flags non-convergence instead of silently truncating.
    """
    _check_convergence_region(rs, nu)
    radius = float(quad.radius)
    nodes = int(quad.nodes_per_dim)
    v1 = _n_integral(rs, nu, radius, nodes, None)
    v2 = _n_integral(rs, nu, 2.0 * radius, 2 * nodes, None)
    err = abs(v2 - v1)
    tol = float(getattr(quad, "tol", 1e-8))
    return QuadResult(value=v2, err_est=err, converged=bool(err <= tol * max(1.0, abs(v2))))


def jacquet_quadrature(rs: RootSystem, chi: CharacterData, nu: SpectralParam,
                       quad, h=None) -> QuadResult:
    """J_{chi,nu}(pi_nu(exp h) 1) = int_N chi(n)^{-1} a(n exp h)^{nu-rho} dn.

    With h = None this is J_{chi,nu}(1); with chi trivial (all xi = 0) it
    reduces to the c-function integral.
    """
    _check_convergence_region(rs, nu)
    if len(chi.xi) != rs.n - 1:
        raise InvalidArgument(f"character needs {rs.n - 1} xi values")
    a0_diag = None
    if h is not None:
        h = rs.check_cartan(np.asarray(h, dtype=float))
        a0_diag = np.exp(h)
    phase = None if all(x == 0.0 for x in chi.xi) else chi.xi
    radius = float(quad.radius)
    nodes = int(quad.nodes_per_dim)
    v1 = _n_integral(rs, nu, radius, nodes, phase, a0_diag)
    v2 = _n_integral(rs, nu, 2.0 * radius, 2 * nodes, phase, a0_diag)
    err = abs(v2 - v1)
    tol = float(getattr(quad, "tol", 1e-8))
    return QuadResult(value=v2, err_est=err, converged=bool(err <= tol * max(1.0, abs(v2))))


def jacquet_phase_field(rs: RootSystem, nu: SpectralParam, radius: float,
                        nodes_1d: int, max_frequency: float = 1.0,
                        ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Character-free Jacquet integrand collapsed onto the simple-root coords.

    Returns (xs, ws, F) with F(x) = a(n(x))^{nu-rho} for SL(2) and
    F(x, y) = int a(n(x,y,z))^{nu-rho} dz for SL(3).  Because right
    translation by exp(h) only rescales the character frequencies
    (J_{chi,nu}(pi(exp h)1) = e^{(nu+rho)(h)} * sum w_i e^{-i xi'_j x_j} F),
    one field serves every h-translate; panels are capped at a fraction of
    the shortest character wavelength that will be applied.
    """
    _check_convergence_region(rs, nu)
    nu_c = nu.as_complex()
    rho = rs.rho
    pps = max(6, int(nodes_1d / 16))
    cap = 1.5 * (2.0 * math.pi / max(max_frequency, 1e-6))
    xs, ws = graded_nodes(radius, 16, pps, max_panel=cap)
    if rs.n == 2:
        return xs, ws, np.exp(_sl2_iwasawa_exponent(xs, nu_c, rho))
    if rs.n == 3:
        return xs, ws, _sl3_field_zexact(xs, nu_c, rho)
    raise InvalidArgument("phase field implemented for n = 2 and n = 3")


_Z_PANEL_FRACTIONS = (0.0, 0.06, 0.25, 0.6, 1.0)
_Z_NODES_PER_PANEL = 12


def _sl3_field_zexact(xs: np.ndarray, nu_c: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """F(x,y) = int_R D1^p D2^r dz with the z-line integrated exactly.

    The integrand factors as D1 = 1 + x^2 + z^2 and D2 = (xy - z)^2 + 1 + y^2
    (a two-bell convolution profile).  Splitting at the midpoint xy/2 and
    substituting z = A tan(theta) (resp. z = xy - B tan(phi)) with
    A^2 = 1 + x^2, B^2 = 1 + y^2 maps each half onto a finite theta-interval
    with a bounded integrand, so no z-truncation error exists at all.
    """
    c = nu_c - rho
    p = 0.5 * (c[0] - c[1])
    r = 0.5 * (c[1] - c[2])
    x = xs[:, None]
    y = xs[None, :]
    a = np.sqrt(1.0 + x * x)          # (nx, 1)
    b = np.sqrt(1.0 + y * y)          # (1, ny)
    xy = x * y
    m = 0.5 * xy
    log_a, log_b = np.log(a), np.log(b)
    gl_x, gl_w = gauss_legendre(_Z_NODES_PER_PANEL)
    out = np.zeros((len(xs), len(xs)), dtype=complex)
    for swap in (False, True):
        # swap=False: bell of D1 at z=0;  swap=True: bell of D2 at z=xy
        scale = a if not swap else b
        theta_top = np.arctan(m / scale)
        span = theta_top + 0.5 * np.pi
        pw_sec = (2.0 * p + 2.0) if not swap else (2.0 * r + 2.0)
        pw_other = r if not swap else p
        pref = np.exp((2.0 * p + 1.0) * log_a) if not swap else np.exp((2.0 * r + 1.0) * log_b)
        other_sq = b * b if not swap else a * a
        acc = np.zeros_like(out)
        for f0, f1 in zip(_Z_PANEL_FRACTIONS[:-1], _Z_PANEL_FRACTIONS[1:]):
            for gx, gw in zip(gl_x, gl_w):
                frac = f0 + (f1 - f0) * 0.5 * (gx + 1.0)
                theta = -0.5 * np.pi + span * frac
                w = gw * 0.5 * (f1 - f0) * span
                tan_t = np.tan(theta)
                # piece 1 (swap=False): z = A tan(theta); offset from the D2
                # bell is xy - z.  piece 2: z = xy - B tan(phi); offset from
                # the D1 bell is z itself = xy - B tan(phi).  Both read
                # xy - scale * tan.
                dist = xy - scale * tan_t
                log_sec_sq = -2.0 * np.log(np.cos(theta))
                val = np.exp(0.5 * pw_sec * log_sec_sq
                             + pw_other * np.log(dist * dist + other_sq))
                acc += w * val
        out += pref * acc
    return out


def jacquet_from_field(rs: RootSystem, nu: SpectralParam, field_data, chi: CharacterData,
                       h, tail_correct: bool = True) -> complex:
    """J_{chi,nu}(pi_nu(exp h) 1) from a precomputed phase field.

    Uses the rescaling identity: translation by exp(h) multiplies by
    e^{(nu+rho)(h)} and scales the character frequency on the alpha_j
    coordinate by e^{alpha_j(h)}.  The truncated oscillatory tails beyond the
    field radius are restored to first order by endpoint integration by
    parts,  int_R^inf g e^{-i xi x} dx ~ g(R) e^{-i xi R}/(i xi),  which is
    what makes moderate radii usable at the slow scaled frequencies.
    """
    xs, ws, field = field_data
    h = rs.check_cartan(np.asarray(h, dtype=float))
    nu_c = nu.as_complex()
    alphas = rs.simple()
    xi_scaled = [chi.xi[j] * math.exp(float(alphas[j] @ h)) for j in range(rs.n - 1)]
    pref = np.exp(np.dot(nu_c + rs.rho, h))
    if rs.n == 2:
        xi1 = xi_scaled[0]
        total = np.sum(ws * np.exp(-1j * xi1 * xs) * field)
        if tail_correct:
            total += _tail_term(xs, field, xi1)
        return complex(pref * total)
    xi1, xi2 = xi_scaled
    px = ws * np.exp(-1j * xi1 * xs)
    py = ws * np.exp(-1j * xi2 * xs)
    total = px @ field @ py
    if tail_correct:
        total += _tail_term(xs, field @ py, xi1)      # |x| > R strip
        total += _tail_term(xs, px @ field, xi2)      # |y| > R strip
    return complex(pref * total)


def _tail_term(xs: np.ndarray, g: np.ndarray, xi: float) -> complex:
    """First-order endpoint correction for int_{|x|>R} g(x) e^{-i xi x} dx."""
    if xi == 0.0:
        return 0.0
    r = float(xs[-1])
    g_hi = g[-1] if np.ndim(g) else g
    g_lo = g[0]
    return (g_hi * np.exp(-1j * xi * r) - g_lo * np.exp(1j * xi * r)) / (1j * xi)


def beuzart_plessis_probe(rs: RootSystem, chi: CharacterData, epsilon: float,
                          radii: list[float], nodes_1d: int = 192) -> list[dict]:
    """Partial integrals of a(n)^{-(1-eps) rho} over ker(chi) in N.

    Returns one row per radius: {radius, partial_integral, cauchy_diff}.
    SL(2): ker chi is trivial, the zero-dimensional integral is 1 by the
    point-mass convention.  SL(3): ker chi = {exp(s v + t E_13)} with v the
    dchi-null direction xi_2 E_12 - xi_1 E_23.
    """
    chi.require_generic()
    if not 0.0 < epsilon < 1.0:
        raise InvalidArgument("need 0 < epsilon < 1")
    if rs.n == 2:
        rows = []
        prev = None
        for r in radii:
            rows.append({"radius": float(r), "partial_integral": 1.0,
                         "cauchy_diff": 0.0 if prev is not None else math.nan})
            prev = 1.0
        return rows
    if rs.n != 3:
        raise InvalidArgument("probe implemented for n = 2 and n = 3")
    xi1, xi2 = chi.xi
    rho = rs.rho
    nu_zero = SpectralParam.real(epsilon * rho)  # a^{-(1-eps) rho} = a^{nu - rho}
    nu_c = nu_zero.as_complex()
    rows = []
    prev = None
    for r in radii:
        pps = max(10, int(nodes_1d / 16))
        xs, ws = graded_nodes(float(r), 16, pps)
        s = xs[:, None]
        t = xs[None, :]
        w2 = ws[:, None] * ws[None, :]
        # exp(s v + t E13) = I + s xi2 E12 - s xi1 E23 + (t - s^2 xi1 xi2 / 2) E13
        x = s * xi2 + 0.0 * t
        y = -s * xi1 + 0.0 * t
        z = t - 0.5 * s * s * xi1 * xi2
        e = _sl3_iwasawa_exponent(x, y, z, nu_c, rho)
        val = float(np.sum(w2 * np.exp(e.real)))
        rows.append({"radius": float(r), "partial_integral": val,
                     "cauchy_diff": (val - prev) if prev is not None else math.nan})
        prev = val
    return rows
