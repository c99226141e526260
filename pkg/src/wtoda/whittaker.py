"""Whittaker functions: fundamental series solutions of the Toda
eigen-equation, the rank-1 closed form, and the class-one combination used
by the spectral transform.

Normalisation.  Evaluators are *transform-normalised*: their modulus matches
the rho-twisted translated Jacquet functional whose square integrates
against mu(nu) in the inversion formula, and their overall phase is fixed by
a positive-real gauge at a base point.  In rank 1 this normalisation has the
closed form  K_nu(h) = 2 sqrt(cosh(pi s)) * K_{is}(sqrt(q) e^{alpha(h)}),
s = (nu, alpha)/(alpha, alpha), obtained by evaluating the translated
integral over N in closed form.  In rank 2 no closed form is used: the
combination coefficients are fitted numerically to quadrature data for the
translated functional continued onto the unitary axis (short Re-shift
segment, Richardson extrapolated), as genuinely experimental machinery.

Weyl invariance and the conjugation relation are enforced structurally: a
parameter is first canonicalised to a dominant representative of the orbit
pair {W nu, -W nu}, so evaluator(w nu) is *the same object* as
evaluator(nu), and evaluator(-nu) is its complex conjugate.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from wtoda.core_algebra import RootSystem, SpectralParam, weyl_apply, weyl_group
from wtoda.errors import InvalidArgument, PreconditionError
from wtoda.matrix_groups import CharacterData, jacquet_from_field, jacquet_phase_field
from wtoda.special_functions import bessel_k_imaginary_order

METHOD_RANK1 = "rank1_closed_form"
METHOD_SERIES = "series_class_one"
METHOD_QUAD = "quadrature_oracle"

_EXP_CLAMP = 600.0  # exponent ceiling: beyond it the decaying kernel is 0 anyway
_SMALL_DENOM = 1e-10


def couplings_from_character(chi: CharacterData) -> np.ndarray:
    """Toda couplings q_alpha = xi_alpha^2 > 0; refuses non-generic characters."""
    chi.require_generic()
    return np.array([x * x for x in chi.xi])


@dataclass(frozen=True)
class SeriesSolution:
    """Formal eigenfunction M_lambda(h) = sum_m a_m exp((lambda + 2 m^)(h)).

    The recursion a_m [ (lambda+2m^, lambda+2m^) - (lambda, lambda) ]
    = 2 sum_alpha q_alpha a_{m - e_alpha}, a_0 = 1, solves the conjugated
    Toda operator's eigen-equation shell by shell (m^ = sum m_alpha alpha).
    """

    rs: RootSystem
    lam: np.ndarray                  # complex exponent, ambient coordinates
    couplings: tuple[float, ...]
    exponents: np.ndarray            # (terms, n): lambda + 2 m^
    coeffs: np.ndarray               # (terms,) complex, coeffs[0] = 1
    shells: np.ndarray               # (terms,) int: |m|
    truncation_order: int

    def eval(self, pts: np.ndarray) -> np.ndarray:
        """Evaluate at ambient points, shape (..., n); overflow-clamped."""
        pts = np.asarray(pts, dtype=float)
        ex = pts @ self.exponents.T
        np.clip(ex.real, -np.inf, _EXP_CLAMP, out=ex.real)
        return np.exp(ex) @ self.coeffs

    def tail_bound(self, pts: np.ndarray) -> float:
        """Geometric extrapolation of the last three shell norms at the
        worst point of `pts`."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        order = self.truncation_order
        norms = []
        for j in (order - 2, order - 1, order):
            sel = self.shells == j
            if not sel.any():
                norms.append(0.0)
                continue
            mags = np.exp(pts @ self.exponents[sel].real.T) @ np.abs(self.coeffs[sel])
            norms.append(float(np.max(mags)))
        s0, s1, s2 = norms
        if s2 == 0.0:
            return 0.0
        r = s2 / s1 if s1 > 0 else 1.0
        if r >= 0.95:
            return math.inf
        return s2 * r / (1.0 - r)


def _shell_indices(rank: int, order: int) -> list[tuple[int, ...]]:
    if rank == 1:
        return [(m,) for m in range(order + 1)]
    return [(m1, m2) for tot in range(order + 1) for m1 in range(tot + 1)
            for m2 in [tot - m1]]


def build_series(rs: RootSystem, lam, couplings, order: int) -> SeriesSolution:
    """Solve the coefficient recursion up to the given shell order.

    Refuses on a small denominator (non-generic exponent), reporting the
    offending multi-index.
    """
    lam = np.asarray(lam, dtype=complex)
    rank = rs.n - 1
    if rank > 2:
        raise InvalidArgument("series solutions implemented for rank <= 2")
    couplings = tuple(float(q) for q in couplings)
    simple = rs.simple()
    idx = _shell_indices(rank, order)
    pos = {m: k for k, m in enumerate(idx)}
    coeffs = np.zeros(len(idx), dtype=complex)
    exponents = np.zeros((len(idx), rs.n), dtype=complex)
    shells = np.zeros(len(idx), dtype=int)
    coeffs[0] = 1.0
    lam_lam = complex(lam @ lam)
    for k, m in enumerate(idx):
        mhat = sum(mm * simple[a] for a, mm in enumerate(m))
        exponents[k] = lam + 2.0 * mhat
        shells[k] = sum(m)
        if k == 0:
            continue
        denom = complex(exponents[k] @ exponents[k]) - lam_lam
        if abs(denom) < _SMALL_DENOM:
            raise PreconditionError(f"small series denominator at m={m}: {denom}")
        rhs = 0.0 + 0.0j
        for a in range(rank):
            if m[a] > 0:
                prev = tuple(mm - (1 if b == a else 0) for b, mm in enumerate(m))
                rhs += 2.0 * couplings[a] * coeffs[pos[prev]]
        coeffs[k] = rhs / denom
    return SeriesSolution(rs=rs, lam=lam, couplings=couplings, exponents=exponents,
                          coeffs=coeffs, shells=shells, truncation_order=order)


def eval_series(series: SeriesSolution, h) -> complex:
    """Value at one ambient Cartan point."""
    h = series.rs.check_cartan(np.asarray(h, dtype=float))
    return complex(series.eval(h[None, :])[0])


def whittaker_rank1(nu_scalar: float, q: float, x: float) -> float:
    """Decaying eigenfunction of the 1-D Toda operator, reduced coordinates.

    Reduction: on the rank-1 Cartan line h = x * (e1 - e2)/sqrt(2) the
    operator is -1/2 d^2/dx^2 + q e^{2 sqrt2 x}; substituting
    w(x) = K_{i s}(sqrt(q) e^{sqrt2 x}) into the modified Bessel equation
    y^2 K'' + y K' - (y^2 - s^2) K = 0 with y = sqrt(q) e^{sqrt2 x} gives
    w'' = 2 (y^2 - s^2) w, i.e. L w = s^2 w = (||nu||^2 / 2) w for
    nu = s (e1 - e2).
    """
    if q <= 0.0:
        raise InvalidArgument("coupling must be positive")
    return bessel_k_imaginary_order(nu_scalar, math.sqrt(q) * math.exp(math.sqrt(2.0) * x))


@dataclass
class WhittakerEvaluator:
    """Prepared transform-normalised evaluator for h -> K_nu(h)."""

    rs: RootSystem
    nu: np.ndarray
    method: str
    couplings: tuple[float, ...]
    order: int
    conjugate: bool = False
    gammas: np.ndarray | None = None          # combination coefficients
    series: tuple[SeriesSolution, ...] = ()
    fit_residual: float = 0.0                 # relative LSQ residual of the match
    _accuracy: dict | None = field(default=None, repr=False)

    def eval(self, pts) -> np.ndarray:
        """K_nu at ambient points (..., n); complex in general, real for A1."""
        pts = np.asarray(pts, dtype=float)
        flat = pts.reshape(-1, self.rs.n)
        if self.method == METHOD_RANK1:
            out = self._eval_rank1(flat)
        else:
            out = np.zeros(len(flat), dtype=complex)
            for g, s in zip(self.gammas, self.series):
                out += g * s.eval(flat)
            out[self._dead_region(flat)] = 0.0
        if self.conjugate:
            out = np.conj(out)
        return out.reshape(pts.shape[:-1])

    def __call__(self, pts):
        return self.eval(pts)

    def _alpha_values(self, flat: np.ndarray) -> np.ndarray:
        return flat @ self.rs.simple().T

    def _dead_region(self, flat: np.ndarray) -> np.ndarray:
        # beyond sqrt(q) e^{alpha(h)} ~ 18 the kernel is < 1e-8 while the
        # series cancellation noise (~ e^{2z} eps) starts to exceed it; the
        # true double-exponential decay makes clamping to 0 the accurate choice
        av = self._alpha_values(flat)
        walls = av + 0.5 * np.log(np.asarray(self.couplings))[None, :]
        return np.any(walls > math.log(18.0), axis=1)

    def _eval_rank1(self, flat: np.ndarray) -> np.ndarray:
        s, kappa = _rank1_parameters(self.rs, self.nu)
        alpha = self.rs.simple()[0]
        q = self.couplings[0]
        a_of_h = flat @ alpha
        z = np.sqrt(q) * np.exp(np.minimum(a_of_h, _EXP_CLAMP))
        vals = bessel_k_imaginary_order(s, np.maximum(z, 1e-300))
        norm = 2.0 * math.sqrt(math.cosh(math.pi * s))
        out = norm * np.asarray(vals, dtype=complex)
        if kappa != 0.0:
            out = out * np.exp(1j * kappa * flat.sum(axis=1))
        return out

    @property
    def accuracy(self) -> dict:
        if self._accuracy is None:
            self._accuracy = {
                "eig_residual": eigen_residual(self),
                "tail_bound": self._tail_metadata(),
            }
        return self._accuracy

    def _tail_metadata(self) -> float:
        if self.method == METHOD_RANK1 or not self.series:
            return 0.0
        probe = _default_window_points(self.rs, lo=-3.0, hi=-1.0, num=3)
        return max(s.tail_bound(probe) for s in self.series)

    def dump(self) -> dict:
        doc = {
            "nu": [float(v) for v in self.nu],
            "method": self.method,
            "order": self.order,
            "accuracy": {k: (v if not isinstance(v, float) or math.isfinite(v) else None)
                         for k, v in self.accuracy.items()},
        }
        if self.series:
            lead = self.series[0]
            doc["coefficients"] = [[c.real, c.imag] for c in lead.coeffs[:12]]
        else:
            doc["coefficients"] = []
        return doc


def _rank1_parameters(rs: RootSystem, nu: np.ndarray) -> tuple[float, float]:
    alpha = rs.simple()[0]
    s = float(nu @ alpha) / float(alpha @ alpha)
    kappa = float(nu.sum()) / rs.n  # centre frequency, zero on SL
    return s, kappa


def _default_window_points(rs: RootSystem, lo: float, hi: float, num: int) -> np.ndarray:
    """Ambient sample points with alpha_i(h) spread over [lo, hi] per simple root."""
    simple = rs.simple()
    gram = simple @ simple.T
    pts = []
    vals = np.linspace(lo, hi, num)
    rank = rs.n - 1
    if rank == 1:
        for v in vals:
            pts.append(simple.T @ np.linalg.solve(gram, np.array([v])))
    else:
        for v1 in vals:
            for v2 in vals:
                pts.append(simple.T @ np.linalg.solve(gram, np.array([v1, v2])))
    return np.array(pts)


def eigen_residual(ev: WhittakerEvaluator, center: np.ndarray | None = None,
                   spacing: float = 2e-3, num: int = 17) -> float:
    """Relative sup-norm residual of L_c K = (||nu||^2/2) K by 5-point stencils."""
    from wtoda.toda import GridFunction, TodaOperator, apply_toda

    rs = ev.rs
    basis = rs.cartan_basis()
    rank = len(basis)
    if center is None:
        center_pts = _default_window_points(rs, lo=-2.0, hi=-2.0, num=1)
        center = center_pts[0] @ basis.T  # orthonormal coordinates
    num = max(num, 11)
    axes = tuple(center[i] + spacing * (np.arange(num) - num // 2) for i in range(rank))
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=-1) @ basis
    vals = ev.eval(pts).reshape(mesh[0].shape)
    gf = GridFunction(axes=axes, values=vals)
    op = TodaOperator(rs=rs, couplings=ev.couplings)
    lhs = apply_toda(op, gf, max_spacing=1e-2)
    eig = 0.5 * float(ev.nu @ ev.nu)
    resid = lhs.values - eig * vals
    interior = lhs.like(resid).interior()
    scale = float(np.max(np.abs(gf.like(vals, margin_increase=2).interior())))
    return float(np.max(np.abs(interior)) / max(scale, 1e-300))


# --- class-one construction --------------------------------------------------

_CACHE: dict = {}


def _canonical_orbit(rs: RootSystem, nu: np.ndarray) -> tuple[np.ndarray, bool]:
    """Dominant representative of the orbit pair {W nu, -W nu}.

    Returns (rep, conjugate): `conjugate` is True when nu lies in the orbit
    of -rep, in which case the evaluator is the conjugate of rep's.
    """
    plus = np.sort(nu)[::-1]
    minus = np.sort(-nu)[::-1]
    if tuple(minus) > tuple(plus):
        return minus, True
    return plus, False


def _require_regular(rs: RootSystem, nu: np.ndarray, tol: float = 1e-8) -> None:
    srt = np.sort(nu)
    if np.min(np.diff(srt)) < tol:
        raise PreconditionError(f"nu={nu} is within {tol} of a Weyl wall (degenerate)")


def class_one(rs: RootSystem, nu, couplings, order: int = 24,
              method: str | None = None) -> WhittakerEvaluator:
    """Transform-normalised class-one Whittaker evaluator.

    Rank 1 (SL(2)/GL(2)): closed form by default, or the two-term series
    combination matched to it.  Rank 2 (SL(3)): six-term series combination
    with experimentally fitted coefficients; every result downstream of it
    carries that caveat.  Rank >= 3 is unsupported.
    """
    nu = np.asarray(nu, dtype=float)
    if nu.shape != (rs.n,):
        raise InvalidArgument(f"nu must have {rs.n} coordinates")
    if rs.variant == "SL" and abs(nu.sum()) > 1e-9 * max(1.0, np.abs(nu).max()):
        raise InvalidArgument("SL spectral parameter must be trace-zero")
    rank = rs.n - 1
    if rank > 2:
        raise PreconditionError("class-one evaluation unsupported for rank >= 3")
    if rank == 2 and rs.variant != "SL":
        raise PreconditionError("rank-2 class-one evaluation is implemented for SL(3)")
    _require_regular(rs, nu)
    couplings = tuple(float(q) for q in couplings)
    if any(q <= 0.0 for q in couplings):
        raise PreconditionError("class-one evaluator needs positive couplings")
    if method is None:
        method = METHOD_RANK1 if rank == 1 else METHOD_SERIES
    rep, conj = _canonical_orbit(rs, nu)
    key = (rs.n, rs.variant, bytes(rep.tobytes()), couplings, order, method)
    base = _CACHE.get(key)
    if base is None:
        if method == METHOD_RANK1:
            if rank != 1:
                raise InvalidArgument("rank1_closed_form needs a rank-1 group")
            base = WhittakerEvaluator(rs=rs, nu=rep, method=method,
                                      couplings=couplings, order=order)
        elif method == METHOD_SERIES:
            base = _build_series_evaluator(rs, rep, couplings, order)
        elif method == METHOD_QUAD:
            base = _build_quadrature_evaluator(rs, rep, couplings, order)
        else:
            raise InvalidArgument(f"unknown method {method!r}")
        _CACHE[key] = base
    if not conj:
        return base
    return WhittakerEvaluator(rs=rs, nu=nu, method=base.method, couplings=couplings,
                              order=base.order, conjugate=True, gammas=base.gammas,
                              series=base.series, fit_residual=base.fit_residual,
                              _accuracy=base._accuracy)


def _build_series_evaluator(rs: RootSystem, nu: np.ndarray, couplings,
                            order: int) -> WhittakerEvaluator:
    rank = rs.n - 1
    ws = weyl_group(rs)
    series = tuple(build_series(rs, 1j * weyl_apply(w, nu), couplings, order) for w in ws)
    if rank == 1:
        gammas = _match_rank1(rs, nu, couplings, series)
        resid = 0.0
    else:
        gammas, resid = _match_rank2(rs, nu, couplings, series, order)
    return WhittakerEvaluator(rs=rs, nu=nu, method=METHOD_SERIES, couplings=couplings,
                              order=order, gammas=gammas, series=series,
                              fit_residual=resid)


def _match_rank1(rs: RootSystem, nu: np.ndarray, couplings, series) -> np.ndarray:
    """Fit the two-term combination to the rank-1 closed form at base points."""
    target = WhittakerEvaluator(rs=rs, nu=nu, method=METHOD_RANK1,
                                couplings=couplings, order=0)
    pts = _default_window_points(rs, lo=-2.5, hi=-1.5, num=2)
    a = np.stack([s.eval(pts) for s in series], axis=1)
    b = target.eval(pts)
    sol, *_ = np.linalg.lstsq(a, b, rcond=None)
    return sol


_A2_FIT = {"zetas": (0.35, 0.25, 0.15), "radius": 60.0, "nodes_1d": 96,
           "window": (-1.3, -0.3), "samples": 5}


def _match_rank2(rs: RootSystem, nu: np.ndarray, couplings, series,
                 order: int) -> np.ndarray:
    """Experimental A2 coefficients: least-squares fit of the six-term series
    combination to rho-twisted translated-Jacquet quadrature data near the
    unitary axis, Richardson-extrapolated in the Re-shift, then transported
    from the unit reference character to the requested couplings.
    """
    fit = _A2_FIT
    chi_ref = CharacterData(xi=(1.0, 1.0))
    ws = weyl_group(rs)
    rho = rs.rho
    pts = _default_window_points(rs, lo=fit["window"][0], hi=fit["window"][1],
                                 num=fit["samples"])
    fmax = math.exp(fit["window"][1])
    gammas_by_zeta = []
    worst_resid = 0.0
    for zeta in fit["zetas"]:
        nu_shift = SpectralParam.from_complex(1j * nu - zeta * rho)
        field = jacquet_phase_field(rs, nu_shift, fit["radius"], fit["nodes_1d"],
                                    max_frequency=fmax)
        rhs = np.array([
            cmath.exp(-float(rho @ h)) *
            jacquet_from_field(rs, nu_shift, field, chi_ref.inverse(), h)
            for h in pts])
        basis_series = [build_series(rs, weyl_apply(w, nu_shift.as_complex()), (1.0, 1.0),
                                     order) for w in ws]
        a = np.stack([s.eval(pts) for s in basis_series], axis=1)
        sol, *_ = np.linalg.lstsq(a, rhs, rcond=None)
        worst_resid = max(worst_resid,
                          float(np.max(np.abs(a @ sol - rhs)) / np.max(np.abs(rhs))))
        gammas_by_zeta.append(sol)
    g = _richardson_to_zero(fit["zetas"], gammas_by_zeta)
    return _transport_couplings(rs, nu, couplings, ws, g), worst_resid


def _richardson_to_zero(zetas, values) -> np.ndarray:
    """Lagrange extrapolation of coefficient vectors to zeta = 0, done on the
    logarithm (the coefficients are products of Gamma-type factors, so log is
    far closer to polynomial in the shift); phases unwrapped by ratios."""
    z = np.asarray(zetas, dtype=float)
    vals = np.stack(values)
    safe = np.min(np.abs(vals), axis=0) > 0.0
    logs = np.empty_like(vals)
    logs[0] = np.log(np.where(safe, vals[0], 1.0))
    for i in range(1, len(z)):
        logs[i] = logs[i - 1] + np.log(np.where(safe, vals[i] / vals[i - 1], 1.0))
    out_log = np.zeros_like(logs[0])
    out_lin = np.zeros_like(vals[0])
    for i in range(len(z)):
        li = 1.0
        for j in range(len(z)):
            if j != i:
                li *= (0.0 - z[j]) / (z[i] - z[j])
        out_log = out_log + li * logs[i]
        out_lin = out_lin + li * vals[i]
    return np.where(safe, np.exp(out_log), out_lin)


def _transport_couplings(rs: RootSystem, nu: np.ndarray, couplings, ws,
                         gammas_ref: np.ndarray) -> np.ndarray:
    """Move reference-character coefficients to the requested couplings.

    With alpha_i(delta) = log xi_i, M_{i w nu}(h + delta; xi=1)
    = e^{(i w nu)(delta)} M_{i w nu}(h; xi) and K picks up a global phase,
    so Gamma_w scales by exp(i (w nu - nu)(delta)).
    """
    xi = np.sqrt(np.asarray(couplings, dtype=float))
    logs = np.log(xi)
    simple = rs.simple()
    gram = simple @ simple.T
    delta = simple.T @ np.linalg.solve(gram, logs)
    out = np.empty_like(gammas_ref)
    for k, w in enumerate(ws):
        wnu = weyl_apply(w, nu)
        out[k] = gammas_ref[k] * cmath.exp(1j * float((wnu - nu) @ delta))
    return out


def _build_quadrature_evaluator(rs: RootSystem, nu: np.ndarray, couplings,
                                order: int) -> WhittakerEvaluator:
    """Series evaluator whose coefficients come from the quadrature fit even
    in rank 1 (cross-validation path for the rank-2 machinery)."""
    ws = weyl_group(rs)
    series = tuple(build_series(rs, 1j * weyl_apply(w, nu), couplings, order) for w in ws)
    if rs.n - 1 == 1:
        gammas = _match_rank1_quadrature(rs, nu, couplings, series, order)
        resid = 0.0
    else:
        gammas, resid = _match_rank2(rs, nu, couplings, series, order)
    return WhittakerEvaluator(rs=rs, nu=nu, method=METHOD_QUAD, couplings=couplings,
                              order=order, gammas=gammas, series=series,
                              fit_residual=resid)


def _match_rank1_quadrature(rs: RootSystem, nu: np.ndarray, couplings, series,
                            order: int) -> np.ndarray:
    """Rank-1 coefficients from Jacquet quadrature data alone (no closed form).

    Exists to cross-validate the rank-2 fitting pipeline where a closed form
    is available.
    """
    zetas = (0.5, 0.35, 0.2)
    chi_ref = CharacterData(xi=(1.0,))
    ws = weyl_group(rs)
    rho = rs.rho
    pts = _default_window_points(rs, lo=-1.5, hi=-0.5, num=5)
    gammas_by_zeta = []
    for zeta in zetas:
        nu_shift = SpectralParam.from_complex(1j * nu - zeta * rho)
        field = jacquet_phase_field(rs, nu_shift, 300.0, 160,
                                    max_frequency=math.exp(-0.5))
        rhs = np.array([
            cmath.exp(-float(rho @ h)) *
            jacquet_from_field(rs, nu_shift, field, chi_ref.inverse(), h)
            for h in pts])
        basis_series = [build_series(rs, weyl_apply(w, nu_shift.as_complex()), (1.0,),
                                     order) for w in ws]
        a = np.stack([s.eval(pts) for s in basis_series], axis=1)
        sol, *_ = np.linalg.lstsq(a, rhs, rcond=None)
        gammas_by_zeta.append(sol)
    g = _richardson_to_zero(zetas, gammas_by_zeta)
    return _transport_couplings(rs, nu, couplings, ws, g)
