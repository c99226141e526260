"""Classical and quantum non-periodic Toda lattices on grids.

The quantum operator acts on functions of the Cartan subspace through
orthonormal coordinates:  L_c f = -1/2 sum_i d^2f/dt_i^2 + sum_a q_a
exp(2 alpha(h)) f.  Derivatives are 5-point (fourth-order) central stencils;
two cells at each boundary are invalid and masked.

Grid layout: a GridFunction stores per-axis 1-D coordinate arrays (uniform
spacing) plus values on the tensor grid; the map to ambient Cartan
coordinates is h = sum_i t_i * basis_i with basis rows from
RootSystem.cartan_basis().
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from wtoda.core_algebra import RootSystem
from wtoda.errors import InvalidArgument, PreconditionError

_STENCIL_2 = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0
_STENCIL_1 = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0
MARGIN = 2


@dataclass(frozen=True)
class TodaOperator:
    """Quantum Toda operator data: root system plus couplings q_alpha > 0."""

    rs: RootSystem
    couplings: tuple[float, ...]

    def __post_init__(self):
        if len(self.couplings) != self.rs.n - 1:
            raise InvalidArgument(f"need {self.rs.n - 1} couplings")
        if any(q < 0.0 for q in self.couplings):
            raise InvalidArgument("couplings must be nonnegative")


@dataclass
class GridFunction:
    """Values on a uniform tensor grid in orthonormal Cartan coordinates."""

    axes: tuple[np.ndarray, ...]
    values: np.ndarray
    valid_margin: int = 0

    def __post_init__(self):
        if len(self.axes) != self.values.ndim:
            raise InvalidArgument("axis count must match value dimensions")
        for ax in self.axes:
            if len(ax) < 11:
                raise InvalidArgument("axes need >= 11 points for 5-point stencils")
            d = np.diff(ax)
            if not np.allclose(d, d[0], rtol=1e-9, atol=1e-12):
                raise InvalidArgument("axes must be uniformly spaced")

    @property
    def spacing(self) -> tuple[float, ...]:
        return tuple(float(ax[1] - ax[0]) for ax in self.axes)

    def interior(self, extra: int = 0) -> np.ndarray:
        m = self.valid_margin + extra
        if m == 0:
            return self.values
        sl = tuple(slice(m, -m) for _ in self.axes)
        return self.values[sl]

    def like(self, values: np.ndarray, margin_increase: int = 0) -> "GridFunction":
        return GridFunction(axes=self.axes, values=values,
                            valid_margin=self.valid_margin + margin_increase)


def grid_from_callable(rs: RootSystem, fn, radius: float, num: int) -> GridFunction:
    """Sample fn(ambient h) on a symmetric tensor grid in orthonormal coords."""
    basis = rs.cartan_basis()
    axes = tuple(np.linspace(-radius, radius, num) for _ in range(len(basis)))
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=-1) @ basis
    vals = np.asarray(fn(pts)).reshape(mesh[0].shape)
    return GridFunction(axes=axes, values=vals)


def ambient_points(rs: RootSystem, gf: GridFunction) -> np.ndarray:
    basis = rs.cartan_basis()
    mesh = np.meshgrid(*gf.axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=-1) @ basis


def _axis_stencil(values: np.ndarray, axis: int, coeffs: np.ndarray, h: float, power: int) -> np.ndarray:
    out = np.zeros_like(values, dtype=np.result_type(values, np.float64))
    for k, c in enumerate(coeffs):
        if c == 0.0:
            continue
        out += c * np.roll(values, MARGIN - k, axis=axis)
    return out / h ** power


def directional_derivative(gf: GridFunction, direction: np.ndarray) -> GridFunction:
    """First derivative along a constant direction (orthonormal coordinates)."""
    total = np.zeros_like(gf.values, dtype=np.result_type(gf.values, np.float64))
    for ax, comp in enumerate(direction):
        if comp != 0.0:
            total += comp * _axis_stencil(gf.values, ax, _STENCIL_1, gf.spacing[ax], 1)
    return gf.like(total, margin_increase=MARGIN)


def laplacian(gf: GridFunction) -> GridFunction:
    total = np.zeros_like(gf.values, dtype=np.result_type(gf.values, np.float64))
    for ax in range(gf.values.ndim):
        total += _axis_stencil(gf.values, ax, _STENCIL_2, gf.spacing[ax], 2)
    return gf.like(total, margin_increase=MARGIN)


def toda_potential(op: TodaOperator, gf: GridFunction) -> np.ndarray:
    """sum_a q_a exp(2 alpha(h)) on the grid."""
    basis = op.rs.cartan_basis()
    mesh = np.meshgrid(*gf.axes, indexing="ij")
    pts = np.stack(mesh, axis=-1)  # (..., rank) orthonormal coords
    pot = np.zeros(gf.values.shape)
    for q, alpha in zip(op.couplings, op.rs.simple()):
        coeff = basis @ alpha  # alpha(h) = sum_i coeff_i t_i
        expo = sum(2.0 * coeff[i] * pts[..., i] for i in range(len(coeff)))
        pot += q * np.exp(expo)
    return pot


def apply_toda(op: TodaOperator, gf: GridFunction, max_spacing: float = 1e-2) -> GridFunction:
    """L_c f = -1/2 Laplacian f + potential * f; refuses too-coarse grids."""
    if max(gf.spacing) > max_spacing * (1.0 + 1e-12):
        raise PreconditionError(
            f"grid spacing {max(gf.spacing):.3g} exceeds {max_spacing:.3g}")
    lap = laplacian(gf)
    return gf.like(-0.5 * lap.values + toda_potential(op, gf) * gf.values,
                   margin_increase=MARGIN)


def conjugation_identity_check(rs: RootSystem, gf: GridFunction) -> dict:
    """Residual of e^{rho} Lap e^{-rho} = Lap - 2 d_{H_rho} + (rho, rho).

    Applies both sides by stencils; returns the max interior mismatch.
    """
    basis = rs.cartan_basis()
    rho = rs.rho
    h_rho = basis @ rho  # components of the rho-dual vector in orthonormal coords
    rho_rho = float(rho @ rho)
    mesh = np.meshgrid(*gf.axes, indexing="ij")
    pts = np.stack(mesh, axis=-1)
    rho_of_h = sum(h_rho[i] * pts[..., i] for i in range(len(h_rho)))
    lhs = np.exp(rho_of_h) * laplacian(gf.like(np.exp(-rho_of_h) * gf.values)).values
    rhs = (laplacian(gf).values - 2.0 * directional_derivative(gf, h_rho).values
           + rho_rho * gf.values)
    resid = gf.like(lhs - rhs, margin_increase=MARGIN)
    interior = resid.interior()
    return {"max_residual": float(np.max(np.abs(interior))),
            "grid": [len(a) for a in gf.axes],
            "spacing": list(gf.spacing), "stencil": "5-point"}


def radial_casimir_check(rs: RootSystem, couplings, gf: GridFunction) -> dict:
    """Check -2 L_c = e^{rho}(Lap - 2 V) e^{-rho} - (rho,rho) + 2 d_{H_rho}.

    Both sides share the Laplacian stencil, so the residual isolates the
    conjugation bookkeeping (couplings enter identically on both sides).
    """
    op = TodaOperator(rs=rs, couplings=tuple(couplings))
    basis = rs.cartan_basis()
    h_rho = basis @ rs.rho
    rho_rho = float(rs.rho @ rs.rho)
    mesh = np.meshgrid(*gf.axes, indexing="ij")
    pts = np.stack(mesh, axis=-1)
    rho_of_h = sum(h_rho[i] * pts[..., i] for i in range(len(h_rho)))
    pot = toda_potential(op, gf)
    lhs = -2.0 * apply_toda(op, gf).values
    bracket = laplacian(gf.like(np.exp(-rho_of_h) * gf.values)).values \
        - 2.0 * pot * np.exp(-rho_of_h) * gf.values
    rhs = (np.exp(rho_of_h) * bracket - rho_rho * gf.values
           + 2.0 * directional_derivative(gf, h_rho).values)
    resid = gf.like(lhs - rhs, margin_increase=MARGIN)
    interior = resid.interior()
    return {"max_residual": float(np.max(np.abs(interior))),
            "grid": [len(a) for a in gf.axes],
            "spacing": list(gf.spacing), "stencil": "5-point"}


def d1_apply(rs: RootSystem, gf: GridFunction) -> GridFunction:
    """D_1 = sum_j d/dx_j: directional derivative along (1, ..., 1).

    Defined on the GL variant only; for SL the centre direction is absent
    from the Cartan subspace (alpha(1,...,1) = 0 for every root and the
    trace-zero constraint removes the direction), so D_1 reduces to 0 there
    and the operation refuses rather than silently returning it.
    """
    if rs.variant != "GL":
        raise PreconditionError("D_1 needs GL coordinates; on SL the centre "
                                "direction is removed by the trace-zero constraint")
    basis = rs.cartan_basis()
    ones = np.ones(rs.n)
    direction = basis @ ones  # components of (1,...,1) in orthonormal coords
    return directional_derivative(gf, direction)


def d1_symbol(nu) -> complex:
    """Symbol of D_1 at i nu: i * sum(nu_j)."""
    nu = np.asarray(nu, dtype=float)
    return 1j * float(nu.sum())


def band_limited_function(rs: RootSystem, rng: np.random.Generator,
                          modes: int = 6, kmax: float = 2.0):
    """Random real band-limited test function on ambient coordinates."""
    rank = len(rs.cartan_basis())
    ks = rng.uniform(-kmax, kmax, size=(modes, rank))
    amps = rng.standard_normal(modes)
    phases = rng.uniform(0.0, 2.0 * math.pi, modes)
    basis = rs.cartan_basis()

    def fn(pts):
        pts = np.asarray(pts, dtype=float)
        coords = pts @ basis.T  # orthonormal coordinates
        out = np.zeros(pts.shape[:-1])
        for a, k, p in zip(amps, ks, phases):
            out += a * np.cos(coords @ k + p)
        return out

    return fn


@dataclass(frozen=True)
class ClassicalState:
    p: np.ndarray
    q: np.ndarray

    def __post_init__(self):
        if not (np.all(np.isfinite(self.p)) and np.all(np.isfinite(self.q))):
            raise InvalidArgument("classical state must be finite")


def toda_energy(state: ClassicalState, couplings) -> float:
    p, q = state.p, state.q
    kin = 0.5 * float(p @ p)
    pot = sum(c * c * math.exp(2.0 * (q[i] - q[i + 1])) for i, c in enumerate(couplings))
    return kin + pot


def _toda_force(q: np.ndarray, couplings) -> np.ndarray:
    f = np.zeros_like(q)
    for i, c in enumerate(couplings):
        w = 2.0 * c * c * math.exp(2.0 * (q[i] - q[i + 1]))
        f[i] -= w
        f[i + 1] += w
    return f


# Yoshida 4th-order composition weights: three leapfrog substeps per step.
# Plain leapfrog drifts ~2e-6 at dt=1e-3 over 1e4 steps, above the 1e-8
# contract; the composition stays symplectic and lands around 1e-12.
_YOSHIDA_W1 = 1.0 / (2.0 - 2.0 ** (1.0 / 3.0))
_YOSHIDA = (_YOSHIDA_W1, 1.0 - 2.0 * _YOSHIDA_W1, _YOSHIDA_W1)


def classical_flow(state: ClassicalState, couplings, dt: float, steps: int,
                   record_every: int = 1) -> dict:
    """Symplectic trajectory of the open Toda chain (composed leapfrog).

    Returns {"t", "q", "p", "H"}; halts with a diagnostic if the exponential
    walls overflow.
    """
    couplings = tuple(couplings)
    if len(couplings) != len(state.q) - 1 and len(state.q) > 1:
        raise InvalidArgument("need one coupling per adjacent pair")
    q = state.q.astype(float).copy()
    p = state.p.astype(float).copy()
    ts, qs, ps, hs = [], [], [], []
    f = _toda_force(q, couplings) if couplings else np.zeros_like(q)
    for step in range(steps + 1):
        if step % record_every == 0:
            ts.append(step * dt)
            qs.append(q.copy())
            ps.append(p.copy())
            hs.append(toda_energy(ClassicalState(p=p, q=q), couplings))
        if step == steps:
            break
        if len(q) > 1 and couplings and np.max(2.0 * (q[:-1] - q[1:])) > 600.0:
            raise PreconditionError(f"Toda wall overflow at step {step}")
        for w in _YOSHIDA:
            sub = w * dt
            p_half = p + 0.5 * sub * f
            q = q + sub * p_half
            f = _toda_force(q, couplings) if couplings else np.zeros_like(q)
            p = p_half + 0.5 * sub * f
    return {"t": np.array(ts), "q": np.array(qs), "p": np.array(ps), "H": np.array(hs)}
