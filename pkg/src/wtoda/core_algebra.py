"""Restricted root data of type A for SL(n,R) / GL(n,R).

The Cartan subspace and its dual are stored in the ambient R^n basis even in
the SL case (trace-zero constraint checked, never quotiented), so the GL(n)
coordinate formulas stay literal.  Root combinatorics use exact small
integers; only analytic quantities go through floating point.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from wtoda.errors import InvalidArgument

VARIANT_GL = "GL"
VARIANT_SL = "SL"


@dataclass(frozen=True)
class RootSystem:
    """Type-A restricted root system with multiplicities m_alpha = 1.

    ``positive_roots`` are the dual vectors e_i - e_j (i < j); ``simple_roots``
    the consecutive differences; ``rho`` equals half the multiplicity-weighted
    sum of positive roots.  The system is reduced: 2*alpha is never a root.
    """

    n: int
    variant: str
    positive_roots: tuple[tuple[int, ...], ...]
    simple_roots: tuple[tuple[int, ...], ...]
    multiplicities: tuple[int, ...]
    rho_exact: tuple[Fraction, ...] = field(repr=False)

    @property
    def rank(self) -> int:
        return self.n - 1

    @property
    def rho(self) -> np.ndarray:
        return np.array([float(c) for c in self.rho_exact])

    def simple(self) -> np.ndarray:
        return np.array(self.simple_roots, dtype=float)

    def positive(self) -> np.ndarray:
        return np.array(self.positive_roots, dtype=float)

    def cartan_basis(self) -> np.ndarray:
        """Orthonormal basis of the Cartan subspace, rows = basis vectors.

        GL: the standard basis of R^n.  SL: an orthonormal basis of the
        trace-zero subspace w.r.t. (x, y) = sum x_i y_i.
        """
        if self.variant == VARIANT_GL:
            return np.eye(self.n)
        basis = []
        for k in range(1, self.n):
            v = np.zeros(self.n)
            v[:k] = 1.0
            v[k] = -float(k)
            basis.append(v / np.linalg.norm(v))
        return np.array(basis)

    def check_cartan(self, h: np.ndarray) -> np.ndarray:
        h = np.asarray(h, dtype=float)
        if h.shape != (self.n,):
            raise InvalidArgument(f"expected length-{self.n} Cartan vector, got shape {h.shape}")
        if self.variant == VARIANT_SL and abs(h.sum()) > 1e-9 * max(1.0, np.abs(h).max()):
            raise InvalidArgument("SL Cartan vector must have zero coordinate sum")
        return h

    def to_json(self) -> str:
        return json.dumps({
            "n": self.n,
            "variant": self.variant,
            "rho": [float(c) for c in self.rho_exact],
            "simple_roots": [list(r) for r in self.simple_roots],
            "positive_roots": [list(r) for r in self.positive_roots],
        })


@dataclass(frozen=True)
class SpectralParam:
    """Point nu = re + i*im in the complexified dual; unitary means re = 0."""

    re: np.ndarray
    im: np.ndarray

    @staticmethod
    def real(v) -> "SpectralParam":
        v = np.asarray(v, dtype=float)
        return SpectralParam(re=v, im=np.zeros_like(v))

    @staticmethod
    def from_complex(v) -> "SpectralParam":
        v = np.asarray(v, dtype=complex)
        return SpectralParam(re=v.real.copy(), im=v.imag.copy())

    @property
    def n(self) -> int:
        return len(self.re)

    def as_complex(self) -> np.ndarray:
        return self.re + 1j * self.im

    def is_real(self, tol: float = 0.0) -> bool:
        return bool(np.all(np.abs(self.im) <= tol))

    def norm_sq(self) -> float:
        """(nu, nu) for real nu; raises for genuinely complex parameters."""
        if not self.is_real(1e-300):
            raise InvalidArgument("norm_sq is defined for real spectral parameters")
        return float(self.re @ self.re)


def build_root_system(n: int, variant: str) -> RootSystem:
    """Construct the type-A root data for GL(n) or SL(n)."""
    if not isinstance(n, (int, np.integer)) or n < 2:
        raise InvalidArgument(f"need integer n >= 2, got {n!r}")
    if variant not in (VARIANT_GL, VARIANT_SL):
        raise InvalidArgument(f"variant must be 'GL' or 'SL', got {variant!r}")
    pos = []
    for i in range(n):
        for j in range(i + 1, n):
            r = [0] * n
            r[i], r[j] = 1, -1
            pos.append(tuple(r))
    simple = []
    for i in range(n - 1):
        r = [0] * n
        r[i], r[i + 1] = 1, -1
        simple.append(tuple(r))
    rho = [Fraction(0)] * n
    for r in pos:
        for k, c in enumerate(r):
            rho[k] += Fraction(c, 2)
    return RootSystem(
        n=int(n),
        variant=variant,
        positive_roots=tuple(pos),
        simple_roots=tuple(simple),
        multiplicities=tuple(1 for _ in pos),
        rho_exact=tuple(rho),
    )


def pairing(lam, h) -> float:
    """Evaluate a dual vector on a Cartan vector: lambda(h) = sum lambda_i h_i."""
    lam = np.asarray(lam, dtype=float)
    h = np.asarray(h, dtype=float)
    if lam.shape != h.shape:
        raise InvalidArgument(f"dimension mismatch: {lam.shape} vs {h.shape}")
    return float(lam @ h)


def dual_inner(lam, mu):
    """Bilinear form (lambda, mu) on the dual, extended bilinearly to complex."""
    lam = np.asarray(lam)
    mu = np.asarray(mu)
    if lam.shape != mu.shape:
        raise InvalidArgument(f"dimension mismatch: {lam.shape} vs {mu.shape}")
    out = lam @ mu
    return complex(out) if np.iscomplexobj(out) else float(out)


def weyl_group(rs: RootSystem) -> list[np.ndarray]:
    """All coordinate permutations of {1..n}, as index arrays acting by v[perm].

    Identity first; closed under composition by construction.
    """
    return [np.array(p, dtype=int) for p in itertools.permutations(range(rs.n))]


def weyl_apply(perm: np.ndarray, v):
    """Apply a Weyl element to a (dual) vector: (w v)_i = v_{perm(i)}."""
    v = np.asarray(v)
    return v[perm]
