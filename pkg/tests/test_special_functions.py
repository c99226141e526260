import cmath
import math

import numpy as np
import pytest

from wtoda.errors import InvalidArgument
from wtoda.special_functions import (
    POLE,
    bessel_k_imaginary_order,
    beta,
    gamma,
    log_gamma,
)

from oracles import (
    bessel_k_from_i_series,
    bessel_k_raw_quadrature,
    fd_second_derivative,
)


class TestLogGamma:
    def test_exact_values(self):
        assert log_gamma(1.0) == pytest.approx(0.0, abs=1e-14)
        assert log_gamma(5.0).real == pytest.approx(math.log(24.0), rel=1e-14)
        assert log_gamma(0.5).real == pytest.approx(0.5 * math.log(math.pi), rel=1e-14)
        assert log_gamma(20.0).real == pytest.approx(math.lgamma(20.0), rel=1e-14)

    def test_pole_signalling(self):
        for z in (0.0, -1.0, -7.0):
            assert log_gamma(z).real == math.inf
            assert gamma(z).real == math.inf

    def test_recurrence_complex(self, rng):
        # Gamma(z+1) = z Gamma(z) across the strip the c-function probes
        for _ in range(60):
            z = complex(rng.uniform(-20, 20), rng.uniform(-30, 30))
            if min(abs(z - round(z.real)) for _ in [0]) < 1e-2 and z.imag == 0:
                continue
            lhs = log_gamma(z + 1.0)
            rhs = cmath.log(z) + log_gamma(z)
            # compare exp() to stay branch-insensitive
            assert cmath.exp(lhs - rhs) == pytest.approx(1.0, rel=5e-13)

    def test_reflection_via_duplication(self, rng):
        # Legendre duplication: Gamma(z)Gamma(z+1/2) = 2^{1-2z} sqrt(pi) Gamma(2z)
        for _ in range(40):
            z = complex(rng.uniform(0.1, 10), rng.uniform(-10, 10))
            lhs = log_gamma(z) + log_gamma(z + 0.5)
            rhs = (1 - 2 * z) * math.log(2.0) + 0.5 * math.log(math.pi) + log_gamma(2 * z)
            assert cmath.exp(lhs - rhs) == pytest.approx(1.0, rel=1e-12)

    def test_vertical_strip_magnitudes(self):
        # |Gamma(is)|^2 = pi/(s sinh(pi s)), |Gamma(1/2+is)|^2 = pi/cosh(pi s)
        for s in np.linspace(0.1, 10.0, 34):
            g1 = abs(gamma(1j * s)) ** 2
            ref1 = math.pi / (s * math.sinh(math.pi * s))
            assert abs(g1 - ref1) <= 1e-12 * ref1
            g2 = 2.0 * log_gamma(0.5 + 1j * s).real
            ref2 = math.log(math.pi) - math.log(math.cosh(math.pi * s))
            assert g2 == pytest.approx(ref2, abs=2e-13 * max(1.0, abs(ref2)))

    def test_rejects_nonfinite(self):
        with pytest.raises(InvalidArgument):
            log_gamma(complex(math.nan, 0.0))


class TestBeta:
    def test_half_one(self):
        # derived: B(1/2, 1) = int_0^1 t^{-1/2} dt = 2
        assert beta(0.5, 1.0).real == pytest.approx(2.0, rel=1e-13)

    def test_one_one(self):
        assert beta(1.0, 1.0).real == pytest.approx(1.0, rel=1e-14)

    def test_half_half(self):
        # derived: B(1/2,1/2) = Gamma(1/2)^2 / Gamma(1) = pi
        assert beta(0.5, 0.5).real == pytest.approx(math.pi, rel=1e-13)

    def test_symmetry_random(self, rng):
        for _ in range(30):
            a = complex(rng.uniform(0.1, 5), rng.uniform(-5, 5))
            b = complex(rng.uniform(0.1, 5), rng.uniform(-5, 5))
            x, y = beta(a, b), beta(b, a)
            assert x == pytest.approx(y, rel=1e-12)

    def test_pole_propagation(self):
        assert beta(0.0, 0.5) == POLE
        assert beta(-2.0, 1.3).real == math.inf
        # zero of Beta: finite a,b with a+b at a Gamma pole
        assert beta(0.7, -0.7) == 0.0


class TestBesselKImaginaryOrder:
    def test_k0_at_one(self):
        # derived oracle: step-halved trapezoid of int exp(-cosh t) dt
        ref = bessel_k_raw_quadrature(0.0, 1.0)
        got = bessel_k_imaginary_order(0.0, 1.0)
        assert got == pytest.approx(ref, rel=1e-12)
        assert got == pytest.approx(0.42102443824070834, rel=1e-12)

    def test_continuity_in_mu_at_zero(self):
        assert bessel_k_imaginary_order(1e-8, 2.0) == pytest.approx(
            bessel_k_imaginary_order(0.0, 2.0), rel=1e-9)

    def test_even_in_mu(self):
        for z in (0.4, 3.0):
            assert bessel_k_imaginary_order(1.7, z) == pytest.approx(
                bessel_k_imaginary_order(-1.7, z), rel=1e-14)

    def test_against_raw_quadrature_small_mu(self):
        # raw real-axis integral is trustworthy for small mu only
        for mu, z in [(0.5, 0.2), (1.0, 1.0), (2.0, 0.7), (3.0, 5.0), (0.0, 10.0)]:
            ref = bessel_k_raw_quadrature(mu, z)
            assert bessel_k_imaginary_order(mu, z) == pytest.approx(ref, rel=1e-10)

    def test_against_i_series_combination(self):
        # independent series oracle sound for z <= ~6
        for mu, z in [(1.0, 0.5), (2.5, 1.2), (5.0, 0.1), (8.0, 3.0), (12.0, 6.0), (19.5, 5.5)]:
            ref = bessel_k_from_i_series(mu, z)
            assert bessel_k_imaginary_order(mu, z) == pytest.approx(ref, rel=2e-10)

    def test_ode_residual(self):
        # u(x) = K_{i mu}(e^x) satisfies u'' - e^{2x} u = -mu^2 u
        mu = 3.0
        for x in (-1.0, 0.0, 0.8, 2.0):
            u = lambda t: bessel_k_imaginary_order(mu, math.exp(t))
            lhs = fd_second_derivative(u, x) - math.exp(2 * x) * u(x)
            rhs = -mu * mu * u(x)
            assert abs(lhs - rhs) <= 1e-7 * max(abs(rhs), abs(u(x)))

    def test_monotone_decay_in_z(self):
        mu = 2.0
        z = np.linspace(2.0, 40.0, 50)
        vals = bessel_k_imaginary_order(mu, z)
        assert np.all(np.diff(vals) < 0)
        # exp(-z) envelope: ratio decays by roughly e^{-1} per unit
        assert vals[-1] < vals[0] * math.exp(-(z[-1] - z[0]) * 0.9)

    def test_vector_matches_scalar(self):
        z = np.array([0.3, 1.0, 4.0, 30.0])
        v = bessel_k_imaginary_order(4.0, z)
        for i, zz in enumerate(z):
            assert v[i] == pytest.approx(bessel_k_imaginary_order(4.0, zz), rel=1e-14)

    def test_rejects_nonpositive_z(self):
        with pytest.raises(InvalidArgument):
            bessel_k_imaginary_order(1.0, 0.0)
        with pytest.raises(InvalidArgument):
            bessel_k_imaginary_order(1.0, -2.0)

    def test_underflow_clamps_to_zero(self):
        assert bessel_k_imaginary_order(1.0, 800.0) == 0.0
