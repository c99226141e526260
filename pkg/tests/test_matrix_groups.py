import itertools
import math

import numpy as np
import pytest

from wtoda.core_algebra import SpectralParam, build_root_system
from wtoda.errors import InvalidArgument, PreconditionError
from wtoda.matrix_groups import (
    CharacterData,
    a_o_of,
    a_of,
    ad_matrix,
    beuzart_plessis_probe,
    c_function_quadrature,
    check_group,
    iwasawa_nak,
    iwasawa_nbar_ak,
    jacquet_from_field,
    jacquet_phase_field,
    jacquet_quadrature,
    norm_bars,
    norm_doublebar,
    random_sl,
    theta,
    wedge_top_norm,
)
from wtoda.plancherel import c_function
from wtoda.special_functions import log_gamma

from oracles import bessel_k_raw_quadrature


class Quad:
    def __init__(self, radius=2000.0, nodes=320, tol=1e-7):
        self.radius = radius
        self.nodes_per_dim = nodes
        self.tol = tol


class TestIwasawa:
    def test_identity(self):
        dec = iwasawa_nbar_ak(np.eye(3))
        assert np.allclose(dec.nbar, np.eye(3))
        assert np.allclose(dec.a, np.ones(3))
        assert np.allclose(dec.k, np.eye(3))

    def test_upper_shear(self):
        # derived: g g^T = [[2,1],[1,1]], lower Cholesky diag = (sqrt2, 1/sqrt2)
        dec = iwasawa_nbar_ak(np.array([[1.0, 1.0], [0.0, 1.0]]))
        assert np.allclose(dec.a, [math.sqrt(2.0), 1.0 / math.sqrt(2.0)], atol=1e-14)

    def test_reassembly_random(self, rng):
        for n in (2, 3):
            for _ in range(20):
                g = random_sl(n, rng)
                dec = iwasawa_nbar_ak(g)
                assert np.max(np.abs(dec.reassemble() - g)) < 1e-12 * max(1, np.abs(g).max())
                assert np.all(dec.a > 0)
                assert np.max(np.abs(dec.k @ dec.k.T - np.eye(n))) < 1e-12
                assert np.max(np.abs(np.triu(dec.nbar, 1))) == 0.0

    def test_nak_diagonal(self):
        g = np.diag([2.0, 0.5])
        n, a, k = iwasawa_nak(g)
        assert np.allclose(a, [2.0, 0.5])
        assert np.allclose(n, np.eye(2))

    def test_nak_lower_shear(self):
        # derived via a_o(g) = a(theta(g))^{-1}
        a_o = a_o_of(np.array([[1.0, 0.0], [1.0, 1.0]]))
        assert np.allclose(a_o, [1.0 / math.sqrt(2.0), math.sqrt(2.0)], atol=1e-14)

    def test_nak_theta_consistency(self, rng):
        for _ in range(20):
            g = random_sl(3, rng)
            assert np.max(np.abs(a_o_of(g) * a_of(theta(g)) - 1.0)) < 1e-11

    def test_singular_refusal(self):
        with pytest.raises(PreconditionError):
            iwasawa_nbar_ak(np.array([[1.0, 1.0], [1.0, 1.0]]))


def _compound_matrix_norm(mat: np.ndarray, m: int) -> float:
    """Oracle: operator 2-norm of the m-th compound (exterior power) matrix."""
    idx = list(itertools.combinations(range(mat.shape[0]), m))
    comp = np.empty((len(idx), len(idx)))
    for i, rows in enumerate(idx):
        for j, cols in enumerate(idx):
            comp[i, j] = np.linalg.det(mat[np.ix_(rows, cols)])
    return float(np.linalg.norm(comp, 2))


class TestNorms:
    def test_diagonal_sl2(self):
        # |diag(t, 1/t)| = t^2 = a^{2 rho} for the KAK-reduced element
        for t in (1.5, 3.0, 7.0):
            g = np.diag([t, 1.0 / t])
            assert norm_bars(g) == pytest.approx(t * t, rel=1e-10)
            assert norm_doublebar(g) == pytest.approx(t, rel=1e-10)

    def test_orthogonal_is_one(self):
        th = 0.731
        k = np.array([[math.cos(th), -math.sin(th)], [math.sin(th), math.cos(th)]])
        assert norm_bars(k) == pytest.approx(1.0, abs=1e-12)

    def test_orthogonal_invariance(self, rng):
        th = 1.1
        k = np.array([[math.cos(th), -math.sin(th)], [math.sin(th), math.cos(th)]])
        for _ in range(10):
            g = random_sl(2, rng)
            b = norm_bars(g)
            assert norm_bars(k @ g) == pytest.approx(b, rel=1e-10)
            assert norm_bars(g @ k) == pytest.approx(b, rel=1e-10)

    def test_vs_compound_matrix_oracle(self, rng):
        for n in (2, 3):
            m = n * (n - 1) // 2
            for _ in range(6):
                g = random_sl(n, rng)
                ref = _compound_matrix_norm(ad_matrix(g), m)
                assert norm_bars(g) == pytest.approx(ref, rel=1e-9)

    def test_submultiplicative(self, rng):
        for n in (2, 3):
            for _ in range(200):
                g, h = random_sl(n, rng), random_sl(n, rng)
                assert norm_bars(g @ h) <= norm_bars(g) * norm_bars(h) * (1 + 1e-10)
                assert norm_doublebar(g @ h) <= norm_doublebar(g) * norm_doublebar(h) * (1 + 1e-10)

    def test_doublebar_geq_one(self, rng):
        assert norm_doublebar(np.eye(3)) == pytest.approx(1.0)
        for _ in range(100):
            assert norm_bars(random_sl(3, rng)) >= 1.0 - 1e-12

    def test_gl_center(self):
        g = 2.0 * np.eye(2)
        # ||c I|| = exp(sqrt(n) |log c|), semisimple part trivial
        assert norm_doublebar(g, "GL_plus") == pytest.approx(
            math.exp(math.sqrt(2.0) * math.log(2.0)), rel=1e-12)

    def test_wedge_identity(self, rng):
        # a(g)^{2 rho} = || wedge^m Ad(g)^{-1} u_o ||
        for n in (2, 3):
            rs = build_root_system(n, "SL")
            for _ in range(10):
                g = random_sl(n, rng)
                a = a_of(g)
                lhs = math.exp(2.0 * float(rs.rho @ np.log(a)))
                assert wedge_top_norm(g) == pytest.approx(lhs, rel=1e-10)

    def test_appendix1_inequality_sample(self, rng):
        # a(xg)^{-rho} <= |g|^{1/2} a(x)^{-rho}
        for n in (2, 3):
            rs = build_root_system(n, "SL")
            rho = rs.rho
            for _ in range(200):
                x, g = random_sl(n, rng), random_sl(n, rng)
                lhs = math.exp(-float(rho @ np.log(a_of(x @ g))))
                rhs = math.sqrt(norm_bars(g)) * math.exp(-float(rho @ np.log(a_of(x))))
                assert lhs <= rhs * (1 + 1e-10)

    def test_check_group(self):
        check_group(np.eye(2), "SL")
        with pytest.raises(InvalidArgument):
            check_group(2 * np.eye(2), "SL")
        with pytest.raises(InvalidArgument):
            check_group(-np.eye(3), "GL_plus")


class TestCFunctionQuadrature:
    def test_sl2_matches_gk_exactly(self):
        # flat measure on the E_12 coordinate makes the GK ratio exactly 1
        rs = build_root_system(2, "SL")
        for s in (-1.2, -1.8, -2.5):
            nu = SpectralParam.real(np.array([s, -s]))
            res = c_function_quadrature(rs, nu, Quad())
            gk = c_function(rs, nu)
            assert res.value.real == pytest.approx(gk.real, rel=2e-7)
            assert abs(res.value.imag) < 1e-10

    def test_sl2_exact_value(self):
        # int (1+x^2)^{-3/2} dx = 2 at nu = -2 rho
        rs = build_root_system(2, "SL")
        nu = SpectralParam.real(-2.0 * rs.rho)
        res = c_function_quadrature(rs, nu, Quad())
        assert res.value.real == pytest.approx(2.0, rel=1e-7)

    def test_refusal_outside_region(self):
        rs = build_root_system(2, "SL")
        with pytest.raises(PreconditionError):
            c_function_quadrature(rs, SpectralParam.real(np.array([0.0, 0.0])), Quad())
        with pytest.raises(PreconditionError):
            c_function_quadrature(rs, SpectralParam.real(np.array([1.0, -1.0])), Quad())

    def test_sl3_finite_and_converged(self):
        rs = build_root_system(3, "SL")
        nu = SpectralParam.real(-2.0 * rs.rho)
        res = c_function_quadrature(rs, nu, Quad(radius=300.0, nodes=192, tol=1e-4))
        gk = c_function(rs, nu)
        assert res.converged
        assert res.value.real == pytest.approx(gk.real, rel=2e-4)


class TestJacquet:
    def test_trivial_character_reduces_to_c(self):
        rs = build_root_system(2, "SL")
        nu = SpectralParam.real(np.array([-1.3, 1.3]))
        chi0 = CharacterData(xi=(0.0,))
        jv = jacquet_quadrature(rs, chi0, nu, Quad())
        cv = c_function_quadrature(rs, nu, Quad())
        assert jv.value == pytest.approx(cv.value, rel=1e-8)

    def test_sl2_closed_form(self):
        # J = e^{y} 2^{1+s} sqrt(pi) |xi|^{-s} K_s(|xi| e^{2y}) / Gamma(1/2-s)
        rs = build_root_system(2, "SL")
        s = -0.8
        xi = 1.3
        nu = SpectralParam.real(np.array([s, -s]))
        chi = CharacterData(xi=(xi,))
        got = jacquet_quadrature(rs, chi, nu, Quad(radius=600.0, nodes=256)).value
        k_s = bessel_k_raw_quadrature_real_order(s, xi)
        ref = 2.0 ** (1 + s) * math.sqrt(math.pi) * xi ** (-s) * k_s \
            / math.exp(log_gamma(0.5 - s).real)
        assert got.real == pytest.approx(ref, rel=1e-7)
        assert abs(got.imag) < 1e-9 * abs(ref)

    def test_conjugation_symmetry(self):
        rs = build_root_system(2, "SL")
        nu = SpectralParam.real(np.array([-1.1, 1.1]))
        jp = jacquet_quadrature(rs, CharacterData(xi=(1.0,)), nu, Quad()).value
        jm = jacquet_quadrature(rs, CharacterData(xi=(-1.0,)), nu, Quad()).value
        assert jm == pytest.approx(np.conj(jp), rel=1e-10)

    def test_sl3_finite(self):
        rs = build_root_system(3, "SL")
        nu = SpectralParam.real(-2.0 * rs.rho)
        chi = CharacterData(xi=(1.0, 1.0))
        res = jacquet_quadrature(rs, chi, nu, Quad(radius=200.0, nodes=176, tol=1e-4))
        assert np.isfinite(res.value.real) and np.isfinite(res.value.imag)
        assert res.err_est < 1e-3 * abs(res.value)

    def test_phase_field_consistency(self):
        # field + rescaling identity vs direct translated quadrature
        rs = build_root_system(2, "SL")
        s = -0.9
        nu = SpectralParam.real(np.array([s, -s]))
        chi = CharacterData(xi=(1.0,))
        h = np.array([-0.35, 0.35])
        direct = jacquet_quadrature(rs, chi, nu, Quad(radius=900.0, nodes=288), h=h).value
        field = jacquet_phase_field(rs, nu, 900.0, 288, max_frequency=1.0)
        via_field = jacquet_from_field(rs, nu, field, chi, h)
        assert via_field == pytest.approx(direct, rel=1e-7)

    def test_translated_scaling_identity(self):
        # J(pi(exp h)1) = e^{(nu+rho)(h)} J_{chi_h}(1)
        rs = build_root_system(2, "SL")
        s = -1.0
        nu = SpectralParam.real(np.array([s, -s]))
        h = np.array([0.25, -0.25])
        chi = CharacterData(xi=(0.7,))
        lhs = jacquet_quadrature(rs, chi, nu, Quad(radius=900.0, nodes=288), h=h).value
        chi_scaled = CharacterData(xi=(0.7 * math.exp(float(rs.simple()[0] @ h)),))
        rhs = math.exp(float((nu.re + rs.rho) @ h)) * \
            jacquet_quadrature(rs, chi_scaled, nu, Quad(radius=900.0, nodes=288)).value
        assert lhs == pytest.approx(rhs, rel=1e-9)


def bessel_k_raw_quadrature_real_order(s: float, z: float) -> float:
    """Oracle: K_s(z) for small real order via the cosh-integral."""
    tmax = math.acosh(745.0 / z) if z < 700 else 1.0
    n = 4096
    prev = None
    for _ in range(10):
        t = np.linspace(0.0, tmax, n + 1)
        f = np.exp(-z * np.cosh(t)) * np.cosh(s * t)
        val = np.trapezoid(f, t)
        if prev is not None and abs(val - prev) <= 1e-13 * abs(val):
            return val
        prev, n = val, 2 * n
    return prev


class TestBeuzartPlessisProbe:
    def test_sl2_point_mass(self):
        rs = build_root_system(2, "SL")
        rows = beuzart_plessis_probe(rs, CharacterData(xi=(1.0,)), 0.1, [1, 2, 4])
        assert [r["partial_integral"] for r in rows] == [1.0, 1.0, 1.0]

    def test_sl3_convergent(self):
        rs = build_root_system(3, "SL")
        rows = beuzart_plessis_probe(rs, CharacterData(xi=(1.0, 1.0)), 0.1,
                                     [1.0, 2.0, 4.0, 8.0, 16.0, 32.0])
        diffs = [r["cauchy_diff"] for r in rows[1:]]
        assert all(d > 0 for d in diffs)
        # decreasing beyond some radius: empirical convergence signature
        assert diffs[-1] < diffs[-2] < diffs[-3]

    def test_epsilon_one_divergence_visible(self):
        # integrand -> 1 as eps -> 1: partial integrals grow like the area
        rs = build_root_system(3, "SL")
        rows = beuzart_plessis_probe(rs, CharacterData(xi=(1.0, 1.0)), 0.999,
                                     [2.0, 4.0, 8.0])
        diffs = [r["cauchy_diff"] for r in rows[1:]]
        assert diffs[1] > diffs[0] > 1.0

    def test_nongeneric_refusal(self):
        rs = build_root_system(3, "SL")
        with pytest.raises(PreconditionError):
            beuzart_plessis_probe(rs, CharacterData(xi=(1.0, 0.0)), 0.1, [1.0])

    def test_bad_epsilon(self):
        rs = build_root_system(3, "SL")
        with pytest.raises(InvalidArgument):
            beuzart_plessis_probe(rs, CharacterData(xi=(1.0, 1.0)), 1.2, [1.0])


def test_random_sl_ensemble_determinism():
    a = random_sl(3, np.random.default_rng(7))
    b = random_sl(3, np.random.default_rng(7))
    assert np.array_equal(a, b)
    assert np.linalg.det(a) == pytest.approx(1.0, rel=1e-12)
