import numpy as np
import pytest

from wtoda.core_algebra import (
    RootSystem,
    SpectralParam,
    build_root_system,
    dual_inner,
    pairing,
    weyl_apply,
    weyl_group,
)
from wtoda.errors import InvalidArgument

from oracles import rho_from_ad_trace


def test_sl2_structure():
    rs = build_root_system(2, "SL")
    assert rs.positive_roots == ((1, -1),)
    # derived oracle: rho = (1/2, -1/2) from (1/2) tr(ad h|n) on the E_12 basis
    assert np.allclose(rs.rho, rho_from_ad_trace(2))
    assert np.allclose(rs.rho, [0.5, -0.5])


def test_gl3_rho_and_count():
    rs = build_root_system(3, "GL")
    assert np.allclose(rs.rho, rho_from_ad_trace(3))
    assert np.allclose(rs.rho, [1.0, 0.0, -1.0])
    assert len(rs.positive_roots) == 3


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_rho_matches_matrix_oracle(n):
    for variant in ("GL", "SL"):
        rs = build_root_system(n, variant)
        assert np.max(np.abs(rs.rho - rho_from_ad_trace(n))) < 1e-12


@pytest.mark.parametrize("n", [2, 3, 4])
def test_positive_root_count(n):
    rs = build_root_system(n, "SL")
    assert len(rs.positive_roots) == n * (n - 1) // 2
    assert len(rs.multiplicities) == len(rs.positive_roots)
    assert all(m == 1 for m in rs.multiplicities)


def test_root_norms_and_simple_decomposition():
    rs = build_root_system(4, "GL")
    simple = rs.simple()
    for alpha in rs.positive():
        assert dual_inner(alpha, alpha) == pytest.approx(2.0)
        coeffs = np.linalg.lstsq(simple.T, alpha, rcond=None)[0]
        assert np.allclose(coeffs, np.round(coeffs), atol=1e-12)
        assert np.all(np.round(coeffs) >= 0)
    # reduced system: 2*alpha never a root
    roots = {tuple(r) for r in rs.positive_roots}
    for r in rs.positive_roots:
        assert tuple(2 * c for c in r) not in roots


def test_rho_is_half_sum():
    rs = build_root_system(5, "SL")
    assert np.allclose(rs.rho, 0.5 * rs.positive().sum(axis=0))


def test_build_rejects_bad_args():
    with pytest.raises(InvalidArgument):
        build_root_system(1, "SL")
    with pytest.raises(InvalidArgument):
        build_root_system(3, "SU")


def test_pairing_examples():
    rs2 = build_root_system(2, "SL")
    assert pairing(rs2.rho, [1.3, -1.3]) == pytest.approx(1.3)
    assert pairing(np.array([2.0, 5.0, -1.0]), np.zeros(3)) == 0.0
    rs3 = build_root_system(3, "GL")
    assert pairing(rs3.simple()[0], [1.0, 0.0, 0.0]) == pytest.approx(1.0)
    with pytest.raises(InvalidArgument):
        pairing([1.0, 2.0], [1.0, 2.0, 3.0])


def test_dual_inner_examples():
    rs = build_root_system(3, "GL")
    a1, a2 = rs.simple()
    assert dual_inner(a1, a2) == pytest.approx(-1.0)
    rs2 = build_root_system(2, "SL")
    assert dual_inner(rs2.rho, rs2.rho) == pytest.approx(0.5)
    assert dual_inner(np.array([1.0, 2.0]), np.zeros(2)) == 0.0
    assert dual_inner(np.array([1 + 2j, 0]), np.array([1 + 2j, 0])) == pytest.approx(-3 + 4j)


def test_weyl_group_sl2():
    rs = build_root_system(2, "SL")
    ws = weyl_group(rs)
    assert len(ws) == 2
    flipped = weyl_apply(ws[1], np.array([0.7, -0.7]))
    assert np.allclose(flipped, [-0.7, 0.7])


def test_weyl_group_gl3_closure_and_regular_rho():
    rs = build_root_system(3, "GL")
    ws = weyl_group(rs)
    assert len(ws) == 6
    perms = {tuple(w) for w in ws}
    for w1 in ws:
        for w2 in ws:
            assert tuple(w1[w2]) in perms
    # regularity of rho: moved by every nontrivial element
    for w in ws[1:]:
        assert not np.allclose(weyl_apply(w, rs.rho), rs.rho)


def test_weyl_invariance_of_inner_product(rng):
    rs = build_root_system(4, "GL")
    for _ in range(25):
        lam = rng.standard_normal(4)
        mu = rng.standard_normal(4)
        base = dual_inner(lam, mu)
        for w in weyl_group(rs):
            assert abs(dual_inner(weyl_apply(w, lam), weyl_apply(w, mu)) - base) <= 1e-14 * max(1.0, abs(base))


def test_spectral_param():
    nu = SpectralParam.real([1.0, -1.0])
    assert nu.is_real()
    assert nu.norm_sq() == pytest.approx(2.0)
    z = SpectralParam.from_complex(np.array([1 + 2j, -1 - 2j]))
    assert not z.is_real()
    assert np.allclose(z.as_complex(), [1 + 2j, -1 - 2j])
    with pytest.raises(InvalidArgument):
        z.norm_sq()


def test_sl_trace_zero_check():
    rs = build_root_system(3, "SL")
    rs.check_cartan([1.0, -2.0, 1.0])
    with pytest.raises(InvalidArgument):
        rs.check_cartan([1.0, 0.0, 0.0])


def test_cartan_basis_orthonormal():
    for n, variant in [(2, "SL"), (3, "SL"), (3, "GL")]:
        rs = build_root_system(n, variant)
        B = rs.cartan_basis()
        assert np.allclose(B @ B.T, np.eye(len(B)), atol=1e-14)
        if variant == "SL":
            assert np.allclose(B.sum(axis=1), 0.0, atol=1e-14)


def test_json_round_trip():
    import json

    rs = build_root_system(3, "SL")
    doc = json.loads(rs.to_json())
    assert doc["n"] == 3 and doc["variant"] == "SL"
    assert doc["rho"] == [1.0, 0.0, -1.0]
    assert doc["simple_roots"] == [[1, -1, 0], [0, 1, -1]]
    assert len(doc["positive_roots"]) == 3
