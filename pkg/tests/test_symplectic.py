import numpy as np
import pytest
from hypothesis import given, seed, settings
from hypothesis import strategies as st

from bogolab import onepdm, symplectic

import util

RESIDUAL_TOL = 1e-9


def test_identity_and_squeeze_maps():
    ident = symplectic.BogoliubovMap.identity(2)
    assert symplectic.symplectic_defect(ident) < 1e-14
    assert symplectic.shale_stinespring_norm(ident) == 0.0
    sq = symplectic.squeeze_map(0.7)
    assert symplectic.symplectic_defect(sq) < 1e-12
    assert symplectic.shale_stinespring_norm(sq) == pytest.approx(np.sinh(0.7) ** 2)


def test_random_map_compose_inverse():
    rng = np.random.default_rng(0)
    a = symplectic.random_bogoliubov(3, rng)
    b = symplectic.random_bogoliubov(3, rng)
    prod = symplectic.compose(a, b)
    assert np.allclose(prod.doubled(), a.doubled() @ b.doubled())
    inv = symplectic.inverse(a)
    assert np.allclose(symplectic.compose(a, inv).doubled(), np.eye(6), atol=1e-10)
    # inverse formula S V^* S
    s = onepdm.sign_matrix(3)
    assert np.allclose(inv.doubled(), s @ a.doubled().conj().T @ s)


def test_from_doubled_rejects_non_symplectic():
    rng = np.random.default_rng(1)
    mat = rng.standard_normal((4, 4))
    with pytest.raises(ValueError):
        symplectic.BogoliubovMap.from_doubled(mat)
    good = symplectic.random_bogoliubov(2, rng)
    back = symplectic.BogoliubovMap.from_doubled(good.doubled())
    assert np.allclose(back.U, good.U)


def test_diagonalize_onepdm_identities():
    rng = np.random.default_rng(2)
    for m in (1, 2, 4):
        p, lam_ref = util.random_admissible(rng, m)
        res = symplectic.diagonalize_onepdm(p)
        assert res.residual < RESIDUAL_TOL
        assert symplectic.symplectic_defect(res.map) < RESIDUAL_TOL
        assert np.allclose(np.sort(res.values), lam_ref, atol=1e-8)
        transformed = res.map.doubled().conj().T @ onepdm.full_gamma(p) @ res.map.doubled()
        target = np.diag(np.concatenate([res.values, 1.0 + res.values]))
        assert np.linalg.norm(transformed - target, 2) < RESIDUAL_TOL


def test_diagonalize_onepdm_degenerate_occupations():
    # equal occupations across modes form one degenerate cluster
    rng = np.random.default_rng(3)
    m = 4
    w = symplectic.random_bogoliubov(m, rng, strength=0.5)
    lam = np.full(m, 0.8)
    diag = np.diag(np.concatenate([lam, 1.0 + lam]))
    g = w.doubled() @ diag @ w.doubled().conj().T
    p = onepdm.OnePdm(g[:m, :m], 0.5 * (g[:m, m:] + g[:m, m:].T))
    res = symplectic.diagonalize_onepdm(p)
    assert res.residual < RESIDUAL_TOL
    assert np.allclose(res.values, 0.8, atol=1e-8)


def test_diagonalize_onepdm_rejects_inadmissible():
    p = onepdm.OnePdm(gamma=np.zeros((1, 1)), alpha=np.array([[0.5]]))
    with pytest.raises(ValueError):
        symplectic.diagonalize_onepdm(p)


def test_diagonalize_quadratic_basic():
    a = np.array([[5.0]])
    b = np.array([[3.0]])
    mat = np.block([[a, b], [b, a]])
    res = symplectic.diagonalize_quadratic(mat)
    assert res.values[0] == pytest.approx(4.0, abs=1e-10)
    assert res.residual < 1e-10
    assert res.kernel_dim == 0


def test_diagonalize_quadratic_kernel_and_indefinite():
    # singular PSD input: kernel handled by regularization and reported
    mat = np.diag([1.0, 0.0, 1.0, 0.0])
    res = symplectic.diagonalize_quadratic(mat)
    assert res.kernel_dim == 2
    assert res.residual < 1e-8
    with pytest.raises(ValueError):
        symplectic.diagonalize_quadratic(np.diag([1.0, -1.0, 1.0, -1.0]))
    with pytest.raises(ValueError):
        # does not commute with J
        bad = np.diag([2.0, 1.0, 1.0, 1.0])
        symplectic.diagonalize_quadratic(bad)


@seed(20260823)
@settings(max_examples=25, deadline=None)
@given(
    modes=st.integers(min_value=1, max_value=3),
    key=st.integers(min_value=0, max_value=2**31 - 1),
    strength=st.floats(min_value=0.05, max_value=0.8),
)
def test_symplectic_group_properties(modes, key, strength):
    rng = np.random.default_rng(key)
    v = symplectic.random_bogoliubov(modes, rng, strength)
    s = onepdm.sign_matrix(modes)
    d = v.doubled()
    # group relations: S-form preservation, J-commutation, block identities
    assert np.linalg.norm(d.conj().T @ s @ d - s, 2) < 1e-9
    assert np.linalg.norm(onepdm.j_conjugate(d) - d, 2) < 1e-12
    u, vv = v.U, v.V
    assert np.allclose(u @ u.conj().T - vv @ vv.conj().T, np.eye(modes), atol=1e-9)
    assert np.allclose(u.conj().T @ u - vv.T @ np.conj(vv), np.eye(modes), atol=1e-9)
