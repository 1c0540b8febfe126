import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gmfkit.numlin import (
    DEFAULT_TOL,
    Tolerances,
    ker_basis,
    ker_projector,
    max_eig,
    min_eig,
    pinv,
    psd_sqrt,
    range_contains,
    sv,
    sym,
    sym_eig,
)

rng = np.random.default_rng(0)


def rand_sym(n):
    M = rng.standard_normal((n, n))
    return 0.5 * (M + M.T)


def test_sym_accepts_and_rejects():
    S = rand_sym(3)
    assert np.allclose(sym(S), S)
    with pytest.raises(ValueError):
        sym(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_sym_symmetrizes_small_noise():
    S = rand_sym(3)
    noisy = S + 1e-12 * np.triu(np.ones((3, 3)), 1)
    out = sym(noisy)
    assert np.allclose(out, out.T)


def test_pinv_matches_numpy_on_full_rank():
    M = rng.standard_normal((4, 4)) + 4 * np.eye(4)
    assert np.allclose(pinv(M), np.linalg.inv(M), atol=1e-10)


def test_pinv_rank_deficient():
    u = rng.standard_normal((3, 1))
    M = u @ u.T
    P = pinv(M)
    assert np.allclose(M @ P @ M, M, atol=1e-10)


def test_range_contains():
    A = np.array([[1.0, 0.0], [0.0, 0.0]])
    assert range_contains(A, np.array([[2.0], [0.0]]))
    assert not range_contains(A, np.array([[0.0], [1.0]]))


def test_ker_basis_orthonormal():
    A = np.array([[1.0, 1.0, 0.0]])
    N = ker_basis(A)
    assert N.shape == (3, 2)
    assert np.allclose(N.T @ N, np.eye(2), atol=1e-12)
    assert np.allclose(A @ N, 0.0, atol=1e-12)


def test_ker_basis_trivial():
    N = ker_basis(np.eye(2))
    assert N.shape == (2, 0)


def test_ker_projector_idempotent():
    A = rng.standard_normal((2, 5))
    P = ker_projector(A)
    assert np.allclose(P @ P, P, atol=1e-12)
    assert np.allclose(A @ P, 0.0, atol=1e-10)


def test_eig_helpers_agree_with_numpy():
    S = rand_sym(5)
    w = np.linalg.eigvalsh(S)
    assert min_eig(S) == pytest.approx(w[0], abs=1e-12)
    assert max_eig(S) == pytest.approx(w[-1], abs=1e-12)
    lam, Q = sym_eig(S)
    assert np.allclose(Q @ np.diag(lam) @ Q.T, S, atol=1e-10)


def test_sv_sorted_descending():
    X = rng.standard_normal((4, 3))
    s = sv(X)
    assert np.all(np.diff(s) <= 0)
    assert np.allclose(s, np.linalg.svd(X, compute_uv=False))


def test_psd_sqrt_squares_back():
    M = rng.standard_normal((4, 4))
    S = M @ M.T
    R = psd_sqrt(S)
    assert np.allclose(R @ R, S, atol=1e-8)
    assert min_eig(R) >= -1e-12


def test_tolerances_immutable_defaults():
    t = Tolerances()
    assert t.rank_rel == DEFAULT_TOL.rank_rel
    assert t.psd_abs > 0 and t.feas_abs > 0 and t.conj_rel > 0


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 5), st.integers(0, 2**31 - 1))
def test_psd_sqrt_property(n, seed):
    g = np.random.default_rng(seed)
    M = g.standard_normal((n, n))
    S = M @ M.T
    R = psd_sqrt(S)
    assert np.allclose(R, R.T, atol=1e-10)
    assert np.allclose(R @ R, S, atol=1e-7 * (1 + np.linalg.norm(S)))


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 4), st.integers(1, 4), st.integers(0, 2**31 - 1))
def test_pinv_penrose_property(nr, nc, seed):
    g = np.random.default_rng(seed)
    M = g.standard_normal((nr, nc))
    P = pinv(M)
    assert np.allclose(M @ P @ M, M, atol=1e-8)
    assert np.allclose(P @ M @ P, P, atol=1e-8)
