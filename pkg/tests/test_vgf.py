import numpy as np
import pytest

from gmfkit.hset import (
    Fantope,
    Ray,
    ShiftedPSDCap,
    Singleton,
    SpectralBox,
    TraceBall,
)
from gmfkit.numlin import sv
from gmfkit.vgf import (
    KyFanParams,
    VgfInstance,
    gauge_factor_sup,
    kyfan_norm,
    kyfan_vgf_identity,
    vgf_conj,
    vgf_eval,
    vgf_gauge_decomp,
    vgf_subdiff,
)

rng = np.random.default_rng(4)


def test_spectral_box_is_half_frobenius_squared():
    inst = VgfInstance(SpectralBox(0.0, 1.0, 3), 2)
    Y = rng.standard_normal((3, 2))
    val, V = vgf_eval(inst, Y)
    assert val == pytest.approx(0.5 * np.linalg.norm(Y) ** 2, rel=1e-10)
    # the witness attains the support value over the box
    assert 0.5 * np.sum(V * (Y @ Y.T)) == pytest.approx(val, rel=1e-8)


def test_trace_ball_is_half_spectral_squared():
    inst = VgfInstance(TraceBall(1.0, 3), 2)
    Y = rng.standard_normal((3, 2))
    val, _ = vgf_eval(inst, Y)
    assert val == pytest.approx(0.5 * sv(Y)[0] ** 2, rel=1e-10)


def test_ray_instance_is_indicator_of_zero():
    inst = VgfInstance(Ray(np.eye(2)), 1)
    assert vgf_eval(inst, np.zeros((2, 1)))[0] == 0.0
    assert vgf_eval(inst, np.array([[1.0], [0.0]]))[0] == np.inf


def test_rejects_empty_psd_slice():
    with pytest.raises(ValueError):
        VgfInstance(Singleton(-np.eye(2)), 1)


def test_homogeneity_degree_two():
    inst = VgfInstance(TraceBall(1.0, 3), 2)
    Y = rng.standard_normal((3, 2))
    base = vgf_eval(inst, Y)[0]
    for t in (0.5, 2.0, 7.0):
        assert vgf_eval(inst, t * Y)[0] == pytest.approx(t * t * base, rel=1e-10)


def test_conjugate_of_half_frobenius_squared_is_itself():
    # the spectral box penalty is self-conjugate
    inst = VgfInstance(SpectralBox(0.0, 1.0, 2), 2)
    X = rng.standard_normal((2, 2))
    val, _ = vgf_conj(inst, X)
    assert val == pytest.approx(0.5 * np.linalg.norm(X) ** 2, rel=1e-6)


def test_conjugate_trace_ball_is_half_nuclear_squared():
    inst = VgfInstance(TraceBall(1.0, 2), 2)
    X = rng.standard_normal((2, 2))
    val, _ = vgf_conj(inst, X)
    assert val == pytest.approx(0.5 * np.sum(sv(X)) ** 2, rel=1e-5)


def test_subdiff_fenchel_young():
    for S in (SpectralBox(0.0, 1.0, 3), TraceBall(1.0, 3), Fantope(2, 3)):
        inst = VgfInstance(S, 2)
        Y = rng.standard_normal((3, 2))
        X, V, gap = vgf_subdiff(inst, Y)
        assert abs(gap) <= 1e-8
        assert np.allclose(X, V @ Y, atol=1e-10)


def test_subdiff_requires_bounded_slice():
    inst = VgfInstance(Ray(np.eye(2)), 1)
    with pytest.raises(ValueError):
        vgf_subdiff(inst, np.zeros((2, 1)))


def test_gauge_decomposition_consistent():
    for S in (
        SpectralBox(0.0, 1.0, 2),
        TraceBall(1.0, 2),
        Fantope(1, 2),
        Singleton(np.eye(2)),
        ShiftedPSDCap(np.eye(2)),
    ):
        inst = VgfInstance(S, 2)
        Y = rng.standard_normal((2, 2))
        g, consistent, detail = vgf_gauge_decomp(inst, Y)
        assert consistent, detail
        phi = vgf_eval(inst, Y)[0]
        assert phi == pytest.approx(0.5 * g * g, rel=1e-8)


def test_gauge_factor_matches_closed_form():
    inst = VgfInstance(SpectralBox(0.0, 1.0, 3), 2)
    Y = rng.standard_normal((3, 2))
    assert gauge_factor_sup(inst, Y) == pytest.approx(np.linalg.norm(Y), rel=1e-10)


def test_kyfan_norm_values():
    X = np.diag([3.0, 4.0, 0.0])
    assert kyfan_norm(KyFanParams(1.0, 2), X) == pytest.approx(7.0)
    assert kyfan_norm(KyFanParams(2.0, 3), X) == pytest.approx(5.0)
    assert kyfan_norm(KyFanParams(np.inf, 1), X) == pytest.approx(4.0)


def test_kyfan_bad_k():
    with pytest.raises(ValueError):
        kyfan_norm(KyFanParams(2.0, 4), np.eye(3))


def test_kyfan_vgf_identity():
    for _ in range(10):
        n = int(rng.integers(1, 5))
        m = int(rng.integers(1, 5))
        X = rng.standard_normal((n, m))
        for k in range(1, min(n, m) + 1):
            lhs, rhs, ok = kyfan_vgf_identity(KyFanParams(2.0, k), X)
            assert ok
            assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-9)


def test_kyfan_identity_requires_p_two():
    with pytest.raises(ValueError):
        kyfan_vgf_identity(KyFanParams(1.0, 1), np.eye(2))


def test_triangle_inequality_via_sqrt():
    # sqrt(2 Phi) is a norm for the trace ball variant
    inst = VgfInstance(TraceBall(1.0, 3), 2)
    Y1 = rng.standard_normal((3, 2))
    Y2 = rng.standard_normal((3, 2))
    f = lambda Y: np.sqrt(2.0 * vgf_eval(inst, Y)[0])
    assert f(Y1 + Y2) <= f(Y1) + f(Y2) + 1e-10
