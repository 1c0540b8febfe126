import numpy as np
import pytest

from gmfkit.hset import (
    Fantope,
    Hull,
    Indicator,
    Linear,
    Ray,
    ShiftedPSDCap,
    Singleton,
    SpectralBox,
    Support,
    TraceBall,
    contains_zero,
    gauge,
    h_conj,
    h_eval,
    hspec_from_json,
    hspec_to_json,
    is_bounded,
    member,
    project,
    psd_cap_bounded,
    psd_cap_nonempty,
    psd_cap_support,
    set_from_json,
    set_to_json,
    support,
)

rng = np.random.default_rng(2)


def rand_sym(n):
    M = rng.standard_normal((n, n))
    return 0.5 * (M + M.T)


ALL_SETS = [
    Singleton(np.array([[2.0, 0.0], [0.0, 1.0]])),
    SpectralBox(0.0, 1.0, 2),
    SpectralBox(-0.5, 1.5, 2),
    TraceBall(1.0, 2),
    Fantope(1, 2),
    Hull((np.zeros((2, 2)), np.array([[2.0, 1.0], [1.0, 0.0]]))),
    Ray(np.eye(2)),
    ShiftedPSDCap(np.eye(2)),
]


def test_boundedness_classification():
    assert is_bounded(SpectralBox(0.0, 1.0, 2))
    assert is_bounded(TraceBall(2.0, 3))
    assert is_bounded(Fantope(2, 3))
    assert is_bounded(Singleton(np.eye(2)))
    assert is_bounded(Hull((np.zeros((2, 2)), np.eye(2))))
    assert is_bounded(ShiftedPSDCap(np.eye(2)))
    assert not is_bounded(Ray(np.eye(2)))


def test_contains_zero():
    assert contains_zero(SpectralBox(0.0, 1.0, 2))
    assert contains_zero(TraceBall(1.0, 2))
    assert contains_zero(Ray(np.eye(2)))
    assert not contains_zero(Singleton(np.eye(2)))


def test_support_values_closed_forms():
    G = np.diag([3.0, -1.0])
    val, W = support(SpectralBox(0.0, 1.0, 2), G)
    assert val == pytest.approx(3.0)  # positive part of the spectrum
    val, _ = support(TraceBall(1.0, 2), G)
    assert val == pytest.approx(3.0)  # top eigenvalue
    val, _ = support(Fantope(1, 2), G)
    assert val == pytest.approx(3.0)
    val, _ = support(Singleton(np.eye(2)), G)
    assert val == pytest.approx(2.0)  # trace inner product
    val, _ = support(Ray(np.eye(2)), G)
    assert val == np.inf  # positive trace direction is unbounded
    val, _ = support(Ray(np.eye(2)), -np.eye(2))
    assert val == pytest.approx(0.0)


def test_support_witness_attains():
    for S in ALL_SETS:
        G = rand_sym(2)
        val, W = support(S, G)
        if np.isfinite(val) and W is not None:
            assert member(S, W) or np.sum(W * G) <= val + 1e-7
            assert np.sum(W * G) == pytest.approx(val, abs=1e-7)


def test_psd_cap_support_spectral_box():
    G = np.diag([1.0, -2.0])
    val, V = psd_cap_support(SpectralBox(-1.0, 1.0, 2), G)
    # over the PSD part only the positive spectrum contributes
    assert val == pytest.approx(1.0)
    assert np.linalg.eigvalsh(V).min() >= -1e-9


def test_psd_cap_nonempty_and_bounded():
    assert psd_cap_nonempty(SpectralBox(0.0, 1.0, 2))
    assert not psd_cap_nonempty(Singleton(-np.eye(2)))
    assert psd_cap_bounded(TraceBall(1.0, 2))
    assert not psd_cap_bounded(Ray(np.eye(2)))


def test_member():
    assert member(SpectralBox(0.0, 1.0, 2), 0.5 * np.eye(2))
    assert not member(SpectralBox(0.0, 1.0, 2), 2.0 * np.eye(2))
    assert member(TraceBall(1.0, 2), np.diag([0.5, 0.5]))
    assert not member(TraceBall(1.0, 2), np.diag([0.8, 0.8]))
    assert member(Hull((np.zeros((2, 2)), np.eye(2))), 0.25 * np.eye(2))
    assert not member(Hull((np.zeros((2, 2)), np.eye(2))), -0.1 * np.eye(2))
    assert member(Ray(np.eye(2)), 7.0 * np.eye(2))
    assert not member(Ray(np.eye(2)), np.diag([1.0, 2.0]))


def test_project_into_set():
    for S in ALL_SETS:
        V = rand_sym(2)
        P = project(S, V)
        assert member(S, P) or np.linalg.norm(P - project(S, P)) <= 1e-6


def test_project_fixed_point_on_members():
    S = SpectralBox(0.0, 1.0, 2)
    V = 0.3 * np.eye(2)
    assert np.allclose(project(S, V), V, atol=1e-10)


def test_gauge_closed_forms():
    G = np.diag([2.0, 1.0])
    assert gauge(SpectralBox(0.0, 1.0, 2), G) == pytest.approx(2.0)
    assert gauge(TraceBall(1.0, 2), G) == pytest.approx(3.0)


def test_gauge_homogeneous():
    S = TraceBall(1.0, 2)
    G = np.diag([1.0, 0.5])
    assert gauge(S, 2.0 * G) == pytest.approx(2.0 * gauge(S, G), rel=1e-6)


def test_h_eval_and_conj():
    U = 0.5 * np.eye(2)
    h = Linear(U)
    V = np.diag([1.0, 3.0])
    assert h_eval(h, V) == pytest.approx(2.0)
    # conjugate of a linear functional is the indicator of its slope
    assert h_conj(h, U) == 0.0
    assert h_conj(h, np.zeros((2, 2))) == np.inf

    hi = Indicator(SpectralBox(0.0, 1.0, 2))
    assert h_eval(hi, 0.5 * np.eye(2)) == 0.0
    assert h_eval(hi, 2.0 * np.eye(2)) == np.inf
    # conjugate of the indicator is the support function
    W = np.diag([3.0, -1.0])
    assert h_conj(hi, W) == pytest.approx(3.0)

    hs = Support(SpectralBox(0.0, 1.0, 2))
    assert h_eval(hs, W) == pytest.approx(3.0)
    assert h_conj(hs, 0.5 * np.eye(2)) == 0.0


def test_set_json_roundtrip():
    for S in ALL_SETS:
        S2 = set_from_json(set_to_json(S))
        assert type(S2) is type(S)
        G = rand_sym(2)
        v1, _ = support(S, G)
        v2, _ = support(S2, G)
        assert v1 == pytest.approx(v2, abs=1e-12) or (v1 == v2)


def test_hspec_json_roundtrip():
    specs = [
        Linear(0.5 * np.eye(2)),
        Indicator(TraceBall(1.0, 2)),
        Support(Fantope(1, 2)),
    ]
    for h in specs:
        h2 = hspec_from_json(hspec_to_json(h))
        assert type(h2) is type(h)
        V = rand_sym(2)
        assert h_eval(h, V) == pytest.approx(h_eval(h2, V), abs=1e-12)


def test_bad_json_rejected():
    with pytest.raises((KeyError, ValueError)):
        set_from_json({"kind": "no-such-set"})
    with pytest.raises((KeyError, ValueError)):
        hspec_from_json({"kind": "no-such-h"})


def test_fantope_validation():
    with pytest.raises(ValueError):
        Fantope(0, 2)
    with pytest.raises(ValueError):
        Fantope(3, 2)
