"""Variational Gram functions and Ky Fan norms.

Phi_S(Y) = sup{<V, YY^T>/2 : V in S intersect PSD} and its conjugate
Phi*_S(X) = inf{tr(X^T V^+ X)/2 : V in S intersect PSD, rge X in rge V}.
The squared-gauge decomposition and the Ky Fan identity
|Y|_{2,k}^2 / 2 = Phi over the rank-k Fantope are exposed as checks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gmf import ProblemData
from .hset import (
    ConvexSetSpec,
    Fantope,
    Indicator,
    Ray,
    ShiftedPSDCap,
    Singleton,
    SpectralBox,
    TraceBall,
    psd_cap_bounded,
    psd_cap_nonempty,
    psd_cap_support,
)
from .infproj import InfProjProblem, eval_p
from .numlin import DEFAULT_TOL, Tolerances, psd_sqrt, sv


@dataclass(frozen=True)
class VgfInstance:
    """A Gram penalty Phi over n x m matrices, driven by the set."""

    set: ConvexSetSpec
    m: int
    tol: Tolerances = DEFAULT_TOL

    def __post_init__(self):
        if not psd_cap_nonempty(self.set, self.tol):
            raise ValueError("the set must meet the PSD cone")

    @property
    def n(self) -> int:
        return self.set.n


@dataclass(frozen=True)
class KyFanParams:
    """(p, k) norm parameters; p may be inf."""

    p: float
    k: int

    def __post_init__(self):
        if self.p < 1:
            raise ValueError("need p >= 1")
        if self.k < 1:
            raise ValueError("need k >= 1")


def _check_Y(inst: VgfInstance, Y) -> np.ndarray:
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    if Y.shape != (inst.n, inst.m):
        raise ValueError(f"expected {inst.n}x{inst.m}, got {Y.shape}")
    return Y


def vgf_eval(inst: VgfInstance, Y: np.ndarray):
    """Phi(Y) with the maximizing V.  Returns (value, V)."""
    Y = _check_Y(inst, Y)
    val, V = psd_cap_support(inst.set, Y @ Y.T, inst.tol)
    return (0.5 * val if np.isfinite(val) else np.inf), V


def vgf_conj(inst: VgfInstance, X: np.ndarray, max_iter: int = 4000):
    """Phi*(X) by minimizing the matrix-fractional term over the set.

    Returns (value, V); +inf when no feasible V covers the range of X."""
    X = _check_Y(inst, X)
    pd = ProblemData(np.zeros((1, inst.n)), np.zeros((1, inst.m)), inst.tol)
    prob = InfProjProblem(pd, Indicator(inst.set))
    pe = eval_p(prob, X, inst.tol, max_iter=max_iter)
    if pe.status == "infeasible":
        return np.inf, None
    if pe.status != "finite":
        raise RuntimeError(f"unexpected conjugate status {pe.status}")
    return pe.value, pe.V


def vgf_subdiff(inst: VgfInstance, Y: np.ndarray):
    """A subgradient X = V Y of Phi at Y (V the support maximizer), with
    its Fenchel gap Phi(Y) + Phi*(X) - <X, Y>.

    The gap uses the feasible upper bound Phi*(X) <= tr(X^T V^+ X)/2,
    tight at the support maximizer.  Returns (X, V, gap)."""
    if not psd_cap_bounded(inst.set, inst.tol):
        raise ValueError(
            "subdifferential witness requires a bounded PSD slice; "
            "unbounded slices can make the subdifferential empty"
        )
    Y = _check_Y(inst, Y)
    phi, V = vgf_eval(inst, Y)
    if not np.isfinite(phi):
        raise ValueError("Y outside dom Phi")
    X = V @ Y
    conj_ub = 0.5 * float(np.sum(X * (np.linalg.pinv(V, rcond=inst.tol.rank_rel) @ X)))
    gap = phi + conj_ub - float(np.sum(X * Y))
    return X, V, gap


def gauge_factor_sup(inst: VgfInstance, Y: np.ndarray) -> float:
    """sigma_F(Y) = sup{|L^T Y|_F : L L^T in the PSD slice of the set},
    the support radius of the factor set behind Phi."""
    Y = _check_Y(inst, Y)
    val, _ = psd_cap_support(inst.set, Y @ Y.T, inst.tol)
    if not np.isfinite(val):
        return np.inf
    return float(np.sqrt(max(val, 0.0)))


def vgf_gauge_decomp(inst: VgfInstance, Y: np.ndarray):
    """Squared-gauge decomposition Phi(Y) = sigma_F(Y)^2 / 2.

    Returns (sigma_F value, consistent flag) plus per-variant closed
    forms in the detail dict."""
    Y = _check_Y(inst, Y)
    S = inst.set
    generic = gauge_factor_sup(inst, Y)
    closed = None
    if isinstance(S, SpectralBox) and S.lo <= 0.0 <= S.hi:
        closed = float(np.sqrt(S.hi) * np.linalg.norm(Y))
    elif isinstance(S, TraceBall):
        s = sv(Y)
        closed = float(np.sqrt(S.r) * (s[0] if s.size else 0.0))
    elif isinstance(S, Fantope):
        closed = kyfan_norm(KyFanParams(2.0, S.k), Y)
    elif isinstance(S, Singleton):
        closed = float(np.linalg.norm(psd_sqrt(S.U) @ Y))
    elif isinstance(S, ShiftedPSDCap):
        R = psd_sqrt(S.U)
        lam = np.clip(np.linalg.eigvalsh(R @ Y @ Y.T @ R), 0.0, None)
        closed = float(np.sqrt(np.sum(lam)))
    phi, _ = vgf_eval(inst, Y)
    if np.isfinite(phi):
        consistent = abs(phi - 0.5 * generic**2) <= inst.tol.conj_rel * (1.0 + abs(phi))
    else:
        consistent = not np.isfinite(generic)
    detail = {"sup_frobenius": generic, "closed_form": closed, "phi": phi}
    if closed is not None and np.isfinite(generic):
        consistent = consistent and abs(generic - closed) <= inst.tol.conj_rel * (
            1.0 + abs(closed)
        )
    return generic, consistent, detail


def kyfan_norm(params: KyFanParams, X: np.ndarray) -> float:
    """(sum of the p-th powers of the k largest singular values)^(1/p)."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if params.k > min(X.shape):
        raise ValueError("need k <= min(n, m)")
    s = sv(X)[: params.k]
    if np.isinf(params.p):
        return float(s[0]) if s.size else 0.0
    return float(np.sum(s**params.p) ** (1.0 / params.p))


def kyfan_vgf_identity(params: KyFanParams, X: np.ndarray, tol: Tolerances = DEFAULT_TOL):
    """Check |X|_{2,k}^2 / 2 against Phi over the rank-k Fantope.

    Requires p = 2.  Returns (lhs, rhs, ok)."""
    if params.p != 2:
        raise ValueError("identity holds for p = 2")
    X = np.atleast_2d(np.asarray(X, dtype=float))
    lhs = 0.5 * kyfan_norm(params, X) ** 2
    inst = VgfInstance(Fantope(params.k, X.shape[0]), X.shape[1], tol)
    rhs, _ = vgf_eval(inst, X)
    ok = abs(lhs - rhs) <= 1e-8 * (1.0 + abs(lhs))
    return lhs, rhs, ok
