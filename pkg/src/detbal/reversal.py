"""Sphere-condition checks, time-reversed channels, Crooks duals, the
detailed-balance verdict pipeline and the classical Markov baseline.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .channel import (
    KrausSet,
    blockwise_dagger,
    channel_distance,
    dilation_from_kraus,
    index_words,
    kraus_from_dilation,
    word_operator,
)
from .equilibrium import (
    CorrelationData,
    _qm_function,
    _require_compat,
    check_phi_symmetric,
    check_state,
    kms_condition_residual,
    orthogonalize_kraus,
    zero_mean_check,
)
from .errors import HypothesisFailure
from .matcore import (
    RANK_TOL,
    RESIDUAL_TOL,
    as_complex,
    dag,
    eig_projector,
    spectral_norm,
)
from .report import AnalysisReport, CheckRecord
from .stinespring import SubproductSystem, build_subproduct


def q_sphere_residual(K: KrausSet, Qd: CorrelationData, S: SubproductSystem,
                      m: int, tol: float = RESIDUAL_TOL,
                      rank_tol: float = RANK_TOL):
    """Deviation of the level-m weighted word sum from the identity.

    Evaluates sum over word pairs of Qinv[k,j] K_j K_k* minus 1, where
    Qinv inverts Q^(x)m on the level subspace.  Returns the spectral
    norm together with the projector onto the defect eigenspace, which
    localizes boundary effects of truncated representations.
    """
    _require_compat(Qd, S, m, tol)
    Qinv = _qm_function(Qd, S, m, lambda w: 1.0 / w, rank_tol)
    ws = index_words(K.n, m)
    ops = [word_operator(K.ops, w) for w in ws]
    Sm = np.zeros((K.d, K.d), dtype=complex)
    for a in range(len(ws)):
        for b in range(len(ws)):
            Sm += Qinv[b, a] * ops[a] @ dag(ops[b])
    R = Sm - np.eye(K.d)
    P, _ = eig_projector(R, tol)
    return spectral_norm(R), P


def reversed_unitary(W: np.ndarray, F: np.ndarray, d: int, n: int,
                     tol: float = 1e-6):
    """Conjugate dilation (1 (x) F) W^c (1 (x) F^-1) and its unitarity residual.

    W^c takes every block to its own adjoint.  No error is raised when
    the result fails to be unitary; the residual is the diagnostic.
    """
    W = as_complex(W)
    F = as_complex(F)
    if W.shape != (d * n, d * n) or F.shape != (n, n):
        raise ValueError("shape mismatch")
    s = np.linalg.svd(F, compute_uv=False)
    if s[-1] <= 1e-12 * s[0]:
        raise ValueError("F must be invertible")
    if spectral_norm(dag(W) @ W - np.eye(d * n)) > tol:
        raise ValueError("W must be unitary")
    Wc = blockwise_dagger(W, d, n)
    Wbar = np.kron(np.eye(d), F) @ Wc @ np.kron(np.eye(d), np.linalg.inv(F))
    res = spectral_norm(dag(Wbar) @ Wbar - np.eye(d * n))
    return Wbar, res


def reversed_kraus(K: KrausSet, Qd: CorrelationData) -> KrausSet:
    """Entrywise time reversal Kbar_k = Q_kk^{-1/2} K_k*.

    Requires diagonal Q in first-entry normalization.  The output is a
    channel exactly when the level-1 sphere condition holds; otherwise
    it is a general operation (callers classify).
    """
    if Qd.normalization != "first_entry":
        raise ValueError("reversed_kraus requires first-entry normalization")
    if not Qd.is_diagonal():
        raise ValueError("reversed_kraus requires diagonal Q; orthogonalize first")
    qkk = np.diag(Qd.Q).real
    return KrausSet([dag(Kk) / np.sqrt(qkk[k]) for k, Kk in enumerate(K)])


def crooks_dual(K: KrausSet, rho0, rank_tol: float = RANK_TOL) -> KrausSet:
    """The state-dual set rho0^{1/2} K_j* rho0^{-1/2}.

    rho0 must be invertible here, unlike the entrywise reversal.
    """
    rho0 = check_state(rho0)
    w, U = np.linalg.eigh((rho0 + dag(rho0)) / 2)
    if w[0] <= rank_tol * w[-1]:
        raise ValueError("crooks_dual requires an invertible state")
    rh = (U * np.sqrt(w)) @ dag(U)
    rih = (U * (1.0 / np.sqrt(w))) @ dag(U)
    return KrausSet([rh @ dag(Kj) @ rih for Kj in K])


def crooks_check(K: KrausSet, Kbar: KrausSet, rho0, m: int) -> float:
    """Max mismatch of forward and reversed word probabilities up to length m.

    Compares Tr(rho0 Kbar_w~* Kbar_w~) with Tr(rho0 K_w* K_w), where w~
    is w read backwards.
    """
    if K.n != Kbar.n or K.d != Kbar.d:
        raise ValueError("Kraus sets must share shape")
    rho0 = check_state(rho0)
    mx = 0.0
    for mp in range(1, m + 1):
        for w in index_words(K.n, mp):
            A = word_operator(K.ops, w)
            B = word_operator(Kbar.ops, tuple(reversed(w)))
            mx = max(mx, abs(np.trace(rho0 @ dag(B) @ B) - np.trace(rho0 @ dag(A) @ A)))
    return float(mx)


class TRInvariance(NamedTuple):
    invariant: bool
    distance: float
    unitarity_residual: float


def time_reversal_invariance(K: KrausSet, F: np.ndarray,
                             tol: float = RESIDUAL_TOL) -> TRInvariance:
    """Check whether the F-reversed channel coincides with the original.

    Builds the deterministic dilation, conjugates it, and when the
    conjugate is unitary compares the reversed channel with the input at
    the Choi level.  A nonunitary conjugate yields a false verdict with
    the unitarity residual as the reason.
    """
    _, W = dilation_from_kraus(K)
    Wbar, ures = reversed_unitary(W, F, K.d, K.n)
    if ures > tol:
        return TRInvariance(False, float("nan"), ures)
    try:
        Kbar = kraus_from_dilation(Wbar, K.d, K.n, "first_column")
    except ValueError:
        return TRInvariance(False, float("nan"), ures)
    dist = channel_distance(K, Kbar)
    return TRInvariance(dist < tol, dist, ures)


# ---------------------------------------------------------------------------
# verdict pipeline


def detailed_balance_verdict(K: KrausSet, rho0, M: int = 2,
                             tol: float = RESIDUAL_TOL,
                             rank_tol: float = RANK_TOL) -> AnalysisReport:
    """Full detailed-balance analysis of a channel with respect to rho0.

    Orthogonalizes the Kraus set, records the correlation matrix in all
    three normalizations, builds the subproduct system to level M, and
    runs the compatibility, symmetric-correlation, sphere and KMS checks
    at every level with the trace-balanced Q.  The verdict is true iff
    every residual is below tol and no hypothesis fails; a false verdict
    names the sphere condition whenever that stage is implicated.
    """
    rho0 = check_state(rho0)
    if K.unital_residual >= tol:
        raise ValueError("detailed balance verdict requires a channel")
    Kp, Qraw, lambdas = orthogonalize_kraus(K, rho0)
    means = zero_mean_check(Kp, rho0)
    Qtb = Qraw.with_normalization("trace_balanced")
    Qfe = Qraw.with_normalization("first_entry")
    S = build_subproduct(Kp, M, rank_tol)
    Qtb.attach_levels(S)

    checks: list[CheckRecord] = []
    hypothesis_failures: list[str] = []

    def run(name, m, fn, **extra):
        try:
            res = fn()
        except HypothesisFailure as exc:
            checks.append(CheckRecord(name=name, residual=None, tolerance=tol,
                                      passed=False, level=m,
                                      hypothesis_failure=str(exc)))
            hypothesis_failures.append(f"{name}[m={m}]: {exc}")
            return None
        rec = CheckRecord(name=name, residual=float(res), tolerance=tol,
                          passed=bool(res < tol), level=m, **extra)
        checks.append(rec)
        return rec

    for m in range(1, M + 1):
        compat = Qtb.compat_residuals[m]
        checks.append(CheckRecord(name="q_compatibility", residual=float(compat),
                                  tolerance=tol, passed=bool(compat < tol), level=m))
        run("phi_symmetric_normal", m,
            lambda m=m: check_phi_symmetric(Kp, rho0, Qtb, S, m, "normal", tol))
        run("phi_symmetric_antinormal", m,
            lambda m=m: check_phi_symmetric(Kp, rho0, Qtb, S, m, "antinormal", tol))

        def sphere(m=m):
            res, P = q_sphere_residual(Kp, Qtb, S, m, tol, rank_tol)
            sphere.rank = int(round(np.trace(P).real))
            return res

        rec = run("q_sphere", m, sphere)
        if rec is not None:
            rec.defect_rank = sphere.rank

    run("kms_condition", M,
        lambda: kms_condition_residual(Kp, rho0, Qtb, S, M, tol))

    verdict = all(c.passed for c in checks)
    reason = None
    if not verdict:
        failed = [c for c in checks if not c.passed]
        if any(c.name == "q_sphere" for c in failed):
            reason = "q_sphere"
        else:
            reason = failed[0].name

    return AnalysisReport(
        verdict=verdict,
        reason=reason,
        residual_tol=tol,
        rank_tol=rank_tol,
        max_level=M,
        checks=checks,
        info={
            "lambdas": [float(x) for x in lambdas],
            "Q_raw_diag": [float(x) for x in np.diag(Qraw.Q).real],
            "Q_trace_balanced_diag": [float(x) for x in np.diag(Qtb.Q).real],
            "Q_first_entry_diag": [float(x) for x in np.diag(Qfe.Q).real],
            "zero_means": means,
            "level_ranks": {m: S.level(m).rank for m in range(1, M + 1)},
            "hypothesis_failures": hypothesis_failures,
        },
    )


# ---------------------------------------------------------------------------
# classical baseline


class ClassicalChain:
    """Column-stochastic transition matrix with a positive stationary vector.

    Entry (j, k) is the probability of moving from state k to state j.
    When pi is omitted it is computed from the unit eigenvalue.
    """

    def __init__(self, M, pi=None, tol: float = 1e-9):
        M = np.asarray(M, dtype=float)
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise ValueError("transition matrix must be square")
        if np.any(M < -tol):
            raise ValueError("negative transition probability")
        if np.max(np.abs(M.sum(axis=0) - 1.0)) > tol:
            raise ValueError("columns must sum to one")
        if pi is None:
            w, v = np.linalg.eig(M)
            idx = int(np.argmin(np.abs(w - 1.0)))
            pi = np.real(v[:, idx])
            pi = pi / pi.sum()
        pi = np.asarray(pi, dtype=float)
        if np.any(pi <= 0):
            raise ValueError("stationary vector must be entrywise positive")
        if abs(pi.sum() - 1.0) > tol:
            raise ValueError("stationary vector must sum to one")
        if np.max(np.abs(M @ pi - pi)) > max(tol, 1e-8):
            raise ValueError("pi is not stationary for M")
        self.M = M
        self.pi = pi
        self.n = M.shape[0]


def classical_reverse(C: ClassicalChain, tol: float = 1e-10):
    """Time-reversed chain, detailed-balance verdict and residual.

    The reversed matrix diag(pi) M^T diag(pi)^-1 is column-stochastic
    with the same stationary vector; the chain is reversible iff it
    equals M, equivalently iff M_jk pi_k is symmetric.
    """
    Mhat = np.diag(C.pi) @ C.M.T @ np.diag(1.0 / C.pi)
    flux = C.M * C.pi[np.newaxis, :]
    residual = float(np.max(np.abs(flux - flux.T)))
    db = bool(np.max(np.abs(Mhat - C.M)) < tol)
    return Mhat, db, residual
