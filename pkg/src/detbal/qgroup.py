"""Numerical certificates for compact-matrix-quantum-group relations.

All checks are representation-level: a pass means the supplied block
matrix satisfies the defining relations within tolerance.  Truncations
of infinite-dimensional representations fail the strict relations on a
boundary subspace; every record therefore carries the defect projector
rank and the residual away from the defect.
"""
from __future__ import annotations

import numpy as np

from .channel import KrausSet, block, blockwise_dagger
from .equilibrium import balance_scalar, check_state, _tensor_power
from .matcore import (
    RANK_TOL,
    RESIDUAL_TOL,
    as_complex,
    dag,
    eig_projector,
    frobenius_norm,
    spectral_norm,
)
from .report import CheckRecord, RelationsReport
from .stinespring import SubproductSystem
from .channel import index_words, word_operator


def _relation_record(name: str, R: np.ndarray, tol: float) -> CheckRecord:
    res = spectral_norm(R)
    P, rank = eig_projector(R, tol)
    Pc = np.eye(R.shape[0]) - P
    return CheckRecord(
        name=name,
        residual=res,
        tolerance=tol,
        passed=bool(res < tol),
        frobenius=frobenius_norm(R),
        defect_rank=rank,
        off_defect_residual=spectral_norm(Pc @ R @ Pc),
    )


def _conjugate_matrix(W: np.ndarray, F: np.ndarray, d: int, n: int) -> np.ndarray:
    Wc = blockwise_dagger(W, d, n)
    return np.kron(np.eye(d), F) @ Wc @ np.kron(np.eye(d), np.linalg.inv(F))


def _shapes(W: np.ndarray, F: np.ndarray):
    W = as_complex(W)
    F = as_complex(F)
    n = F.shape[0]
    if F.shape != (n, n):
        raise ValueError("F must be square")
    s = np.linalg.svd(F, compute_uv=False)
    if s[-1] <= 1e-12 * s[0]:
        raise ValueError("F must be invertible")
    if W.shape[0] != W.shape[1] or W.shape[0] % n != 0:
        raise ValueError("W must be square with n x n block structure")
    return W, F, W.shape[0] // n, n


def au_relations_check(W, F, tol: float = RESIDUAL_TOL) -> RelationsReport:
    """Unitarity of W and of its F-conjugate, blockwise.

    Passing certifies the blocks of W satisfy the free-unitary defining
    relations with weight F*F at this representation.
    """
    W, F, d, n = _shapes(W, F)
    I = np.eye(d * n)
    Wc_F = _conjugate_matrix(W, F, d, n)
    checks = [
        _relation_record("W_unitary_left", dag(W) @ W - I, tol),
        _relation_record("W_unitary_right", W @ dag(W) - I, tol),
        _relation_record("conjugate_unitary_left", dag(Wc_F) @ Wc_F - I, tol),
        _relation_record("conjugate_unitary_right", Wc_F @ dag(Wc_F) - I, tol),
    ]
    return RelationsReport(
        relation="au",
        verdict=all(c.passed for c in checks),
        tolerance=tol,
        checks=checks,
        info={"d": d, "n": n},
    )


def bu_relations_check(W, F, tol: float = RESIDUAL_TOL) -> RelationsReport:
    """Self-conjugacy W = (1 (x) F) W^c (1 (x) F^-1) plus the unitarity
    battery, plus the requirement that F Fbar be scalar.
    """
    W, F, d, n = _shapes(W, F)
    rep = au_relations_check(W, F, tol)
    Wc_F = _conjugate_matrix(W, F, d, n)
    checks = list(rep.checks)
    checks.append(_relation_record("self_conjugacy", W - Wc_F, tol))
    FFc = F @ F.conj()
    lam = np.trace(FFc) / n
    if abs(lam) < 1e-14:
        scalar_res = float("inf")
    else:
        scalar_res = spectral_norm(FFc - lam * np.eye(n)) / abs(lam)
    checks.append(CheckRecord(name="F_Fc_scalar", residual=float(scalar_res),
                              tolerance=tol, passed=bool(scalar_res < tol)))
    return RelationsReport(
        relation="bu",
        verdict=all(c.passed for c in checks),
        tolerance=tol,
        checks=checks,
        info={"d": d, "n": n, "lambda": [float(lam.real), float(lam.imag)]},
    )


def invariant_state(Qv, normalize: bool = True) -> np.ndarray:
    """The canonical invariant density: transpose of trace-balanced Qv
    over its trace.

    With normalize=False the input is assumed balanced already.
    """
    Qv = as_complex(Qv)
    w = np.linalg.eigvalsh((Qv + dag(Qv)) / 2)
    if w[0] <= RANK_TOL * max(w[-1], 0.0):
        raise ValueError("Qv must be positive definite")
    B = balance_scalar(Qv) * Qv if normalize else Qv
    return check_state(B.T / np.trace(B).real)


def suq2_generators(q: float, N: int):
    """Truncated ladder representation of the q-deformed SU(2) generators.

    Returns (a, c, K, F): the N x N shift a with superdiagonal
    sqrt(1 - q^(2k)), the diagonal c = diag(q^k), the Kraus set {a, c}
    (unitality a*a + c*c = 1 holds exactly in truncation), and the
    intertwiner F = [[0, q], [-1, 0]].  The defect of the co-unitality
    relation is supported on the last basis vector with magnitude
    1 - q^(2N).
    """
    if not 0.0 < q < 1.0:
        raise ValueError("q must lie in (0, 1)")
    if N < 2:
        raise ValueError("N must be at least 2")
    a = np.zeros((N, N), dtype=complex)
    for k in range(1, N):
        a[k - 1, k] = np.sqrt(1.0 - q ** (2 * k))
    c = np.diag([q ** k for k in range(N)]).astype(complex)
    K = KrausSet([a, c])
    F = np.array([[0.0, q], [-1.0, 0.0]], dtype=complex)
    return a, c, K, F


def suq2_dilation(a: np.ndarray, c: np.ndarray, q: float) -> np.ndarray:
    """The defining 2x2 block matrix [[a, -q c], [c, a*]] of the truncated
    representation, system index major."""
    N = a.shape[0]
    W = np.zeros((2 * N, 2 * N), dtype=complex)
    R = W.reshape(N, 2, N, 2)
    R[:, 0, :, 0] = a
    R[:, 0, :, 1] = -q * c
    R[:, 1, :, 0] = c
    R[:, 1, :, 1] = dag(a)
    return W


def first_row_q_sphere(W, F, S: SubproductSystem, m: int,
                       tol: float = RESIDUAL_TOL,
                       rank_tol: float = RANK_TOL) -> RelationsReport:
    """Level-m sphere identity for the first-row blocks z_k of W.

    The weight is Q = F*F.  Both orderings are evaluated: the row form
    sum Qinv[k,j] z_j* z_k (the identity asserted for first-row
    elements) and its adjoint-side mirror sum Qinv[k,j] z_j z_k*.  The
    hypotheses Q_11 = 1 and e_1^(x)m in the level subspace are checked
    and reported rather than assumed.
    """
    W, F, d, n = _shapes(W, F)
    if n != S.n:
        raise ValueError("subproduct system size mismatch")
    Q = dag(F) @ F
    lev = S.level(m)
    p = lev.p
    e1 = np.zeros(n ** m)
    e1[0] = 1.0
    hyp_q11 = float(abs(Q[0, 0] - 1.0))
    hyp_e1 = float(np.linalg.norm(p[:, 0] - e1))
    z = [block(W, d, n, 0, k) for k in range(n)]
    Qf = _tensor_power(Q, m)
    H = p @ Qf @ p
    H = (H + dag(H)) / 2
    w, U = np.linalg.eigh(H)
    keep = w > rank_tol * max(abs(w[-1]), 1e-300)
    Qinv = (U[:, keep] * (1.0 / w[keep])) @ dag(U[:, keep])
    ws = index_words(n, m)
    zops = [word_operator(z, wd) for wd in ws]
    G_row = np.zeros((d, d), dtype=complex)
    G_mirror = np.zeros((d, d), dtype=complex)
    for a_ in range(len(ws)):
        for b in range(len(ws)):
            G_row += Qinv[b, a_] * dag(zops[a_]) @ zops[b]
            G_mirror += Qinv[b, a_] * zops[a_] @ dag(zops[b])
    I = np.eye(d)
    checks = [
        CheckRecord(name="hypothesis_Q11", residual=hyp_q11, tolerance=tol,
                    passed=bool(hyp_q11 < tol), level=m),
        CheckRecord(name="hypothesis_boundary_vector", residual=hyp_e1,
                    tolerance=tol, passed=bool(hyp_e1 < tol), level=m),
        _relation_record("row_sphere", G_row - I, tol),
        _relation_record("mirror_sphere", G_mirror - I, tol),
    ]
    for c_ in checks[2:]:
        c_.level = m
    return RelationsReport(
        relation="first_row_q_sphere",
        verdict=all(c.passed for c in checks),
        tolerance=tol,
        checks=checks,
        info={"Q_diag": [float(x) for x in np.diag(Q).real]},
    )
