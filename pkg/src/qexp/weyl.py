"""Exact N-dimensional phase algebra: clock, shift and quotient-phase
matrices with their three eigenbases and all overlap identities.

The shift matrix is the cyclic completion of the superdiagonal form (a bare
superdiagonal is nilpotent, hence not unitary, while the phase operators here
must be unitary with all N-th roots of unity as eigenvalues).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .gamma import GroupParams
from .gauss import phase_chirp_sum


def phase_R(p: GroupParams) -> np.ndarray:
    """Clock matrix diag(1, q, q^2, ..., q^(N-1))."""
    return np.diag([p.q_pow(k) for k in range(p.N)])


def phase_S(p: GroupParams) -> np.ndarray:
    """Cyclic shift with ones on the superdiagonal and in the lower-left
    corner; sends e_j to e_(j-1) so that (phase_S)(phase_R) = q (phase_R)(phase_S)."""
    S = np.zeros((p.N, p.N), dtype=complex)
    for i in range(p.N):
        S[i, (i + 1) % p.N] = 1.0
    return S


def phase_T(p: GroupParams) -> np.ndarray:
    """q^(-1/2) (phase_S)* (phase_R) with the principal root q^(1/2) = e^(i pi/N)."""
    return p.q_half_pow(-1) * phase_S(p).conj().T @ phase_R(p)


def basis_vectors(p: GroupParams) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Columns of the returned matrices are the three eigenbases:

    e_k  standard basis (eigenvectors of phase_R, eigenvalue q^k),
    f_l  with (f_l)_j = q^(j l)/sqrt(N) (eigenvectors of phase_S, eigenvalue q^l),
    g_m  with (g_m)_p = q^((p^2 - 2p(m+1))/2)/sqrt(N) (eigenvectors of phase_T).
    """
    N = p.N
    E = np.eye(N, dtype=complex)
    j = np.arange(N)
    F = np.array([[p.q_pow(jj * ll) for ll in j] for jj in j]) / math.sqrt(N)
    G = np.array(
        [[p.q_half_pow(pp * pp - 2 * pp * (mm + 1)) for mm in j] for pp in j]
    ) / math.sqrt(N)
    return E, F, G


def phase_T_eigenvalues(p: GroupParams) -> np.ndarray:
    """Eigenvalues of phase_T on the g basis.  With the conventions above the
    eigenvalue on g_m comes out exactly q^m, with no extra global phase."""
    T = phase_T(p)
    _, _, G = basis_vectors(p)
    lams = np.empty(p.N, dtype=complex)
    for m in range(p.N):
        v = G[:, m]
        w = T @ v
        lams[m] = np.vdot(v, w)
    return lams


@dataclass
class OverlapReport:
    """Max residuals of the finite overlap identities."""

    N: int
    residuals: dict = field(default_factory=dict)

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values())


def overlap_identities_report(p: GroupParams) -> OverlapReport:
    """Verify, entrywise over all indices:

    (a) <e_k|f_l> = q^(k l)/sqrt(N),
    (b) <e_k|g_m> = q^((k^2 - 2k(m+1))/2)/sqrt(N),
    (c) sum_p q^(p(alpha - p/2)) = sqrt(N) e^(-i pi/4) e^(i pi alpha^2/N)
        for alpha = m + n + 1,
    (d) the f/g cross Gram has constant modulus 1/sqrt(N),

    plus orthonormality of each family and the exact Weyl relation.
    """
    N = p.N
    E, F, G = basis_vectors(p)
    eye = np.eye(N)

    ef = np.array([[np.vdot(E[:, k], F[:, l]) for l in range(N)] for k in range(N)])
    ef_target = np.array([[p.q_pow(k * l) for l in range(N)] for k in range(N)]) / math.sqrt(N)

    eg = np.array([[np.vdot(E[:, k], G[:, m]) for m in range(N)] for k in range(N)])
    eg_target = np.array(
        [[p.q_half_pow(k * k - 2 * k * (m + 1)) for m in range(N)] for k in range(N)]
    ) / math.sqrt(N)

    chirp = 0.0
    for alpha in range(1, 2 * N):
        direct, closed = phase_chirp_sum(alpha, N)
        chirp = max(chirp, abs(direct - closed))

    fg = F.conj().T @ G
    fg_modulus = np.max(np.abs(np.abs(fg) - 1.0 / math.sqrt(N)))

    R, S = phase_R(p), phase_S(p)
    report = OverlapReport(N=N)
    report.residuals = {
        "ef_overlap": float(np.max(np.abs(ef - ef_target))),
        "eg_overlap": float(np.max(np.abs(eg - eg_target))),
        "chirp_closed_form": float(chirp),
        "fg_constant_modulus": float(fg_modulus),
        "gram_e": float(np.max(np.abs(E.conj().T @ E - eye))),
        "gram_f": float(np.max(np.abs(F.conj().T @ F - eye))),
        "gram_g": float(np.max(np.abs(G.conj().T @ G - eye))),
        "weyl_relation": float(np.max(np.abs(S @ R - p.q * R @ S))),
    }
    return report


def is_unitary(A: np.ndarray, tol: float = 1e-13) -> bool:
    n = A.shape[0]
    return bool(np.max(np.abs(A.conj().T @ A - np.eye(n))) <= tol)


def check_unit_vector(v: np.ndarray, tol: float = 1e-13) -> None:
    if abs(np.linalg.norm(v) - 1.0) > tol:
        raise DomainError("vector is not unit-normalized")
