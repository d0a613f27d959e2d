"""Quantum Fisher information of the detuning, the optimal projective
measurement from the symmetric logarithmic derivative (SLD), and classical
Fisher information of explicit projective measurements.

F_Q = sum over eigenpairs (j, k) of rho with lambda_j + lambda_k > 1e-12 of
2 |<j| drho |k>|^2 / (lambda_j + lambda_k). The eigenvalue cutoff is
load-bearing: dephased states are generically rank-deficient and the cutoff
restricts the sum to the supported subspace. The SLD eigenbasis is the
projective measurement whose classical Fisher information attains F_Q; the
precision of any measurement and estimator over nu = T/t repetitions is
bounded below by 1/sqrt(nu * F_Q).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import NoInformationError, SingularOutcomeError
from .qstate import DensityMatrix

__all__ = [
    "EIG_CUTOFF",
    "QfiResult",
    "qfi",
    "qfi_value",
    "qfi_uncertainty",
    "classical_fi",
    "basis_projectors",
]

EIG_CUTOFF = 1e-12

_P_FLOOR = 1e-15
_DP_FLOOR = 1e-12
_HERM_TOL = 1e-9


@dataclass(frozen=True)
class QfiResult:
    """Quantum Fisher information with the optimal measurement basis.

    ``sld_eigenbasis`` is unitary; its columns define the rank-one orthogonal
    projectors of the optimal measurement. ``classical_fi_check`` is the
    classical Fisher information of exactly that measurement.
    """

    qfi: float
    sld_eigenbasis: np.ndarray
    classical_fi_check: float


def _check_derivative(drho: np.ndarray, d: int) -> np.ndarray:
    drho = np.asarray(drho, dtype=complex)
    if drho.shape != (d, d):
        raise ValueError(f"derivative matrix must be {d}x{d}, got shape {drho.shape}")
    scale = max(1.0, float(np.abs(drho).max()))
    if np.abs(drho - drho.conj().T).max() > _HERM_TOL * scale:
        raise ValueError("derivative matrix is not Hermitian")
    if abs(complex(np.trace(drho))) > _HERM_TOL * scale:
        raise ValueError("derivative matrix is not traceless")
    return drho


def _canonical_phases(basis: np.ndarray) -> np.ndarray:
    """Fix each column's global phase so its first significant entry is real
    and positive, making reported bases reproducible across runs."""
    out = basis.copy()
    for m in range(out.shape[1]):
        col = out[:, m]
        nz = np.flatnonzero(np.abs(col) > 1e-12)
        if nz.size:
            pivot = col[nz[0]]
            out[:, m] = col * (abs(pivot) / pivot)
    return out


def _fisher_sum(probs: np.ndarray, dprobs: np.ndarray) -> float:
    total = 0.0
    for p, dp in zip(probs, dprobs):
        if p < _P_FLOOR:
            if abs(dp) < _DP_FLOOR:
                continue
            raise SingularOutcomeError(
                f"outcome probability {p:.3g} vanishes while its derivative {dp:.3g} does not"
            )
        total += dp * dp / p
    return total


def qfi_value(rho: DensityMatrix, drho: np.ndarray) -> float:
    """Quantum Fisher information alone (no SLD basis); fast path for optimizers."""
    drho = _check_derivative(drho, rho.dim)
    lam, vecs = np.linalg.eigh(rho.elems)
    dmat = vecs.conj().T @ drho @ vecs
    denom = lam[:, None] + lam[None, :]
    mask = denom > EIG_CUTOFF
    terms = 2.0 * np.abs(dmat) ** 2 / np.where(mask, denom, 1.0)
    return float(terms[mask].sum())


def qfi(rho: DensityMatrix, drho: np.ndarray) -> QfiResult:
    """Quantum Fisher information, SLD eigenbasis, and its classical check."""
    drho = _check_derivative(drho, rho.dim)
    lam, vecs = np.linalg.eigh(rho.elems)
    dmat = vecs.conj().T @ drho @ vecs
    denom = lam[:, None] + lam[None, :]
    mask = denom > EIG_CUTOFF
    terms = 2.0 * np.abs(dmat) ** 2 / np.where(mask, denom, 1.0)
    fq = float(terms[mask].sum())

    sld_in_eigbasis = np.where(mask, 2.0 * dmat / np.where(mask, denom, 1.0), 0.0)
    sld = vecs @ sld_in_eigbasis @ vecs.conj().T
    _, sld_vecs = np.linalg.eigh(sld)
    basis = _canonical_phases(sld_vecs)

    probs = np.einsum("im,ij,jm->m", basis.conj(), rho.elems, basis).real
    dprobs = np.einsum("im,ij,jm->m", basis.conj(), drho, basis).real
    return QfiResult(qfi=fq, sld_eigenbasis=basis, classical_fi_check=_fisher_sum(probs, dprobs))


def qfi_uncertainty(qfi_per_shot: float, total_time: float, shot_time: float) -> float:
    """Optimal-measurement precision bound 1/sqrt((T/t) * F_Q)."""
    if not (total_time > 0.0 and shot_time > 0.0):
        raise ValueError("total_time and shot_time must be > 0")
    if total_time < shot_time:
        raise ValueError(f"total time {total_time} smaller than shot time {shot_time}")
    if qfi_per_shot < 1e-30:
        raise NoInformationError("state carries no information about the detuning")
    return 1.0 / math.sqrt((total_time / shot_time) * qfi_per_shot)


def basis_projectors(basis: np.ndarray):
    """Rank-one projectors onto the columns of an orthonormal basis matrix."""
    return [np.outer(basis[:, m], basis[:, m].conj()) for m in range(basis.shape[1])]


def classical_fi(rho: DensityMatrix, drho: np.ndarray, projectors) -> float:
    """Classical Fisher information sum_m (dp_m)^2 / p_m of a projective
    measurement, with p_m = Tr(Pi_m rho) and dp_m = Tr(Pi_m drho).

    Outcomes with p_m < 1e-15 are skipped when |dp_m| < 1e-12 and rejected
    otherwise.
    """
    drho = _check_derivative(drho, rho.dim)
    projectors = [np.asarray(p, dtype=complex) for p in projectors]
    if not projectors:
        raise ValueError("projector set is empty")
    total = sum(projectors)
    if np.abs(total - np.eye(rho.dim)).max() > 1e-10:
        raise ValueError("projector set is incomplete (does not sum to the identity)")
    probs = np.array([float(np.trace(p @ rho.elems).real) for p in projectors])
    dprobs = np.array([float(np.trace(p @ drho).real) for p in projectors])
    return _fisher_sum(probs, dprobs)
