"""Independent concurrence references used to validate the protocol output.

Three routes of increasing generality: the closed form for the standard
four-amplitude decomposition, the spin-flip overlap for an arbitrary pure
two-qubit vector, and the mixed-state formula built on the eigenvalues of
``rho rho_tilde``.  None of them touch the protocol machinery, so agreement
between a protocol estimate and these numbers is meaningful evidence.
"""

from __future__ import annotations

import numpy as np

from .errors import NumericalFailureError
from .protocol import TwoPhotonState

SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]])
SIGMA_YY = np.kron(SIGMA_Y, SIGMA_Y)

_HERMITIAN_TOL = 1e-10
_TRACE_TOL = 1e-10
_EIGVAL_FLOOR = -1e-9
_IMAG_TOL = 1e-8


def concurrence_pure(state: TwoPhotonState) -> float:
    """Concurrence 2|alpha delta - beta gamma_c| of a pure two-photon state."""
    value = 2.0 * abs(state.alpha * state.delta - state.beta * state.gamma_c)
    return min(1.0, value)


def concurrence_pure_general(psi) -> float:
    """Spin-flip concurrence |psi^T (sigma_y x sigma_y) psi| of a pure 4-vector.

    The vector is ordered |00>, |01>, |10>, |11> with the first qubit in the
    leading slot, and must be normalized to within 1e-10.
    """
    vec = np.asarray(psi, dtype=complex).reshape(-1)
    if vec.shape != (4,):
        raise ValueError(f"expected 4 amplitudes, got shape {np.shape(psi)}")
    if abs(np.linalg.norm(vec) - 1.0) > _HERMITIAN_TOL:
        raise ValueError("pure-state vector must be normalized")
    return min(1.0, float(abs(vec @ (SIGMA_YY @ vec))))


def validate_density_matrix(rho) -> np.ndarray:
    """Check shape, Hermiticity, unit trace and positivity; return as array."""
    mat = np.asarray(rho, dtype=complex)
    if mat.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got shape {mat.shape}")
    if not np.all(np.isfinite(mat)):
        raise ValueError("density matrix entries must be finite")
    if np.max(np.abs(mat - mat.conj().T)) > _HERMITIAN_TOL:
        raise ValueError("density matrix is not Hermitian to within 1e-10")
    if abs(np.trace(mat).real - 1.0) > _TRACE_TOL or abs(np.trace(mat).imag) > _TRACE_TOL:
        raise ValueError(f"density matrix trace is {np.trace(mat)!r}, expected 1")
    if float(np.min(np.linalg.eigvalsh(mat))) < _EIGVAL_FLOOR:
        raise ValueError("density matrix has a negative eigenvalue beyond tolerance")
    return mat


def spin_flip(rho) -> np.ndarray:
    """The spin-flipped matrix (sigma_y x sigma_y) rho* (sigma_y x sigma_y)."""
    mat = validate_density_matrix(rho)
    return SIGMA_YY @ mat.conj() @ SIGMA_YY


def eigenvalues_4x4(matrix) -> np.ndarray:
    """Eigenvalues of a general complex 4x4 matrix.

    Hessenberg reduction followed by the shifted QR iteration, as provided
    by LAPACK.  Convergence failures surface as NumericalFailureError.
    """
    mat = np.asarray(matrix, dtype=complex)
    if mat.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got shape {mat.shape}")
    if not np.all(np.isfinite(mat)):
        raise ValueError("matrix entries must be finite")
    try:
        return np.linalg.eigvals(mat)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailureError(f"eigenvalue iteration failed: {exc}") from exc


def concurrence_mixed(rho) -> float:
    """Concurrence of an arbitrary two-qubit density matrix.

    Computes the eigenvalues of ``rho rho_tilde``, takes their square roots
    in decreasing order and returns ``max(0, l1 - l2 - l3 - l4)``.  The
    eigenvalues are mathematically real and non-negative; imaginary parts
    above 1e-8 or negative parts beyond round-off indicate a numerical
    failure rather than a physical input, and raise.
    """
    mat = validate_density_matrix(rho)
    flipped = SIGMA_YY @ mat.conj() @ SIGMA_YY
    evals = eigenvalues_4x4(mat @ flipped)
    if float(np.max(np.abs(evals.imag))) > _IMAG_TOL:
        raise NumericalFailureError(
            f"eigenvalues of rho rho_tilde are not real: {evals!r}"
        )
    real_parts = evals.real
    if float(np.min(real_parts)) < _EIGVAL_FLOOR:
        raise NumericalFailureError(
            f"eigenvalues of rho rho_tilde are negative: {evals!r}"
        )
    # Exact zeros of rho rho_tilde come back as round-off noise (~1e-16);
    # their square roots (~1e-8) would visibly pollute the eigenvalue sum,
    # so anything at noise scale relative to the largest eigenvalue is
    # treated as zero before taking roots.
    floor = 1e-12 * float(np.max(real_parts, initial=0.0))
    roots = np.sqrt(np.where(real_parts < floor, 0.0, real_parts))
    roots = np.sort(roots)[::-1]
    value = roots[0] - roots[1] - roots[2] - roots[3]
    return max(0.0, min(1.0, float(value)))


def density_from_pure(psi) -> np.ndarray:
    """Rank-one density matrix |psi><psi| of a normalized 4-vector."""
    vec = np.asarray(psi, dtype=complex).reshape(-1)
    if vec.shape != (4,):
        raise ValueError(f"expected 4 amplitudes, got shape {np.shape(psi)}")
    if abs(np.linalg.norm(vec) - 1.0) > _HERMITIAN_TOL:
        raise ValueError("pure-state vector must be normalized")
    return np.outer(vec, vec.conj())
