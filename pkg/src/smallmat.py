"""
Small Dense Matrix Module for pwlrec
Exponentials, principal logarithms, commutators, drive integrals and invariants
for the small real matrices (n up to ~16) that describe switching cycles.
"""

import logging
import sys
from pathlib import Path
from typing import Any

import numpy as np
from scipy.linalg import expm, logm

# Add parent directory to path for imports
sys.path.insert(0, str(Path(__file__).resolve().parent.parent))
from config.config import Tolerances
from src.exceptions import (
    DimensionError, DomainError, NonFiniteError, NoRealPrincipalLog, SingularMatrix
)

logger = logging.getLogger(__name__)

# Dense float64 2-D array with finite entries
RealMatrix = np.ndarray


def as_matrix(M: Any, name: str = 'matrix') -> RealMatrix:
    """
    Convert input to a finite float64 2-D array.

    Args:
        M: Nested sequence or array
        name: Label used in error messages

    Returns:
        A fresh 2-D float64 array
    """
    arr = np.array(M, dtype=float)
    if arr.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteError(f"{name} contains NaN or Inf entries")
    return arr


def as_vector(v: Any, name: str = 'vector') -> np.ndarray:
    """Convert input to a finite float64 1-D array (column vectors are flattened)."""
    arr = np.array(v, dtype=float)
    if arr.ndim == 2 and 1 in arr.shape:
        arr = arr.reshape(-1)
    if arr.ndim != 1:
        raise DimensionError(f"{name} must be a vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteError(f"{name} contains NaN or Inf entries")
    return arr


def _require_square(M: RealMatrix, name: str = 'matrix') -> RealMatrix:
    M = as_matrix(M, name)
    if M.shape[0] != M.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {M.shape}")
    return M


def fro_norm(M: Any) -> float:
    """Frobenius norm."""
    return float(np.linalg.norm(np.asarray(M)))


def rel_error(approx: Any, reference: Any) -> float:
    """Relative Frobenius error ||approx - reference|| / ||reference|| (absolute when reference is 0)."""
    approx = np.asarray(approx)
    reference = np.asarray(reference)
    scale = np.linalg.norm(reference)
    diff = np.linalg.norm(approx - reference)
    return float(diff / scale) if scale > 0 else float(diff)


# =========================================================================
# EXPONENTIAL AND LOGARITHM
# =========================================================================

def mat_exp(A: Any, t: float = 1.0) -> RealMatrix:
    """
    Matrix exponential e^{A t} by scaling-and-squaring Pade.

    Args:
        A: Square matrix (1/seconds)
        t: Time in seconds

    Returns:
        e^{A t}, same shape as A
    """
    A = _require_square(A, 'A')
    if not np.isfinite(t):
        raise DomainError(f"t must be finite, got {t}")
    if A.shape[0] == 0:
        return A.copy()
    return np.asarray(expm(A * float(t)), dtype=float)


def mat_log_principal(M: Any) -> RealMatrix:
    """
    Real principal matrix logarithm.

    The eigenvalues of the result have imaginary parts in (-pi, pi). Matrices
    with an eigenvalue on the closed negative real axis have no such real
    logarithm and are rejected before any iteration runs.

    Args:
        M: Square, invertible matrix

    Returns:
        Real L with e^L = M
    """
    M = _require_square(M, 'M')
    n = M.shape[0]
    if n == 0:
        return M.copy()

    _check_nonsingular(M, 'M')

    eigenvalues = np.linalg.eigvals(M)
    scale = float(np.max(np.abs(eigenvalues)))
    tol = Tolerances.NEG_REAL_AXIS_RTOL * scale
    on_axis = (np.abs(eigenvalues.imag) <= tol) & (eigenvalues.real <= tol)
    if np.any(on_axis):
        bad = eigenvalues[on_axis]
        raise NoRealPrincipalLog(
            f"eigenvalue(s) {np.round(bad.real, 12).tolist()} on the closed negative real axis"
        )

    L, errest = logm(M, disp=False)
    logger.debug("logm error estimate %.3e for n=%d", errest, n)

    L = np.asarray(L)
    if np.iscomplexobj(L):
        imag = np.linalg.norm(L.imag)
        if imag > Tolerances.LOG_IMAG_RTOL * max(1.0, np.linalg.norm(L.real)):
            raise NoRealPrincipalLog(f"logarithm has imaginary residue {imag:.3e}")
        L = L.real
    return np.array(L, dtype=float)


# =========================================================================
# ALGEBRA
# =========================================================================

def commutator(P: Any, Q: Any) -> RealMatrix:
    """Commutator [P, Q] = PQ - QP."""
    P = _require_square(P, 'P')
    Q = _require_square(Q, 'Q')
    if P.shape != Q.shape:
        raise DimensionError(f"commutator of shapes {P.shape} and {Q.shape}")
    return P @ Q - Q @ P


def drive_integral(A: Any, B: Any, T: float) -> RealMatrix:
    """
    Drive integral Gamma = (integral of e^{A tau} over [0, T]) B.

    Uses the top-right block of exp([[A, B], [0, 0]] T), which stays exact
    when A is singular.

    Args:
        A: n x n system matrix
        B: n x p input matrix
        T: Duration in seconds (T >= 0)

    Returns:
        n x p matrix
    """
    A = _require_square(A, 'A')
    B = as_matrix(B, 'B')
    n = A.shape[0]
    if B.shape[0] != n:
        raise DimensionError(f"B has {B.shape[0]} rows, A is {n}x{n}")
    if not np.isfinite(T) or T < 0:
        raise DomainError(f"T must be finite and non-negative, got {T}")

    p = B.shape[1]
    augmented = np.zeros((n + p, n + p))
    augmented[:n, :n] = A
    augmented[:n, n:] = B
    return mat_exp(augmented, T)[:n, n:]


def trace(M: Any) -> float:
    return float(np.trace(_require_square(M, 'M')))


def det(M: Any) -> float:
    return float(np.linalg.det(_require_square(M, 'M')))


def _check_nonsingular(M: RealMatrix, name: str):
    scale = float(np.max(np.abs(M))) if M.size else 0.0
    smallest = float(np.linalg.svd(M, compute_uv=False)[-1]) if M.size else 0.0
    if scale == 0.0 or smallest < Tolerances.SINGULAR_RTOL * scale:
        raise SingularMatrix(
            f"{name} is singular (smallest singular value {smallest:.3e}, scale {scale:.3e})"
        )


def inverse(M: Any) -> RealMatrix:
    """
    Inverse of a square matrix.

    Raises SingularMatrix when the smallest singular value falls below
    1e-12 times the largest absolute entry.
    """
    M = _require_square(M, 'M')
    _check_nonsingular(M, 'M')
    return np.linalg.inv(M)


def solve(M: Any, rhs: Any) -> np.ndarray:
    """Solve M x = rhs with the same singularity rule as inverse()."""
    M = _require_square(M, 'M')
    _check_nonsingular(M, 'M')
    return np.linalg.solve(M, np.asarray(rhs, dtype=float))
