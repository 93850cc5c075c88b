"""
Two-by-Two Module for pwlrec
Closed-form spectral shortcuts for sign-symmetric 2x2 maps Phi = D_r e^Omega
and the minimal real lift that gives maps with a negative eigenvalue a real
logarithm.

Everything except real_lift_log works from traces, determinants and scalar
exp/sinh/cosh/sin/cos/sqrt; no eigensolver or matrix logarithm is called.
"""

import logging
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Tuple

import numpy as np

# Add parent directory to path for imports
sys.path.insert(0, str(Path(__file__).resolve().parent.parent))
from config.config import Tolerances
from src.exceptions import ComplexEigenvalues, DimensionError, DomainError, NotLiftable
from src.smallmat import RealMatrix, as_matrix

logger = logging.getLogger(__name__)

# Fixed sign matrix of the map structure
D_R = np.diag([-1.0, 1.0])


@dataclass(frozen=True, eq=False)
class SignSymmetricMap:
    """Map Phi = D_r e^Omega with D_r = diag(-1, 1); det(Phi) < 0 always."""
    Omega: RealMatrix  # 2x2, generator x duration
    Ts: float = 1.0

    def __post_init__(self):
        Omega = _as_2x2(self.Omega, 'Omega')
        if not (np.isfinite(self.Ts) and self.Ts > 0):
            raise DomainError(f"Ts must be positive, got {self.Ts}")
        object.__setattr__(self, 'Omega', Omega)

    @property
    def generator(self) -> RealMatrix:
        """Omega / Ts, the rate whose flow over one period gives e^Omega."""
        return self.Omega / self.Ts

    @property
    def Phi(self) -> RealMatrix:
        return D_R @ exp2x2_closed(self.Omega)


@dataclass(frozen=True)
class EigenPair:
    """
    Real eigenvalue pair of a 2x2 matrix, larger root first.

    For sign-symmetric maps lambda_plus > 0 > lambda_minus.
    """
    lambda_plus: float
    lambda_minus: float

    @property
    def straddles_zero(self) -> bool:
        return self.lambda_plus > 0.0 > self.lambda_minus


@dataclass(frozen=True, eq=False)
class RealLift:
    """Real logarithm of blkdiag(Phi, lambda_-) divided by Ts."""
    A_c: RealMatrix  # 3x3
    embed_state: RealMatrix  # 3x2, appends a zero coordinate
    project_state: RealMatrix  # 2x3, drops it
    S_ext: RealMatrix  # blkdiag(Phi, lambda_-)
    eigenpair: EigenPair


def _as_2x2(M: Any, name: str) -> RealMatrix:
    M = as_matrix(M, name)
    if M.shape != (2, 2):
        raise DimensionError(f"{name} must be 2x2, got shape {M.shape}")
    return M


def _invariants(Omega: RealMatrix) -> Tuple[float, float]:
    """mu = tr/2 and Delta^2 = mu^2 - det."""
    mu = 0.5 * (Omega[0, 0] + Omega[1, 1])
    det = Omega[0, 0] * Omega[1, 1] - Omega[0, 1] * Omega[1, 0]
    return mu, mu * mu - det


def _cosh_and_sinhc(delta_sq: float) -> Tuple[float, float]:
    """
    cosh(Delta) and sinh(Delta)/Delta as functions of Delta^2.

    Negative Delta^2 gives the cos / sin(x)/x branch; near zero both use
    their even power series.
    """
    if abs(delta_sq) < Tolerances.DELTA_SERIES_THRESHOLD:
        d2 = delta_sq
        return (1.0 + d2 / 2.0 + d2 * d2 / 24.0,
                1.0 + d2 / 6.0 + d2 * d2 / 120.0)
    if delta_sq > 0.0:
        delta = math.sqrt(delta_sq)
        return math.cosh(delta), math.sinh(delta) / delta
    theta = math.sqrt(-delta_sq)
    return math.cos(theta), math.sin(theta) / theta


# =========================================================================
# CLOSED FORMS
# =========================================================================

def exp2x2_closed(Omega: Any) -> RealMatrix:
    """
    e^Omega = e^mu (cosh(Delta) I + sinh(Delta)/Delta (Omega - mu I)).

    Args:
        Omega: 2x2 real matrix

    Returns:
        2x2 exponential
    """
    Omega = _as_2x2(Omega, 'Omega')
    mu, delta_sq = _invariants(Omega)
    c, s = _cosh_and_sinhc(delta_sq)
    return math.exp(mu) * (c * np.eye(2) + s * (Omega - mu * np.eye(2)))


def sign_map_det(m: SignSymmetricMap) -> float:
    """det(Phi) = -e^{tr(Omega)}."""
    return -math.exp(m.Omega[0, 0] + m.Omega[1, 1])


def sign_map_trace(m: SignSymmetricMap) -> float:
    """tr(Phi) = e^mu sinh(Delta)/Delta tr(D_r Omega), since tr(D_r) = 0."""
    mu, delta_sq = _invariants(m.Omega)
    _, s = _cosh_and_sinhc(delta_sq)
    return math.exp(mu) * s * (m.Omega[1, 1] - m.Omega[0, 0])


def eig_from_invariants(tr: float, det: float) -> EigenPair:
    """
    Real eigenvalues of a 2x2 matrix from its trace and determinant.

    The larger-magnitude root comes from the sign-matched quadratic formula
    and the other from det / root, which avoids cancellation.
    """
    disc = tr * tr - 4.0 * det
    if disc < 0.0:
        # Round-off on a repeated root
        if disc >= -4.0 * np.finfo(float).eps * (tr * tr + 4.0 * abs(det)):
            disc = 0.0
        else:
            raise ComplexEigenvalues(f"tr^2 - 4 det = {disc:.6e} < 0")

    root = math.sqrt(disc)
    big = 0.5 * (tr + math.copysign(root, tr))
    small = det / big if big != 0.0 else 0.0
    return EigenPair(lambda_plus=max(big, small), lambda_minus=min(big, small))


def sign_map_eigenvalues(m: SignSymmetricMap) -> EigenPair:
    return eig_from_invariants(sign_map_trace(m), sign_map_det(m))


# =========================================================================
# REAL LIFT
# =========================================================================

def _eigendirection(M: RealMatrix) -> np.ndarray:
    """Unit vector along the largest column of a rank-one 2x2 matrix."""
    norms = np.linalg.norm(M, axis=0)
    v = M[:, int(np.argmax(norms))]
    return v / np.linalg.norm(v)


def real_lift_log(Phi: Any, Ts: float) -> RealLift:
    """
    Real generator A_c with e^{A_c Ts} = blkdiag(Phi, lambda_-).

    Phi must have eigenvalues lambda_+ > 0 > lambda_-. In the eigenbasis the
    lambda_- direction and the appended coordinate carry the rotation-log
    block (1/Ts) [[ln|lambda_-|, -pi], [pi, ln|lambda_-|]], and the lambda_+
    direction carries ln(lambda_+) / Ts.

    Args:
        Phi: 2x2 map
        Ts: Period in seconds

    Returns:
        RealLift
    """
    Phi = _as_2x2(Phi, 'Phi')
    if not (np.isfinite(Ts) and Ts > 0):
        raise DomainError(f"Ts must be positive, got {Ts}")

    tr = Phi[0, 0] + Phi[1, 1]
    det = Phi[0, 0] * Phi[1, 1] - Phi[0, 1] * Phi[1, 0]
    try:
        pair = eig_from_invariants(tr, det)
    except ComplexEigenvalues as e:
        raise NotLiftable(str(e)) from e

    tol = Tolerances.LIFT_EIG_RTOL * float(np.linalg.norm(Phi))
    lam_p, lam_m = pair.lambda_plus, pair.lambda_minus
    if not (lam_p > tol and lam_m < -tol):
        raise NotLiftable(
            f"spectrum ({lam_p:.6g}, {lam_m:.6g}) is not one positive and one negative eigenvalue"
        )

    # Cayley-Hamilton: columns of (Phi - lambda_mp I) span the lambda_pm eigenspace
    eye = np.eye(2)
    v_plus = _eigendirection(Phi - lam_m * eye)
    v_minus = _eigendirection(Phi - lam_p * eye)
    sin_angle = abs(v_plus[0] * v_minus[1] - v_plus[1] * v_minus[0])
    if sin_angle < Tolerances.LIFT_MIN_SIN:
        raise NotLiftable(f"eigendirections nearly parallel (|sin| = {sin_angle:.3e})")

    # Basis order: v_plus, v_minus, appended coordinate
    W = np.zeros((3, 3))
    W[:2, 0] = v_plus
    W[:2, 1] = v_minus
    W[2, 2] = 1.0

    log_abs = math.log(-lam_m)
    L = np.array([
        [math.log(lam_p), 0.0, 0.0],
        [0.0, log_abs, -math.pi],
        [0.0, math.pi, log_abs],
    ])
    A_c = W @ L @ np.linalg.inv(W) / Ts

    S_ext = np.zeros((3, 3))
    S_ext[:2, :2] = Phi
    S_ext[2, 2] = lam_m

    logger.debug("real lift: lambda+ = %.6g, lambda- = %.6g, |sin| = %.3e", lam_p, lam_m, sin_angle)
    return RealLift(
        A_c=A_c,
        embed_state=np.eye(3, 2),
        project_state=np.eye(2, 3),
        S_ext=S_ext,
        eigenpair=pair,
    )
