"""
BCH Module for pwlrec
Truncated Baker-Campbell-Hausdorff logarithms of switching-cycle products,
state-space averaging as the leading truncation, and commutator bounds.
"""

import logging
import sys
from enum import IntEnum
from pathlib import Path
from typing import Any, Sequence, Tuple, Union

import numpy as np

# Add parent directory to path for imports
sys.path.insert(0, str(Path(__file__).resolve().parent.parent))
from src.exceptions import DimensionError, DomainError
from src.smallmat import RealMatrix, as_matrix, as_vector, commutator, fro_norm, solve

logger = logging.getLogger(__name__)


class BchOrder(IntEnum):
    """Truncation level of the two-factor BCH series."""
    FIRST = 1  # X + Y
    SECOND = 2  # + 1/2 [Y, X]
    FOURTH = 4  # + 1/12 ([Y, [Y, X]] + [X, [X, Y]])


def as_bch_order(order: Union[int, BchOrder]) -> BchOrder:
    try:
        return BchOrder(int(order))
    except ValueError:
        raise DomainError(f"BCH order must be one of 1, 2, 4, got {order}") from None


def _same_square(X: Any, Y: Any) -> Tuple[RealMatrix, RealMatrix]:
    X = as_matrix(X, 'X')
    Y = as_matrix(Y, 'Y')
    if X.shape[0] != X.shape[1] or X.shape != Y.shape:
        raise DimensionError(f"expected square matrices of equal size, got {X.shape} and {Y.shape}")
    return X, Y


# =========================================================================
# TRUNCATED LOGARITHMS
# =========================================================================

def bch_log_pair(X: Any, Y: Any, order: Union[int, BchOrder]) -> RealMatrix:
    """
    Truncated BCH approximation of Log(e^Y e^X), X acting first.

    Args:
        X: Generator of the earlier factor
        Y: Generator of the later factor
        order: BchOrder (1, 2 or 4)

    Returns:
        Omega with e^Omega ~ e^Y e^X
    """
    X, Y = _same_square(X, Y)
    order = as_bch_order(order)

    Omega = X + Y
    if order >= BchOrder.SECOND:
        YX = commutator(Y, X)
        Omega = Omega + 0.5 * YX
        if order >= BchOrder.FOURTH:
            Omega = Omega + (commutator(Y, YX) + commutator(X, -YX)) / 12.0
    return Omega


def ac_from_bch(A1: Any, T1: float, A2: Any, T2: float,
                order: Union[int, BchOrder]) -> RealMatrix:
    """
    Continuous generator (1 / Ts) bch_log_pair(A1 T1, A2 T2, order) of a two-phase cycle.

    Order 1 is the state-space averaged matrix.
    """
    if not (T1 > 0 and T2 > 0):
        raise DomainError(f"subinterval durations must be positive, got {T1}, {T2}")
    A1, A2 = _same_square(A1, A2)
    return bch_log_pair(A1 * T1, A2 * T2, order) / (T1 + T2)


def multi_factor_bch(factors: Sequence[Tuple[Any, float]],
                     order: Union[int, BchOrder]) -> RealMatrix:
    """
    Left-fold pairwise BCH over m >= 2 factors (A_i, T_i) in time order.

    Omega starts at A_1 T_1 and absorbs each later factor with bch_log_pair.
    For m >= 3 the fold drops cross commutators between non-adjacent factors
    at every order, so its bias is not controlled by the pairwise order.

    Returns:
        (1 / sum T_i) Omega
    """
    factors = list(factors)
    if len(factors) < 2:
        raise DomainError(f"multi-factor BCH needs at least two factors, got {len(factors)}")
    order = as_bch_order(order)

    total = 0.0
    Omega = None
    for i, (A, T) in enumerate(factors, start=1):
        if not T > 0:
            raise DomainError(f"factor {i} has non-positive duration {T}")
        generator = as_matrix(A, f'A{i}') * T
        Omega = generator if Omega is None else bch_log_pair(Omega, generator, order)
        total += T

    if len(factors) >= 3:
        logger.debug("multi-factor BCH fold over %d factors at order %d", len(factors), int(order))
    return Omega / total


# =========================================================================
# STATE-SPACE AVERAGING
# =========================================================================

def ssa_average(A1: Any, A2: Any, D: float) -> RealMatrix:
    """Averaged matrix (1 - D) A1 + D A2."""
    if not 0.0 <= D <= 1.0:
        raise DomainError(f"duty must lie in [0, 1], got {D}")
    A1, A2 = _same_square(A1, A2)
    return (1.0 - D) * A1 + D * A2


def averaged_equilibrium(A1: Any, A2: Any, B1: Any, B2: Any, u: Any, D: float) -> np.ndarray:
    """Averaged equilibrium X_avg = -A_avg^{-1} B_avg u."""
    A_avg = ssa_average(A1, A2, D)
    B1 = as_matrix(B1, 'B1')
    B2 = as_matrix(B2, 'B2')
    if B1.shape != B2.shape or B1.shape[0] != A_avg.shape[0]:
        raise DimensionError(f"B1 {B1.shape} and B2 {B2.shape} do not match A {A_avg.shape}")
    B_avg = (1.0 - D) * B1 + D * B2
    return -solve(A_avg, B_avg @ as_vector(u, 'u'))


def ssa_duty_direction(A1: Any, A2: Any, B1: Any, B2: Any, X_avg: Any, u: Any) -> np.ndarray:
    """SSA duty direction b_d = (A2 - A1) X_avg + (B2 - B1) u."""
    A1, A2 = _same_square(A1, A2)
    B1 = as_matrix(B1, 'B1')
    B2 = as_matrix(B2, 'B2')
    X = as_vector(X_avg, 'X_avg')
    u = as_vector(u, 'u')
    if B1.shape != B2.shape or B1.shape[0] != A1.shape[0]:
        raise DimensionError(f"B1 {B1.shape} and B2 {B2.shape} do not match A {A1.shape}")
    if X.shape[0] != A1.shape[0] or u.shape[0] != B1.shape[1]:
        raise DimensionError(f"state length {X.shape[0]} / input length {u.shape[0]} mismatch")
    return (A2 - A1) @ X + (B2 - B1) @ u


def commutator_scale_bound(X: Any, Y: Any) -> float:
    """Bound 2 ||X||_F ||Y||_F on ||[X, Y]||_F."""
    X, Y = _same_square(X, Y)
    return 2.0 * fro_norm(X) * fro_norm(Y)
