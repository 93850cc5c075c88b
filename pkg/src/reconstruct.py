"""
Reconstruction Module for pwlrec
Maps an exact discrete-time baseline (A_z, B_z, C_z, D_z) to a continuous-time
LTI surrogate (A_c, B_c, C_c, D_c):

    A_c = Log(A_z) / Ts
    B_c = B_z / Ts
    C_c = C_z A_z^{-1}
    D_c = D_z - Ts (1/2) C_c B_c

The last line removes the corrected-IRI alias term that a sampled baseline
carries even when the continuous system has no direct feedthrough.
"""

import logging
import sys
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Any, Optional, Tuple, Union

import numpy as np

# Add parent directory to path for imports
sys.path.insert(0, str(Path(__file__).resolve().parent.parent))
from config.config import Tolerances
from src.bch import (
    BchOrder, ac_from_bch, as_bch_order, averaged_equilibrium, multi_factor_bch,
    ssa_average, ssa_duty_direction
)
from src.exceptions import DimensionError, DomainError, PoleHit, UnsupportedTopology
from src.smallmat import RealMatrix, as_matrix, inverse, mat_exp, mat_log_principal, rel_error
from src.two_by_two import real_lift_log

logger = logging.getLogger(__name__)


class SurrogateMethod(Enum):
    """How a surrogate's A_c was obtained."""
    EXACT_LOG = "exact-log"
    REAL_LIFT = "real-lift"
    BCH2 = "bch2"
    BCH4 = "bch4"
    SSA = "ssa"


@dataclass(frozen=True, eq=False)
class DiscreteBaseline:
    """Exact sampled-data quadruple G(z) = C_z (zI - A_z)^{-1} B_z + D_z."""
    A_z: RealMatrix
    B_z: RealMatrix
    C_z: RealMatrix
    D_z: RealMatrix
    Ts: float

    def __post_init__(self):
        A, B, C, D = _check_quadruple(self.A_z, self.B_z, self.C_z, self.D_z)
        if not (np.isfinite(self.Ts) and self.Ts > 0):
            raise DomainError(f"Ts must be positive, got {self.Ts}")
        object.__setattr__(self, 'A_z', A)
        object.__setattr__(self, 'B_z', B)
        object.__setattr__(self, 'C_z', C)
        object.__setattr__(self, 'D_z', D)
        object.__setattr__(self, 'Ts', float(self.Ts))

    @property
    def shape(self) -> Tuple[int, int]:
        """(q, p)"""
        return self.D_z.shape


@dataclass(frozen=True, eq=False)
class ContinuousSurrogate:
    """
    Continuous-time surrogate G_c(s) = C_c (sI - A_c)^{-1} B_c + D_c.

    Lifted surrogates have one extra, non-physical state; B_c and C_c are
    already embedded so transfers keep the original (q, p) shape.
    """
    A_c: RealMatrix
    B_c: RealMatrix
    C_c: RealMatrix
    D_c: RealMatrix
    Ts: float
    method: SurrogateMethod
    lifted: bool = False
    project_state: Optional[RealMatrix] = None

    def __post_init__(self):
        A, B, C, D = _check_quadruple(self.A_c, self.B_c, self.C_c, self.D_c)
        object.__setattr__(self, 'A_c', A)
        object.__setattr__(self, 'B_c', B)
        object.__setattr__(self, 'C_c', C)
        object.__setattr__(self, 'D_c', D)
        object.__setattr__(self, 'method', SurrogateMethod(self.method))

    @property
    def method_tag(self) -> str:
        return self.method.value

    @property
    def shape(self) -> Tuple[int, int]:
        return self.D_c.shape


def _check_quadruple(A: Any, B: Any, C: Any, D: Any) -> Tuple[RealMatrix, ...]:
    A = as_matrix(A, 'A')
    B = as_matrix(B, 'B')
    C = as_matrix(C, 'C')
    D = as_matrix(D, 'D')
    n = A.shape[0]
    if A.shape != (n, n):
        raise DimensionError(f"A must be square, got shape {A.shape}")
    if B.shape[0] != n or C.shape[1] != n:
        raise DimensionError(f"B {B.shape} / C {C.shape} do not match A {A.shape}")
    if D.shape != (C.shape[0], B.shape[1]):
        raise DimensionError(f"D must be {C.shape[0]}x{B.shape[1]}, got shape {D.shape}")
    return A, B, C, D


# =========================================================================
# RECONSTRUCTION OPERATOR
# =========================================================================

def alias_direct_term(C_c: Any, B_c: Any, Ts: float) -> RealMatrix:
    """Corrected-IRI alias term Ts (1/2) C_c B_c."""
    C = as_matrix(C_c, 'C_c')
    B = as_matrix(B_c, 'B_c')
    if C.shape[1] != B.shape[0]:
        raise DimensionError(f"C_c {C.shape} and B_c {B.shape} are not conformable")
    return Ts * 0.5 * (C @ B)


def _boxed_io(baseline: DiscreteBaseline) -> Tuple[RealMatrix, RealMatrix, RealMatrix]:
    """B_c, C_c and D_c of the boxed operator."""
    Ts = baseline.Ts
    B_c = baseline.B_z / Ts
    C_c = baseline.C_z @ inverse(baseline.A_z)
    D_c = baseline.D_z - alias_direct_term(C_c, B_c, Ts)
    return B_c, C_c, D_c


def reconstruct_exact(baseline: DiscreteBaseline) -> ContinuousSurrogate:
    """
    Apply the reconstruction operator with the principal logarithm.

    Raises NoRealPrincipalLog when A_z has an eigenvalue on the closed
    negative real axis; 2x2 maps with one negative eigenvalue can use
    reconstruct_with_real_lift instead.
    """
    B_c, C_c, D_c = _boxed_io(baseline)
    A_c = mat_log_principal(baseline.A_z) / baseline.Ts
    return ContinuousSurrogate(A_c=A_c, B_c=B_c, C_c=C_c, D_c=D_c, Ts=baseline.Ts,
                               method=SurrogateMethod.EXACT_LOG)


def reconstruct_with_real_lift(baseline: DiscreteBaseline) -> ContinuousSurrogate:
    """
    Reconstruction through the minimal real lift of a 2x2 A_z.

    B is embedded with a zero in the lifted coordinate and C_z is zero-padded
    before the phase-consistent C_c = C_z S_ext^{-1}.
    """
    Ts = baseline.Ts
    lift = real_lift_log(baseline.A_z, Ts)

    B_c = lift.embed_state @ (baseline.B_z / Ts)
    C_pad = baseline.C_z @ lift.project_state
    C_c = C_pad @ inverse(lift.S_ext)
    D_c = baseline.D_z - alias_direct_term(C_c, B_c, Ts)

    logger.info("real-lift reconstruction: lambda- = %.6g", lift.eigenpair.lambda_minus)
    return ContinuousSurrogate(A_c=lift.A_c, B_c=B_c, C_c=C_c, D_c=D_c, Ts=Ts,
                               method=SurrogateMethod.REAL_LIFT, lifted=True,
                               project_state=lift.project_state)


def reconstruct_bch(baseline: DiscreteBaseline, cycle: Any,
                    order: Union[int, BchOrder] = BchOrder.SECOND) -> ContinuousSurrogate:
    """
    Reconstruction with A_c from a truncated BCH series of the cycle factors.

    B_c, C_c and D_c still follow the boxed operator. Two-phase cycles use
    ac_from_bch; longer cycles use the multi-factor fold.
    """
    order = as_bch_order(order)
    if order == BchOrder.FIRST:
        raise DomainError("BCH reconstruction uses order 2 or 4; order 1 is the SSA surrogate")
    if getattr(cycle, 'reset', None) is not None:
        raise UnsupportedTopology("a reset map has no BCH factorization")

    subs = cycle.subintervals
    if len(subs) == 1:
        A_c = subs[0].A.copy()
    elif len(subs) == 2:
        A_c = ac_from_bch(subs[0].A, subs[0].T, subs[1].A, subs[1].T, order)
    else:
        A_c = multi_factor_bch([(sub.A, sub.T) for sub in subs], order)

    B_c, C_c, D_c = _boxed_io(baseline)
    method = SurrogateMethod.BCH2 if order == BchOrder.SECOND else SurrogateMethod.BCH4
    return ContinuousSurrogate(A_c=A_c, B_c=B_c, C_c=C_c, D_c=D_c, Ts=baseline.Ts,
                               method=method)


def reconstruct_ssa(cycle: Any, C_phys: Any, D_phys: Optional[Any] = None) -> ContinuousSurrogate:
    """
    Classical state-space averaged surrogate of a two-phase cycle.

    A_c = (1 - D) A1 + D A2 and B_c = b_d / Ts with b_d evaluated at the
    averaged equilibrium, so the input is the same switching-instant
    perturbation the baseline uses.
    """
    if cycle.m != 2:
        raise UnsupportedTopology(f"state-space averaging needs two subintervals, cycle has {cycle.m}")
    if cycle.reset is not None:
        raise UnsupportedTopology("a reset map has no averaged counterpart")

    first, second = cycle.subintervals
    D = cycle.duty
    A_avg = ssa_average(first.A, second.A, D)
    X_avg = averaged_equilibrium(first.A, second.A, first.B, second.B, cycle.u, D)
    b_d = ssa_duty_direction(first.A, second.A, first.B, second.B, X_avg, cycle.u)

    C = as_matrix(C_phys, 'C_phys')
    D_c = np.zeros((C.shape[0], 1)) if D_phys is None else as_matrix(D_phys, 'D_phys')
    return ContinuousSurrogate(A_c=A_avg, B_c=b_d.reshape(-1, 1) / cycle.Ts, C_c=C, D_c=D_c,
                               Ts=cycle.Ts, method=SurrogateMethod.SSA)


# =========================================================================
# FORWARD SYNTHESIS AND EVALUATION
# =========================================================================

def synthesize_baseline(A: Any, B: Any, C: Any, D: Any, Ts: float) -> DiscreteBaseline:
    """
    Forward map of a continuous quadruple to its corrected-IRI baseline.

    A_z = e^{A Ts}, B_z = Ts B, C_z = C A_z, D_z = D + (Ts/2) C B.
    """
    A, B, C, D = _check_quadruple(A, B, C, D)
    A_z = mat_exp(A, Ts)
    return DiscreteBaseline(A_z=A_z, B_z=Ts * B, C_z=C @ A_z,
                            D_z=D + alias_direct_term(C, B, Ts), Ts=Ts)


def resample_surrogate(surrogate: ContinuousSurrogate) -> DiscreteBaseline:
    """Baseline a surrogate would produce under the same sampling convention."""
    return synthesize_baseline(surrogate.A_c, surrogate.B_c, surrogate.C_c, surrogate.D_c,
                               surrogate.Ts)


def transition_residual(surrogate: ContinuousSurrogate, target: Any) -> float:
    """Relative error of e^{A_c Ts} against the transition it should reproduce."""
    return rel_error(mat_exp(surrogate.A_c, surrogate.Ts), as_matrix(target, 'target'))


def continuous_transfer(surrogate: ContinuousSurrogate, sval: complex) -> np.ndarray:
    """
    G_c(s) = C_c (sI - A_c)^{-1} B_c + D_c at one complex frequency.

    Args:
        surrogate: ContinuousSurrogate
        sval: Complex frequency in 1/s

    Returns:
        Complex q x p array
    """
    A = surrogate.A_c
    N = A.shape[0]
    # No state path from input to output: G_c = D_c even at a pole of A_c
    if N == 0 or not np.any(surrogate.B_c) or not np.any(surrogate.C_c):
        return surrogate.D_c.astype(complex)

    M = complex(sval) * np.eye(N) - A
    scale = max(abs(sval), float(np.max(np.abs(A))))
    smallest = float(np.linalg.svd(M, compute_uv=False)[-1])
    if scale == 0.0 or smallest <= Tolerances.POLE_RTOL * scale:
        raise PoleHit(f"s = {sval} is a pole of the surrogate (margin {smallest:.3e})")

    return surrogate.C_c @ np.linalg.solve(M, surrogate.B_c.astype(complex)) + surrogate.D_c
