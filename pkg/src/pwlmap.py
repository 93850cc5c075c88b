"""
Poincare Map Module for pwlrec
Exact one-period map, periodic steady state and duty-injection direction
of a piecewise-linear switching cycle.
"""

import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional, Sequence, Tuple

import numpy as np

# Add parent directory to path for imports
sys.path.insert(0, str(Path(__file__).resolve().parent.parent))
from config.config import Tolerances
from src.exceptions import (
    DimensionError, DomainError, NoUniquePeriodicOrbit, SingularMatrix, UnsupportedTopology
)
from src.reconstruct import DiscreteBaseline
from src.smallmat import (
    RealMatrix, as_matrix, as_vector, det, drive_integral, fro_norm, inverse, mat_exp, solve
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class SubintervalModel:
    """One PWL phase: dx/dt = A x + B u for T seconds."""
    A: RealMatrix  # n x n, 1/s
    B: RealMatrix  # n x p
    T: float  # seconds

    def __post_init__(self):
        A = as_matrix(self.A, 'A')
        B = as_matrix(self.B, 'B')
        if A.shape[0] != A.shape[1]:
            raise DimensionError(f"A must be square, got shape {A.shape}")
        if B.shape[0] != A.shape[0]:
            raise DimensionError(f"B has {B.shape[0]} rows, A is {A.shape[0]}x{A.shape[0]}")
        if not np.isfinite(self.T) or self.T <= 0:
            raise DomainError(f"subinterval duration must be positive, got {self.T}")
        object.__setattr__(self, 'A', A)
        object.__setattr__(self, 'B', B)
        object.__setattr__(self, 'T', float(self.T))

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def p(self) -> int:
        return self.B.shape[1]


@dataclass(frozen=True, eq=False)
class SwitchingCycle:
    """
    Ordered subintervals of one switching period with a constant input.

    Subinterval 1 is the earliest phase. The optional reset matrix R is a
    linear state map applied at the end of the period (rectified or
    half-cycle constructions), so the period map becomes R Phi_m ... Phi_1.
    """
    subintervals: Tuple[SubintervalModel, ...]
    u: np.ndarray
    Ts: Optional[float] = None
    reset: Optional[RealMatrix] = None

    def __post_init__(self):
        subintervals = tuple(self.subintervals)
        if not subintervals:
            raise DomainError("a switching cycle needs at least one subinterval")
        n, p = subintervals[0].n, subintervals[0].p
        for i, sub in enumerate(subintervals, start=1):
            if sub.n != n or sub.p != p:
                raise DimensionError(
                    f"subinterval {i} has (n, p) = ({sub.n}, {sub.p}), expected ({n}, {p})"
                )

        u = as_vector(self.u, 'u')
        if u.shape[0] != p:
            raise DimensionError(f"u has length {u.shape[0]}, input dimension is {p}")

        total = float(sum(sub.T for sub in subintervals))
        if self.Ts is not None and abs(float(self.Ts) - total) > Tolerances.CYCLE_PERIOD_RTOL * total:
            raise DomainError(f"Ts = {self.Ts} does not match the subinterval sum {total}")

        reset = None
        if self.reset is not None:
            reset = as_matrix(self.reset, 'reset')
            if reset.shape != (n, n):
                raise DimensionError(f"reset must be {n}x{n}, got shape {reset.shape}")

        object.__setattr__(self, 'subintervals', subintervals)
        object.__setattr__(self, 'u', u)
        object.__setattr__(self, 'Ts', total)
        object.__setattr__(self, 'reset', reset)

    @classmethod
    def two_phase(cls, A1: Any, B1: Any, A2: Any, B2: Any, u: Any, duty: float,
                  Ts: float, reset: Optional[Any] = None) -> 'SwitchingCycle':
        """Two-subinterval cycle with T1 = (1 - D) Ts and T2 = D Ts."""
        if not 0.0 < duty < 1.0:
            raise DomainError(f"duty must lie strictly between 0 and 1, got {duty}")
        return cls(
            subintervals=(SubintervalModel(A1, B1, (1.0 - duty) * Ts),
                          SubintervalModel(A2, B2, duty * Ts)),
            u=u,
            reset=reset,
        )

    @property
    def m(self) -> int:
        return len(self.subintervals)

    @property
    def n(self) -> int:
        return self.subintervals[0].n

    @property
    def p(self) -> int:
        return self.subintervals[0].p

    @property
    def duty(self) -> float:
        """Fraction of the period spent in the second subinterval (m = 2 only)."""
        _require_two_phase(self)
        return self.subintervals[1].T / self.Ts


@dataclass(frozen=True, eq=False)
class PoincareMap:
    """x_{k+1} = Phi x_k + Gamma u over one period Ts."""
    Phi: RealMatrix
    Gamma: RealMatrix
    Ts: float

    @property
    def n(self) -> int:
        return self.Phi.shape[0]


def _require_two_phase(cycle: SwitchingCycle):
    if cycle.m != 2:
        raise UnsupportedTopology(
            f"timing injection is defined for two subintervals, cycle has {cycle.m}"
        )


# =========================================================================
# ONE-PERIOD MAP
# =========================================================================

def subinterval_flows(cycle: SwitchingCycle) -> Sequence[Tuple[RealMatrix, RealMatrix]]:
    """(Phi_i, Gamma_i) for each subinterval, in time order."""
    return [(mat_exp(sub.A, sub.T), drive_integral(sub.A, sub.B, sub.T))
            for sub in cycle.subintervals]


def poincare_map(cycle: SwitchingCycle) -> PoincareMap:
    """
    Exact one-period map of a switching cycle.

    Phi = Phi_m ... Phi_1 and Gamma = Gamma_m + Phi_m Gamma_{m-1} + ... +
    Phi_m ... Phi_2 Gamma_1, followed by the reset matrix when present.

    Args:
        cycle: SwitchingCycle

    Returns:
        PoincareMap
    """
    Phi = np.eye(cycle.n)
    Gamma = np.zeros((cycle.n, cycle.p))
    for Phi_i, Gamma_i in subinterval_flows(cycle):
        Phi = Phi_i @ Phi
        Gamma = Phi_i @ Gamma + Gamma_i

    if cycle.reset is not None:
        Phi = cycle.reset @ Phi
        Gamma = cycle.reset @ Gamma

    return PoincareMap(Phi=Phi, Gamma=Gamma, Ts=cycle.Ts)


def periodic_steady_state(pmap: PoincareMap, u: Any) -> np.ndarray:
    """
    Periodic steady state X* = (I - Phi)^{-1} Gamma u.

    Raises NoUniquePeriodicOrbit when Phi has an eigenvalue at 1, detected
    as |det(I - Phi)| < 1e-12 max(1, ||Phi||^n).
    """
    u = as_vector(u, 'u')
    if u.shape[0] != pmap.Gamma.shape[1]:
        raise DimensionError(f"u has length {u.shape[0]}, Gamma is {pmap.Gamma.shape}")

    n = pmap.n
    I_minus_Phi = np.eye(n) - pmap.Phi
    threshold = Tolerances.PERIODIC_ORBIT_RTOL * max(1.0, fro_norm(pmap.Phi) ** n)
    if abs(det(I_minus_Phi)) < threshold:
        raise NoUniquePeriodicOrbit("I - Phi is singular: the map has an eigenvalue at 1")

    try:
        return solve(I_minus_Phi, pmap.Gamma @ u)
    except SingularMatrix as e:
        raise NoUniquePeriodicOrbit(str(e)) from e


# =========================================================================
# DUTY INJECTION
# =========================================================================

def duty_injection_direction(cycle: SwitchingCycle, Xstar: Any) -> np.ndarray:
    """
    Duty-injection direction gamma_x = (A2 - A1) X + (B2 - B1) u.

    Pass the exact X* for the sampled-data model or the averaged equilibrium
    for the SSA direction. Only the single switching instant of a two-phase
    cycle is perturbed.
    """
    _require_two_phase(cycle)
    X = as_vector(Xstar, 'Xstar')
    first, second = cycle.subintervals
    if X.shape[0] != cycle.n:
        raise DimensionError(f"state has length {X.shape[0]}, cycle state dimension is {cycle.n}")
    return (second.A - first.A) @ X + (second.B - first.B) @ cycle.u


def switching_state(cycle: SwitchingCycle, Xstar: Any) -> np.ndarray:
    """State reached at the switching instant when the period starts at Xstar."""
    _require_two_phase(cycle)
    X = as_vector(Xstar, 'Xstar')
    first = cycle.subintervals[0]
    return mat_exp(first.A, first.T) @ X + drive_integral(first.A, first.B, first.T) @ cycle.u


def exact_timing_forcing(cycle: SwitchingCycle, Xstar: Any) -> np.ndarray:
    """
    Exact first-order forcing of the period map per unit advance of the switching instant.

    Equals R Phi_2 [(A2 - A1) x_sw + (B2 - B1) u] with x_sw the switching-instant
    state; duty_injection_direction at X* is its O(Ts) approximation.
    """
    x_sw = switching_state(cycle, Xstar)
    second = cycle.subintervals[1]
    forcing = mat_exp(second.A, second.T) @ duty_injection_direction(cycle, x_sw)
    if cycle.reset is not None:
        forcing = cycle.reset @ forcing
    return forcing


def build_discrete_baseline(pmap: PoincareMap, gamma_x: Any, C_phys: Any,
                            D_phys: Optional[Any] = None) -> DiscreteBaseline:
    """
    Discrete baseline (A_z, B_z, C_z, D_z) for the duty channel.

    A_z = Phi, B_z = gamma_x (absorbs Ts, so B_c = gamma_x / Ts),
    C_z = C_phys Phi, D_z = D_phys + (1/2) C_phys gamma_x.

    Args:
        pmap: PoincareMap
        gamma_x: Duty-injection direction (length n)
        C_phys: q x n physical output matrix
        D_phys: q x 1 physical feedthrough (default zero)

    Returns:
        DiscreteBaseline
    """
    gamma = as_vector(gamma_x, 'gamma_x').reshape(-1, 1)
    C = as_matrix(C_phys, 'C_phys')
    if gamma.shape[0] != pmap.n or C.shape[1] != pmap.n:
        raise DimensionError(
            f"gamma_x length {gamma.shape[0]} / C_phys width {C.shape[1]} vs state dimension {pmap.n}"
        )
    D = np.zeros((C.shape[0], 1)) if D_phys is None else as_matrix(D_phys, 'D_phys')
    if D.shape != (C.shape[0], 1):
        raise DimensionError(f"D_phys must be {C.shape[0]}x1, got shape {D.shape}")

    # Raises SingularMatrix for a singular Phi
    inverse(pmap.Phi)

    logger.debug("baseline built: n=%d, q=%d", pmap.n, C.shape[0])
    return DiscreteBaseline(
        A_z=pmap.Phi.copy(),
        B_z=gamma,
        C_z=C @ pmap.Phi,
        D_z=D + 0.5 * (C @ gamma),
        Ts=pmap.Ts,
    )
