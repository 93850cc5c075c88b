"""
Pipeline Module for pwlrec
Runs a cycle specification through map, baseline, reconstruction,
comparison and probe stages.
"""

import logging
import sys
from functools import cached_property
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

# Add parent directory to path for imports
sys.path.insert(0, str(Path(__file__).resolve().parent.parent))
from config.config import ProbeDefaults, SurrogateMethods, Tolerances
from src.bch import BchOrder
from src.exceptions import DomainError, NoRealPrincipalLog, UnsupportedTopology
from src.freqsweep import (
    ComparisonRow, FrequencyGrid, ProbeResult, bode_compare, geometric_ts_list, order_probe
)
from src.pwlmap import (
    PoincareMap, build_discrete_baseline, duty_injection_direction, exact_timing_forcing,
    periodic_steady_state, poincare_map
)
from src.reconstruct import (
    ContinuousSurrogate, DiscreteBaseline, SurrogateMethod, reconstruct_bch, reconstruct_exact,
    reconstruct_ssa, reconstruct_with_real_lift, transition_residual
)
from src.spec_io import CycleSpec
from src.two_by_two import eig_from_invariants

logger = logging.getLogger(__name__)


class ConverterModel:
    """
    Sampled-data model of one cycle specification.

    Stages are computed lazily and cached; errors from any stage propagate
    as PwlRecError subclasses.
    """

    def __init__(self, spec: CycleSpec, injection: str = SurrogateMethods.DEFAULT_INJECTION):
        """
        Initialize the model.

        Args:
            spec: Parsed CycleSpec
            injection: 'nominal' (gamma_x at X*) or 'exact' (map derivative)
        """
        if injection not in SurrogateMethods.INJECTION_CHOICES:
            raise DomainError(f"unknown injection {injection!r}")
        self.spec = spec
        self.cycle = spec.cycle
        self.injection = injection

    # =========================================================================
    # MAP STAGE
    # =========================================================================

    @cached_property
    def poincare_map(self) -> PoincareMap:
        return poincare_map(self.cycle)

    @cached_property
    def steady_state(self) -> np.ndarray:
        return periodic_steady_state(self.poincare_map, self.cycle.u)

    @cached_property
    def gamma_x(self) -> np.ndarray:
        """Duty-channel forcing; raises UnsupportedTopology unless m = 2."""
        if self.injection == 'exact':
            return exact_timing_forcing(self.cycle, self.steady_state)
        return duty_injection_direction(self.cycle, self.steady_state)

    @cached_property
    def baseline(self) -> DiscreteBaseline:
        return build_discrete_baseline(self.poincare_map, self.gamma_x, self.spec.C, self.spec.D)

    # =========================================================================
    # RECONSTRUCTION STAGE
    # =========================================================================

    def surrogate(self, method: str) -> ContinuousSurrogate:
        """
        Build the surrogate for a method tag.

        'auto' tries the principal logarithm and falls back to the real lift
        for 2x2 maps with a negative eigenvalue.
        """
        if method == SurrogateMethods.AUTO:
            try:
                return reconstruct_exact(self.baseline)
            except NoRealPrincipalLog as e:
                if self.cycle.n != 2:
                    raise
                logger.info("principal logarithm unavailable (%s); using real lift", e)
                return reconstruct_with_real_lift(self.baseline)
        if method == SurrogateMethods.EXACT_LOG:
            return reconstruct_exact(self.baseline)
        if method == SurrogateMethods.REAL_LIFT:
            return reconstruct_with_real_lift(self.baseline)
        if method == SurrogateMethods.BCH2:
            return reconstruct_bch(self.baseline, self.cycle, BchOrder.SECOND)
        if method == SurrogateMethods.BCH4:
            return reconstruct_bch(self.baseline, self.cycle, BchOrder.FOURTH)
        if method == SurrogateMethods.SSA:
            return reconstruct_ssa(self.cycle, self.spec.C, self.spec.D)
        raise DomainError(f"unknown method {method!r}")

    def transition_check(self, surrogate: ContinuousSurrogate) -> Optional[Tuple[float, bool]]:
        """
        (residual, passed) of e^{A_c Ts} against A_z, or S_ext when lifted.

        Returns None for truncated methods, which carry no such guarantee.
        """
        if surrogate.method == SurrogateMethod.EXACT_LOG:
            target = self.baseline.A_z
        elif surrogate.method == SurrogateMethod.REAL_LIFT:
            A_z = self.baseline.A_z
            pair = eig_from_invariants(float(np.trace(A_z)), float(np.linalg.det(A_z)))
            target = np.zeros((3, 3))
            target[:2, :2] = A_z
            target[2, 2] = pair.lambda_minus
        else:
            return None
        residual = transition_residual(surrogate, target)
        return residual, residual <= Tolerances.EXP_CHECK_RTOL

    # =========================================================================
    # COMPARISON AND PROBE
    # =========================================================================

    def compare(self, methods: Sequence[str], grid: Optional[FrequencyGrid] = None,
                channel: Tuple[int, int] = (0, 0)) -> List[ComparisonRow]:
        grid = grid or FrequencyGrid.default(self.cycle.Ts)
        models = [self.surrogate(method) for method in methods]
        return bode_compare(self.baseline, models, grid, channel=channel)

    def probe(self, order: int, ts_points: int = ProbeDefaults.TS_POINTS,
              ts_span: float = ProbeDefaults.TS_SPAN_OCTAVES) -> ProbeResult:
        if self.cycle.m != 2:
            raise UnsupportedTopology(f"the order probe needs two subintervals, cycle has {self.cycle.m}")
        if self.cycle.reset is not None:
            raise UnsupportedTopology("the order probe does not apply to cycles with a reset map")
        first, second = self.cycle.subintervals
        ts_list = geometric_ts_list(self.cycle.Ts, ts_points, ts_span)
        return order_probe(first.A, second.A, first.B, second.B, self.cycle.u,
                           self.spec.duty, ts_list, order)

    def map_quantities(self) -> Dict[str, np.ndarray]:
        """Phi, Gamma, X* and (for two-phase cycles) gamma_x."""
        quantities = {
            'Phi': self.poincare_map.Phi,
            'Gamma': self.poincare_map.Gamma,
            'Xstar': self.steady_state,
        }
        if self.cycle.m == 2:
            quantities['gamma_x'] = self.gamma_x
        return quantities
