"""
Frequency Sweep Module for pwlrec
Discrete-baseline and surrogate transfer functions on a frequency grid,
Bode-style comparison rows, and the BCH order-of-accuracy probe.
"""

import logging
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

# Add parent directory to path for imports
sys.path.insert(0, str(Path(__file__).resolve().parent.parent))
from config.config import GridDefaults, ProbeDefaults, Tolerances
from src.bch import (
    BchOrder, ac_from_bch, as_bch_order, averaged_equilibrium, ssa_duty_direction
)
from src.exceptions import (
    DimensionError, DomainError, NoRealPrincipalLog, NoUniquePeriodicOrbit, PoleHit, ProbeInfeasible,
    SingularMatrix
)
from src.pwlmap import (
    SwitchingCycle, duty_injection_direction, periodic_steady_state, poincare_map
)
from src.reconstruct import ContinuousSurrogate, DiscreteBaseline, continuous_transfer
from src.smallmat import as_matrix, fro_norm, mat_log_principal

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class FrequencyGrid:
    """Strictly increasing angular frequencies in (0, pi/Ts)."""
    points: np.ndarray  # rad/s
    Ts: float

    def __post_init__(self):
        points = np.asarray(self.points, dtype=float).reshape(-1)
        nyquist = math.pi / self.Ts
        if points.size == 0:
            raise DomainError("frequency grid is empty")
        if np.any(np.diff(points) <= 0):
            raise DomainError("frequency grid must be strictly increasing")
        if points[0] <= 0 or points[-1] >= nyquist:
            raise DomainError(f"frequency grid must lie in (0, {nyquist:.6g}) rad/s")
        object.__setattr__(self, 'points', points)

    @property
    def nyquist(self) -> float:
        return math.pi / self.Ts

    @classmethod
    def default(cls, Ts: float, points: int = GridDefaults.POINTS) -> 'FrequencyGrid':
        """Log-spaced grid from 1e-3 to 0.99 of Nyquist."""
        nyquist = math.pi / Ts
        return cls(np.geomspace(GridDefaults.LOW_FRACTION * nyquist,
                                GridDefaults.HIGH_FRACTION * nyquist, points), Ts)

    @classmethod
    def from_hz(cls, fmin: float, fmax: float, points: int, Ts: float) -> 'FrequencyGrid':
        """Log-spaced grid between fmin and fmax given in Hz."""
        if points < 1:
            raise DomainError(f"points must be positive, got {points}")
        if not (fmin > 0 and fmax > 0):
            raise DomainError(f"frequency bounds must be positive, got fmin={fmin}, fmax={fmax}")
        if fmin > fmax:
            raise DomainError(f"fmin {fmin} exceeds fmax {fmax}")
        if points == 1:
            return cls(np.array([2.0 * math.pi * fmin]), Ts)
        return cls(2.0 * math.pi * np.geomspace(fmin, fmax, points), Ts)


@dataclass
class ModelResponse:
    """One model's response at one grid point."""
    mag_db: float
    phase_deg: float
    rel_err: float
    pole_hit: bool = False


@dataclass
class ComparisonRow:
    """Baseline and per-model response at one angular frequency."""
    omega: float
    baseline_mag_db: float
    baseline_phase_deg: float
    models: Dict[str, ModelResponse] = field(default_factory=dict)
    baseline_pole_hit: bool = False


@dataclass
class ProbeResult:
    """Output of the order-of-accuracy probe."""
    slope: float  # NaN when every residual is at machine precision
    Ts_list: np.ndarray
    residuals: np.ndarray
    direction_residuals: np.ndarray
    exact: bool
    order: BchOrder


# =========================================================================
# TRANSFER EVALUATION
# =========================================================================

def discrete_transfer(baseline: DiscreteBaseline, omega: float) -> np.ndarray:
    """
    Baseline transfer C_z (zI - A_z)^{-1} B_z + D_z at z = e^{j omega Ts}.

    Args:
        baseline: DiscreteBaseline
        omega: Angular frequency in rad/s (negative values give the conjugate)

    Returns:
        Complex q x p array
    """
    A = baseline.A_z
    n = A.shape[0]
    if n == 0:
        return baseline.D_z.astype(complex)

    z = complex(math.cos(omega * baseline.Ts), math.sin(omega * baseline.Ts))
    M = z * np.eye(n) - A
    scale = max(1.0, float(np.max(np.abs(A))))
    smallest = float(np.linalg.svd(M, compute_uv=False)[-1])
    if smallest <= Tolerances.POLE_RTOL * scale:
        raise PoleHit(f"z = e^(j {omega:.6g} Ts) is a pole of the baseline (margin {smallest:.3e})")

    return baseline.C_z @ np.linalg.solve(M, baseline.B_z.astype(complex)) + baseline.D_z


def _unwrap_deg(phases: Sequence[float]) -> List[float]:
    """np.unwrap over the finite points only; NaN pole-hit gaps stay in place."""
    out = np.asarray(phases, dtype=float).copy()
    finite = np.isfinite(out)
    if finite.any():
        out[finite] = np.unwrap(out[finite], period=360.0)
    return out.tolist()


def _mag_db(value: complex) -> float:
    magnitude = abs(value)
    return 20.0 * math.log10(magnitude) if magnitude > 0 else -math.inf


def _evaluate_point(baseline: DiscreteBaseline, models: Sequence[ContinuousSurrogate],
                    omega: float, channel: Tuple[int, int]) -> Tuple[Optional[complex], List[Optional[complex]]]:
    i, j = channel
    try:
        g_base = complex(discrete_transfer(baseline, omega)[i, j])
    except PoleHit:
        logger.debug("baseline pole hit at omega=%.6g", omega)
        g_base = None

    responses = []
    for model in models:
        try:
            responses.append(complex(continuous_transfer(model, 1j * omega)[i, j]))
        except PoleHit:
            logger.debug("%s pole hit at omega=%.6g", model.method_tag, omega)
            responses.append(None)
    return g_base, responses


def bode_compare(baseline: DiscreteBaseline, models: Sequence[ContinuousSurrogate],
                 grid: FrequencyGrid, channel: Tuple[int, int] = GridDefaults.CHANNEL,
                 max_workers: Optional[int] = None) -> List[ComparisonRow]:
    """
    Compare surrogate transfers against the discrete baseline on a grid.

    Magnitudes are in dB and phases in degrees, unwrapped along the grid.
    Pole hits are marked on the row rather than raised. Rows are returned
    in grid order whether or not points are evaluated in parallel.

    Args:
        baseline: DiscreteBaseline
        models: Surrogates sharing the baseline's (q, p)
        grid: FrequencyGrid
        channel: (output index, input index) reported in the rows
        max_workers: Thread count for point evaluation (None or 1: sequential)

    Returns:
        One ComparisonRow per grid point
    """
    for model in models:
        if model.shape != baseline.shape:
            raise DomainError(
                f"{model.method_tag} has (q, p) = {model.shape}, baseline has {baseline.shape}"
            )
    q, p = baseline.shape
    i, j = channel
    if not (0 <= i < q and 0 <= j < p):
        raise DimensionError(f"channel (output {i}, input {j}) outside (q, p) = ({q}, {p})")

    tags = _model_labels(models)
    omegas = list(grid.points)

    def evaluate(omega):
        return _evaluate_point(baseline, models, omega, channel)

    if max_workers and max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            values = list(pool.map(evaluate, omegas))
    else:
        values = [evaluate(omega) for omega in omegas]

    def phase_of(value):
        return math.degrees(np.angle(value)) if value is not None else math.nan

    base_phase = _unwrap_deg([phase_of(g) for g, _ in values])
    model_phase = [_unwrap_deg([phase_of(resp[k]) for _, resp in values])
                   for k in range(len(models))]

    rows = []
    for idx, (omega, (g_base, responses)) in enumerate(zip(omegas, values)):
        row = ComparisonRow(
            omega=float(omega),
            baseline_mag_db=_mag_db(g_base) if g_base is not None else math.nan,
            baseline_phase_deg=base_phase[idx],
            baseline_pole_hit=g_base is None,
        )
        for k, (tag, g_model) in enumerate(zip(tags, responses)):
            if g_model is None:
                row.models[tag] = ModelResponse(math.nan, math.nan, math.nan, pole_hit=True)
                continue
            rel_err = (abs(g_model - g_base) / max(abs(g_base), GridDefaults.REL_ERR_FLOOR)
                       if g_base is not None else math.nan)
            row.models[tag] = ModelResponse(_mag_db(g_model), model_phase[k][idx], rel_err)
        rows.append(row)
    return rows


def _model_labels(models: Sequence[ContinuousSurrogate]) -> List[str]:
    """Method tags, suffixed when a method appears more than once."""
    labels, seen = [], {}
    for model in models:
        tag = model.method_tag
        seen[tag] = seen.get(tag, 0) + 1
        labels.append(tag if seen[tag] == 1 else f"{tag}_{seen[tag]}")
    return labels


def rows_to_frame(rows: Sequence[ComparisonRow]) -> pd.DataFrame:
    """
    Comparison rows as a DataFrame in CSV header order:
    omega_rad_s, baseline_mag_db, baseline_phase_deg, then per method
    {method}_mag_db, {method}_phase_deg, {method}_rel_err.
    """
    columns = ['omega_rad_s', 'baseline_mag_db', 'baseline_phase_deg']
    methods = list(rows[0].models) if rows else []
    for tag in methods:
        columns += [f'{tag}_mag_db', f'{tag}_phase_deg', f'{tag}_rel_err']

    records = []
    for row in rows:
        record = [row.omega, row.baseline_mag_db, row.baseline_phase_deg]
        for tag in methods:
            resp = row.models[tag]
            record += [resp.mag_db, resp.phase_deg, resp.rel_err]
        records.append(record)
    return pd.DataFrame(records, columns=columns)


# =========================================================================
# ORDER-OF-ACCURACY PROBE
# =========================================================================

def _validate_ts_list(Ts_list: Sequence[float]) -> np.ndarray:
    ts = np.asarray(Ts_list, dtype=float).reshape(-1)
    if ts.size < ProbeDefaults.MIN_POINTS:
        raise DomainError(f"probe needs at least {ProbeDefaults.MIN_POINTS} step sizes, got {ts.size}")
    if np.any(ts <= 0) or np.any(np.diff(ts) >= 0):
        raise DomainError("probe step sizes must be positive and strictly decreasing")
    octaves = math.log2(ts[0] / ts[-1])
    if octaves < ProbeDefaults.MIN_OCTAVES - 1e-9:
        raise DomainError(f"probe step sizes span {octaves:.3g} octaves, need {ProbeDefaults.MIN_OCTAVES}")
    return ts


def geometric_ts_list(Ts0: float, points: int = ProbeDefaults.TS_POINTS,
                      span_octaves: float = ProbeDefaults.TS_SPAN_OCTAVES) -> np.ndarray:
    """Decreasing list Ts0 * 2^(-span k / (points - 1)), k = 0 .. points - 1."""
    if points < 2:
        raise DomainError(f"points must be at least 2, got {points}")
    return Ts0 * 2.0 ** (-span_octaves * np.arange(points) / (points - 1))


def order_probe(A1: Any, A2: Any, B1: Any, B2: Any, u: Any, D_duty: float,
                Ts_list: Sequence[float],
                order: Union[int, BchOrder] = BchOrder.SECOND) -> ProbeResult:
    """
    Fit the convergence order of a BCH truncation against the exact logarithm.

    For each Ts the residual ||ac_from_bch(order) - Log(Phi(Ts)) / Ts||_F is
    computed and the slope of ln r against ln Ts is fitted by unweighted least
    squares. The SSA duty direction's distance from the exact gamma_x is
    recorded alongside.

    Args:
        A1, A2, B1, B2: Subinterval matrices
        u: Input vector
        D_duty: Duty cycle (fraction in the second subinterval)
        Ts_list: Strictly decreasing step sizes spanning at least 3 octaves
        order: BchOrder

    Returns:
        ProbeResult; slope is NaN and exact is True when every relative
        residual is at machine precision
    """
    ts = _validate_ts_list(Ts_list)
    order = as_bch_order(order)
    A1 = as_matrix(A1, 'A1')
    A2 = as_matrix(A2, 'A2')

    residuals, relative, directions = [], [], []
    b_ssa = _ssa_direction_or_none(A1, A2, B1, B2, u, D_duty)
    for Ts in ts:
        cycle = SwitchingCycle.two_phase(A1, B1, A2, B2, u, D_duty, Ts)
        first, second = cycle.subintervals
        pmap = poincare_map(cycle)
        try:
            A_exact = mat_log_principal(pmap.Phi) / Ts
        except NoRealPrincipalLog as e:
            raise ProbeInfeasible(f"no principal logarithm at Ts = {Ts:.6g}: {e}") from e

        A_trunc = ac_from_bch(first.A, first.T, second.A, second.T, order)
        r = fro_norm(A_trunc - A_exact)
        residuals.append(r)
        relative.append(r / max(fro_norm(A_exact), np.finfo(float).tiny))
        directions.append(_direction_gap(cycle, pmap, b_ssa))
        logger.debug("probe Ts=%.6g residual=%.6e", Ts, r)

    residuals = np.array(residuals)
    exact = bool(np.all(np.array(relative) <= ProbeDefaults.EXACT_RTOL))
    if exact:
        slope = math.nan
    else:
        slope = float(np.polyfit(np.log(ts), np.log(np.maximum(residuals, np.finfo(float).tiny)), 1)[0])

    return ProbeResult(slope=slope, Ts_list=ts, residuals=residuals,
                       direction_residuals=np.array(directions), exact=exact, order=order)


def _ssa_direction_or_none(A1, A2, B1, B2, u, D_duty) -> Optional[np.ndarray]:
    try:
        X_avg = averaged_equilibrium(A1, A2, B1, B2, u, D_duty)
    except SingularMatrix:
        logger.debug("averaged system is singular; duty-direction residuals skipped")
        return None
    return ssa_duty_direction(A1, A2, B1, B2, X_avg, u)


def _direction_gap(cycle: SwitchingCycle, pmap, b_ssa: Optional[np.ndarray]) -> float:
    """||b_d^SSA - gamma_x|| / ||gamma_x|| at one step size (NaN when undefined)."""
    if b_ssa is None:
        return math.nan
    try:
        gamma_x = duty_injection_direction(cycle, periodic_steady_state(pmap, cycle.u))
    except NoUniquePeriodicOrbit:
        return math.nan
    scale = fro_norm(gamma_x)
    return fro_norm(b_ssa - gamma_x) / scale if scale > 0 else fro_norm(b_ssa)
