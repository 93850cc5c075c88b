"""
pwlrec - Configuration
Sampled-data reconstruction of piecewise-linear switching systems
"""

from pathlib import Path

# Base Paths
BASE_DIR = Path(__file__).resolve().parent.parent
DATA_DIR = BASE_DIR / "data"
CYCLES_DIR = DATA_DIR / "cycles"
OUTPUT_DIR = BASE_DIR / "output"


# Numerical tolerances (relative unless noted)
class Tolerances:
    # Smallest singular value below this times the max-abs entry => singular
    SINGULAR_RTOL = 1e-12

    # Eigenvalue on the closed negative real axis, relative to spectral scale
    NEG_REAL_AXIS_RTOL = 1e-10

    # Imaginary residue tolerated (and discarded) in a real logarithm
    LOG_IMAG_RTOL = 1e-10

    # |det(I - Phi)| below this times max(1, ||Phi||^n) => no unique orbit
    PERIODIC_ORBIT_RTOL = 1e-12

    # Stored period vs sum of subinterval durations
    CYCLE_PERIOD_RTOL = 1e-12
    SPEC_PERIOD_RTOL = 1e-9

    # sI - A (or zI - A) treated as singular at a pole
    POLE_RTOL = 1e-12

    # Real-lift admissibility
    LIFT_EIG_RTOL = 1e-12
    LIFT_MIN_SIN = 1e-8

    # |Delta^2| below this switches exp2x2 to its series form
    DELTA_SERIES_THRESHOLD = 1e-6

    # e^{A_c Ts} vs the transition it came from (PASS/FAIL in the CLI)
    EXP_CHECK_RTOL = 1e-8


# Frequency sweep defaults
class GridDefaults:
    POINTS = 200
    LOW_FRACTION = 1e-3  # of Nyquist (pi/Ts)
    HIGH_FRACTION = 0.99
    REL_ERR_FLOOR = 1e-300
    CHANNEL = (0, 0)  # (output index, input index)


# Order-of-accuracy probe defaults
class ProbeDefaults:
    TS_POINTS = 4
    TS_SPAN_OCTAVES = 3
    MIN_POINTS = 4
    MIN_OCTAVES = 3
    # Residual relative to ||A_exact|| below which the truncation is exact
    EXACT_RTOL = 1e-12


# Printed and CSV number format
class OutputFormat:
    SIGNIFICANT_DIGITS = 12
    FIXED_MIN = 1e-3
    FIXED_MAX = 1e6


# Surrogate construction methods
class SurrogateMethods:
    EXACT_LOG = 'exact-log'
    REAL_LIFT = 'real-lift'
    BCH2 = 'bch2'
    BCH4 = 'bch4'
    SSA = 'ssa'
    AUTO = 'auto'

    RECONSTRUCT_CHOICES = (EXACT_LOG, BCH2, BCH4, SSA, AUTO)
    COMPARE_CHOICES = (EXACT_LOG, BCH2, BCH4, SSA, AUTO)

    # Duty forcing: gamma_x at X* (nominal) or exact map derivative
    INJECTION_CHOICES = ('nominal', 'exact')
    DEFAULT_INJECTION = 'nominal'
