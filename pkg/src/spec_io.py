"""
Spec I/O Module for pwlrec
Reads cycle specification files (JSON) and writes results as CSV.
"""

import json
import logging
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np
import pandas as pd

# Add parent directory to path for imports
sys.path.insert(0, str(Path(__file__).resolve().parent.parent))
from config.config import OUTPUT_DIR, OutputFormat, Tolerances
from src.exceptions import PwlRecError, SpecParseError
from src.pwlmap import SubintervalModel, SwitchingCycle
from src.smallmat import RealMatrix

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class CycleSpec:
    """A parsed cycle specification file."""
    name: str
    cycle: SwitchingCycle
    C: RealMatrix  # q x n output matrix
    D: RealMatrix  # q x 1 physical feedthrough
    duty: Optional[float]
    description: str = ''
    source: Optional[Path] = None


# =========================================================================
# NUMBER FORMATTING
# =========================================================================

def format_number(x: float) -> str:
    """
    12 significant digits; scientific notation outside [1e-3, 1e6].

    Zero prints as 0 and non-finite values as nan / inf / -inf.
    """
    x = float(x)
    if math.isnan(x):
        return 'nan'
    if math.isinf(x):
        return 'inf' if x > 0 else '-inf'
    if x == 0.0:
        return '0'
    digits = OutputFormat.SIGNIFICANT_DIGITS
    if OutputFormat.FIXED_MIN <= abs(x) < OutputFormat.FIXED_MAX:
        decimals = max(0, digits - 1 - int(math.floor(math.log10(abs(x)))))
        text = f"{x:.{decimals}f}"
        if '.' in text:
            text = text.rstrip('0').rstrip('.')
        return text
    return f"{x:.{digits - 1}e}"


def format_matrix(M: Any, indent: str = '  ') -> str:
    """Matrix as right-aligned columns of formatted numbers."""
    M = np.atleast_2d(np.asarray(M, dtype=float))
    cells = [[format_number(v) for v in row] for row in M]
    width = max((len(c) for row in cells for c in row), default=1)
    return '\n'.join(indent + '  '.join(c.rjust(width) for c in row) for row in cells)


# =========================================================================
# SPEC FILE PARSING
# =========================================================================

def _matrix_errors(value: Any, key: str, shape: tuple) -> List[str]:
    arr = np.asarray(value, dtype=float) if _is_numeric_table(value) else None
    if arr is None or arr.ndim != 2:
        return [f"'{key}' must be a 2-D array of numbers"]
    if arr.shape != shape:
        return [f"'{key}' has shape {arr.shape}, expected {shape}"]
    if not np.all(np.isfinite(arr)):
        return [f"'{key}' contains non-finite entries"]
    return []


def _is_numeric_table(value: Any) -> bool:
    if not isinstance(value, list) or not value:
        return False
    rows = [row for row in value if isinstance(row, list)]
    if len(rows) != len(value) or len({len(row) for row in rows}) != 1:
        return False
    return all(isinstance(v, (int, float)) and not isinstance(v, bool) for row in rows for v in row)


def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool) and math.isfinite(value)


def validate_cycle_document(doc: Dict[str, Any]) -> List[str]:
    """
    Validate a decoded cycle specification.

    Returns:
        List of validation errors (empty if valid)
    """
    errors = []
    if not isinstance(doc, dict):
        return ["top level must be a JSON object"]

    required = ['state_dim', 'input_dim', 'Ts_seconds', 'u', 'subintervals', 'output_C']
    for key in required:
        if key not in doc:
            errors.append(f"required key '{key}' missing")
    if errors:
        return errors

    n, p = doc['state_dim'], doc['input_dim']
    if not (isinstance(n, int) and n > 0) or not (isinstance(p, int) and p > 0):
        return ["'state_dim' and 'input_dim' must be positive integers"]

    Ts = doc['Ts_seconds']
    if not _is_number(Ts) or Ts <= 0:
        errors.append("'Ts_seconds' must be a positive number")

    u = doc['u']
    if not (isinstance(u, list) and len(u) == p and all(_is_number(v) for v in u)):
        errors.append(f"'u' must be an array of {p} numbers")

    subs = doc['subintervals']
    if not isinstance(subs, list) or not subs:
        errors.append("'subintervals' must be a non-empty array")
        subs = []
    total = 0.0
    for i, sub in enumerate(subs, start=1):
        if not isinstance(sub, dict):
            errors.append(f"subinterval {i} must be an object")
            continue
        for key in ('A', 'B', 'T_seconds'):
            if key not in sub:
                errors.append(f"subinterval {i}: key '{key}' missing")
        if 'A' in sub:
            errors += [f"subinterval {i}: {e}" for e in _matrix_errors(sub['A'], 'A', (n, n))]
        if 'B' in sub:
            errors += [f"subinterval {i}: {e}" for e in _matrix_errors(sub['B'], 'B', (n, p))]
        if 'T_seconds' in sub:
            if not _is_number(sub['T_seconds']) or sub['T_seconds'] <= 0:
                errors.append(f"subinterval {i}: 'T_seconds' must be a positive number")
            else:
                total += sub['T_seconds']

    if _is_number(Ts) and Ts > 0 and subs and abs(total - Ts) > Tolerances.SPEC_PERIOD_RTOL * Ts:
        errors.append(f"subinterval durations sum to {total!r}, 'Ts_seconds' is {Ts!r}")

    C = doc['output_C']
    q = len(C) if isinstance(C, list) else 0
    errors += _matrix_errors(C, 'output_C', (q, n))
    if 'output_D' in doc:
        errors += _matrix_errors(doc['output_D'], 'output_D', (q, 1))
    if 'reset' in doc:
        errors += _matrix_errors(doc['reset'], 'reset', (n, n))

    if 'duty' in doc:
        duty = doc['duty']
        if not _is_number(duty) or not 0.0 < duty < 1.0:
            errors.append("'duty' must be a number strictly between 0 and 1")
        elif len(subs) == 2 and _is_number(Ts) and isinstance(subs[1], dict) \
                and _is_number(subs[1].get('T_seconds')):
            if abs(subs[1]['T_seconds'] - duty * Ts) > Tolerances.SPEC_PERIOD_RTOL * Ts:
                errors.append(f"'duty' {duty!r} does not match the second subinterval duration")
    return errors


def parse_cycle_spec(text: str, name: str = 'cycle', source: Optional[Path] = None) -> CycleSpec:
    """
    Parse a cycle specification from JSON text.

    Raises:
        SpecParseError: malformed JSON (with line/column) or invalid content
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise SpecParseError(e.msg, line=e.lineno, column=e.colno) from e

    errors = validate_cycle_document(doc)
    if errors:
        raise SpecParseError(f"Validation errors: {'; '.join(errors)}")

    subintervals = tuple(SubintervalModel(sub['A'], sub['B'], sub['T_seconds'])
                         for sub in doc['subintervals'])
    C = np.asarray(doc['output_C'], dtype=float)
    D = np.asarray(doc.get('output_D', np.zeros((C.shape[0], 1))), dtype=float)

    duty = doc.get('duty')
    if duty is None and len(subintervals) == 2:
        duty = subintervals[1].T / doc['Ts_seconds']
        logger.warning("'duty' not given; using T2 / Ts = %.6g", duty)

    try:
        cycle = SwitchingCycle(subintervals=subintervals, u=doc['u'], reset=doc.get('reset'))
    except PwlRecError as e:
        raise SpecParseError(str(e)) from e

    return CycleSpec(name=doc.get('name', name), cycle=cycle, C=C, D=D, duty=duty,
                     description=doc.get('description', ''), source=source)


def load_cycle_spec(path: Union[str, Path]) -> CycleSpec:
    """Read and parse a cycle specification file."""
    path = Path(path)
    try:
        text = path.read_text(encoding='utf-8')
    except OSError as e:
        raise SpecParseError(f"cannot read {path}: {e.strerror}") from e
    spec = parse_cycle_spec(text, name=path.stem, source=path)
    logger.info("loaded cycle spec %s (n=%d, p=%d, m=%d)", spec.name, spec.cycle.n,
                spec.cycle.p, spec.cycle.m)
    return spec


# =========================================================================
# CSV EXPORT
# =========================================================================

class ResultExporter:
    """
    Writes result tables as CSV (header row, LF line endings, UTF-8).
    """

    def __init__(self, output_dir: Optional[Path] = None):
        """
        Initialize the exporter.

        Args:
            output_dir: Directory for CSV files (default: output/)
        """
        self.output_dir = Path(output_dir) if output_dir is not None else OUTPUT_DIR
        self.output_dir.mkdir(parents=True, exist_ok=True)

    @staticmethod
    def matrices_frame(matrices: Dict[str, Any]) -> pd.DataFrame:
        """Long-format table quantity,row,col,value of named matrices and vectors."""
        records = []
        for quantity, value in matrices.items():
            arr = np.asarray(value, dtype=float)
            if arr.ndim == 1:
                arr = arr.reshape(-1, 1)
            for (r, c), v in np.ndenumerate(arr):
                records.append({'quantity': quantity, 'row': r, 'col': c, 'value': v})
        return pd.DataFrame(records, columns=['quantity', 'row', 'col', 'value'])

    def write_frame(self, df: pd.DataFrame, filename: str) -> Path:
        """Write a DataFrame with every float formatted by format_number."""
        output_path = self.output_dir / filename
        formatted = df.copy()
        for col in formatted.columns:
            if pd.api.types.is_float_dtype(formatted[col]):
                formatted[col] = formatted[col].map(format_number)
        formatted.to_csv(output_path, index=False, lineterminator='\n', encoding='utf-8')
        logger.info("wrote %s (%d rows)", output_path, len(formatted))
        return output_path

    def write_matrices(self, matrices: Dict[str, Any], filename: str) -> Path:
        return self.write_frame(self.matrices_frame(matrices), filename)
