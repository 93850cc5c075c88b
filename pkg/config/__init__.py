"""Configuration module for pwlrec."""
from .config import (
    BASE_DIR, DATA_DIR, CYCLES_DIR, OUTPUT_DIR,
    Tolerances, GridDefaults, ProbeDefaults, OutputFormat, SurrogateMethods
)

__all__ = [
    'BASE_DIR', 'DATA_DIR', 'CYCLES_DIR', 'OUTPUT_DIR',
    'Tolerances', 'GridDefaults', 'ProbeDefaults', 'OutputFormat', 'SurrogateMethods'
]
