"""
pwlrec
Sampled-data reconstruction of piecewise-linear switching systems

Builds the exact one-period map of a switching cycle, turns its discrete
baseline into continuous-time surrogates (exact logarithm, real lift,
truncated BCH, state-space averaging) and compares them in frequency.
"""

__version__ = "1.0.0"
__author__ = "Power Electronics Modeling Team"
