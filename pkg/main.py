#!/usr/bin/env python3
"""
pwlrec - Sampled-data reconstruction of piecewise-linear switching systems
Main Application Entry Point

This tool provides:
- Exact one-period (Poincare) maps, periodic steady state and duty injection
- Continuous-time surrogates via matrix logarithms (exact, real-lift, BCH, SSA)
- Bode-style comparison of surrogates against the discrete baseline
- BCH order-of-accuracy probe
"""

import argparse
import logging
import sys
from pathlib import Path

# Add project root to path
PROJECT_ROOT = Path(__file__).resolve().parent
sys.path.insert(0, str(PROJECT_ROOT))

from config.config import GridDefaults, ProbeDefaults, SurrogateMethods
from src.exceptions import PwlRecError


def _load_model(spec_path: str, injection: str):
    from src.pipeline import ConverterModel
    from src.spec_io import load_cycle_spec

    return ConverterModel(load_cycle_spec(spec_path), injection=injection)


def _print_matrix(label: str, value):
    from src.spec_io import format_matrix
    import numpy as np

    arr = np.asarray(value)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    print(f"{label} ({arr.shape[0]}x{arr.shape[1]}):")
    print(format_matrix(arr))


def run_map(spec_path: str, out_dir: str = None, injection: str = 'nominal'):
    """Print the one-period map, steady state and duty-injection direction."""
    from src.spec_io import ResultExporter

    model = _load_model(spec_path, injection)
    cycle = model.cycle
    print("=" * 70)
    print(f"POINCARE MAP - {model.spec.name}")
    print(f"n = {cycle.n}, p = {cycle.p}, m = {cycle.m}, Ts = {cycle.Ts!r} s")
    print("=" * 70)

    quantities = model.map_quantities()
    for label, value in quantities.items():
        _print_matrix(label, value)
    if cycle.m != 2:
        print("gamma_x: not defined (duty injection needs two subintervals)")

    if out_dir:
        path = ResultExporter(Path(out_dir)).write_matrices(quantities, 'map.csv')
        print(f"\nWritten: {path}")
    return model


def run_reconstruct(spec_path: str, method: str = 'auto', out_dir: str = None,
                    injection: str = 'nominal'):
    """Print the reconstructed surrogate quadruple."""
    from src.spec_io import ResultExporter

    model = _load_model(spec_path, injection)
    surrogate = model.surrogate(method)
    print("=" * 70)
    print(f"SURROGATE - {model.spec.name}")
    print(f"method: {surrogate.method_tag} (requested {method})")
    print(f"lifted: {'yes' if surrogate.lifted else 'no'}")
    print("=" * 70)

    quadruple = {'A_c': surrogate.A_c, 'B_c': surrogate.B_c,
                 'C_c': surrogate.C_c, 'D_c': surrogate.D_c}
    for label, value in quadruple.items():
        _print_matrix(label, value)

    check = model.transition_check(surrogate)
    if check is not None:
        residual, passed = check
        target = 'S_ext' if surrogate.lifted else 'Phi'
        print(f"exp(A_c Ts) = {target} check: {'PASS' if passed else 'FAIL'} (rel. error {residual:.3e})")

    if out_dir:
        path = ResultExporter(Path(out_dir)).write_matrices(quadruple, 'surrogate.csv')
        print(f"\nWritten: {path}")
    return surrogate


def run_compare(spec_path: str, methods, fmin: float = None, fmax: float = None,
                points: int = GridDefaults.POINTS, out_dir: str = None,
                injection: str = 'nominal', channel=GridDefaults.CHANNEL):
    """Write the comparison table as CSV (stdout when no --out is given)."""
    from src.freqsweep import FrequencyGrid, rows_to_frame
    from src.spec_io import ResultExporter, format_number

    model = _load_model(spec_path, injection)
    Ts = model.cycle.Ts
    if fmin is None and fmax is None:
        grid = FrequencyGrid.default(Ts, points)
    else:
        nyquist_hz = 0.5 / Ts
        fmin = fmin if fmin is not None else GridDefaults.LOW_FRACTION * nyquist_hz
        fmax = fmax if fmax is not None else GridDefaults.HIGH_FRACTION * nyquist_hz
        grid = FrequencyGrid.from_hz(fmin, fmax, points, Ts)

    rows = model.compare(methods, grid, channel=channel)
    df = rows_to_frame(rows)

    if out_dir:
        path = ResultExporter(Path(out_dir)).write_frame(df, 'compare.csv')
        print(f"Written: {path}")
    else:
        formatted = df.copy()
        for col in formatted.columns:
            formatted[col] = formatted[col].map(format_number)
        sys.stdout.write(formatted.to_csv(index=False, lineterminator='\n'))
    return rows


def run_probe(spec_path: str, order: int = 2, ts_points: int = ProbeDefaults.TS_POINTS,
              ts_span: float = ProbeDefaults.TS_SPAN_OCTAVES):
    """Print the fitted BCH truncation order."""
    from src.spec_io import format_number

    model = _load_model(spec_path, 'nominal')
    result = model.probe(order, ts_points, ts_span)
    print("=" * 70)
    print(f"ORDER PROBE - {model.spec.name} (BCH order {int(result.order)})")
    print("=" * 70)
    print(f"{'Ts [s]':>20} {'residual':>20} {'|b_ssa - gamma_x|':>20}")
    for Ts, r, d in zip(result.Ts_list, result.residuals, result.direction_residuals):
        print(f"{format_number(Ts):>20} {format_number(r):>20} {format_number(d):>20}")
    if result.exact:
        print("slope: exact (residual at machine precision)")
    else:
        print(f"slope: {format_number(result.slope)}")
    return result


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='pwlrec',
        description='Sampled-data reconstruction of piecewise-linear switching systems',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python main.py map data/cycles/boost.json                  # Phi, Gamma, X*, gamma_x
  python main.py reconstruct data/cycles/boost.json --method exact-log
  python main.py reconstruct data/cycles/sign_symmetric.json # auto -> real lift
  python main.py compare data/cycles/boost.json --methods exact-log bch2 ssa --out output
  python main.py probe data/cycles/boost.json --order 1

Exit codes: 0 success, 2 input/parse error, 3 numerical/model error.
        """
    )

    parser.add_argument('command', choices=['map', 'reconstruct', 'compare', 'probe'],
                        help='Command to run')
    parser.add_argument('spec', help='Cycle specification file (JSON)')
    parser.add_argument('--out', '-o', help='Directory for CSV output')
    parser.add_argument('--method', choices=SurrogateMethods.RECONSTRUCT_CHOICES, default='auto',
                        help='Reconstruction method (reconstruct)')
    parser.add_argument('--methods', nargs='*', choices=SurrogateMethods.COMPARE_CHOICES,
                        default=[], help='Surrogates to compare (compare)')
    parser.add_argument('--fmin', type=float, help='Lowest frequency in Hz (compare)')
    parser.add_argument('--fmax', type=float, help='Highest frequency in Hz (compare)')
    parser.add_argument('--points', type=int, default=GridDefaults.POINTS,
                        help='Number of grid points (compare)')
    parser.add_argument('--output-index', type=int, default=GridDefaults.CHANNEL[0],
                        help='Output row reported by compare')
    parser.add_argument('--input-index', type=int, default=GridDefaults.CHANNEL[1],
                        help='Input column reported by compare')
    parser.add_argument('--order', type=int, choices=[1, 2], default=2,
                        help='BCH truncation order (probe)')
    parser.add_argument('--ts-points', type=int, default=ProbeDefaults.TS_POINTS,
                        help='Number of step sizes (probe)')
    parser.add_argument('--ts-span', type=float, default=ProbeDefaults.TS_SPAN_OCTAVES,
                        help='Octaves spanned by the step sizes (probe)')
    parser.add_argument('--injection', choices=SurrogateMethods.INJECTION_CHOICES,
                        default=SurrogateMethods.DEFAULT_INJECTION,
                        help='Duty forcing: gamma_x at X* (nominal) or exact map derivative')
    parser.add_argument('--verbose', '-v', action='store_true', help='Log progress')
    return parser


def main(argv=None) -> int:
    """Main entry point."""
    parser = build_parser()
    args = parser.parse_args(argv)

    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format='%(levelname)s %(name)s: %(message)s', stream=sys.stderr)

    try:
        if args.command == 'map':
            run_map(args.spec, args.out, args.injection)
        elif args.command == 'reconstruct':
            run_reconstruct(args.spec, args.method, args.out, args.injection)
        elif args.command == 'compare':
            run_compare(args.spec, args.methods, args.fmin, args.fmax, args.points, args.out,
                        args.injection, (args.output_index, args.input_index))
        elif args.command == 'probe':
            run_probe(args.spec, args.order, args.ts_points, args.ts_span)
    except PwlRecError as e:
        print(f"{type(e).__name__}: {e}", file=sys.stderr)
        return e.exit_code
    return 0


if __name__ == '__main__':
    sys.exit(main())
