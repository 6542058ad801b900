#!/usr/bin/env python3
"""
FCI Lattice Toolkit Command Line
================================

Subcommands for classical ground states, HK Chern numbers, td phase
diagrams, composite sector Chern numbers and exact diagonalization.

Exit status: 0 success, 1 domain failure, 2 usage error.
"""

import argparse
import json
import logging
import os
import re
import sys
import time
from pathlib import Path
from typing import Any, Dict, List

# Add parent directory to path for fcilab import
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from fcilab import (
    DOMAIN_ERRORS,
    CouplingConstants,
    HKParams,
    LatticeError,
    LoopSpec,
    RunManifest,
    TorusLattice,
    TwistGrid,
    __version__,
)
from fcilab.chern import compute_chern, curvature_map, phase_diagram
from fcilab.classical import count_min_energy_configs_dp, enumerate_ground_states
from fcilab.composite import composite_chern, specs_from_params
from fcilab.config import DEFAULT_LIMITS
from fcilab.ed import (
    build_many_body,
    composite_many_body_chern,
    low_spectrum,
    strong_coupling_scan,
)
from fcilab.hk import band_structure_csv, hk_size
from fcilab.utils import (
    file_digest,
    manifest_path,
    normalize,
    parse_float_list,
    parse_pair,
    parse_range,
    write_csv,
    write_json,
)

logger = logging.getLogger("fci")

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

# Values such as -1:1:0.25 or -1,1,1 are arguments, not flags
NUMERIC_VALUE = re.compile(r'^-\.?\d[\d.,:eE+-]*$')


# ===== Argument types =====

def lattice_arg(text: str) -> TorusLattice:
    try:
        return TorusLattice.parse(text)
    except LatticeError as e:
        raise argparse.ArgumentTypeError(str(e))


def shape_arg(text: str):
    try:
        width, height = (int(part) for part in text.lower().split('x'))
    except ValueError:
        raise argparse.ArgumentTypeError(f"size must look like WxH, got {text!r}")
    return width, height


def params_arg(text: str) -> HKParams:
    try:
        return HKParams.parse(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e))


def range_arg(text: str) -> List[float]:
    try:
        return parse_range(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e))


def float_list_arg(text: str) -> List[float]:
    try:
        return parse_float_list(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e))


def pair_arg(text: str):
    try:
        return parse_pair(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e))


# ===== Output =====

class RunRecorder:
    """Collects output files and writes the sidecar manifest"""

    def __init__(self, subcommand: str, args: argparse.Namespace):
        self.subcommand = subcommand
        self.parameters = {
            key: _parameter(value) for key, value in sorted(vars(args).items())
            if key not in ('handler', 'verbose')
        }
        self.outputs: List[Path] = []
        self.started = time.perf_counter()

    def add(self, path) -> None:
        self.outputs.append(Path(path))

    def finish(self, out) -> None:
        if out is None:
            return
        manifest = RunManifest(
            subcommand=self.subcommand,
            parameters=self.parameters,
            version=__version__,
            wall_time=time.perf_counter() - self.started,
            outputs={str(path): file_digest(path) for path in self.outputs},
        )
        target = manifest_path(out)
        with open(target, 'w', encoding='utf-8', newline='\n') as f:
            json.dump(normalize(manifest.to_dict()), f, indent=2)
            f.write('\n')


def _parameter(value: Any) -> Any:
    if isinstance(value, TorusLattice):
        return str(value)
    if isinstance(value, HKParams):
        return value.to_dict()
    if isinstance(value, (list, tuple)):
        return [_parameter(item) for item in value]
    return value


def emit_json(data: Dict[str, Any], out, recorder: RunRecorder) -> None:
    if out is None:
        print(json.dumps(normalize(data), indent=2))
        return
    recorder.add(write_json(out, data))


# ===== Subcommands =====

def cmd_classical(args: argparse.Namespace, recorder: RunRecorder) -> int:
    couplings = CouplingConstants(args.g1, args.g2)
    report = enumerate_ground_states(args.size, args.particles, couplings, args.mode, DEFAULT_LIMITS, args.jobs)
    data = report.to_dict()
    if args.dp:
        data['dp_zero_energy_count'] = count_min_energy_configs_dp(args.size, args.particles)
    print(f"Minimum pair counts: m1={report.minimum.m1}, m2={report.minimum.m2}", file=sys.stderr)
    print(f"Degeneracy: {report.degeneracy}", file=sys.stderr)
    emit_json(data, args.out, recorder)
    return 0


def cmd_chern(args: argparse.Namespace, recorder: RunRecorder) -> int:
    params = HKParams(args.t1, args.t2, args.td)
    result = compute_chern(params, args.method, args.grid, LoopSpec(args.eps, args.steps))
    if args.map:
        field = curvature_map(params, args.grid)
        recorder.add(write_csv(args.map, ('k1', 'k2', 'F'), field.rows()))
    if args.bands:
        band_structure_csv(params, args.grid, args.bands)
        recorder.add(args.bands)
    print(f"Chern number ({args.method}): {result.chern:+d}", file=sys.stderr)
    emit_json(result.to_dict(), args.out, recorder)
    return 0


def cmd_phase_diagram(args: argparse.Namespace, recorder: RunRecorder) -> int:
    rows = phase_diagram(args.t1, args.t2, args.td_range, args.grid, args.jobs)
    table = [
        (row.td, row.gap, row.chern if row.status == 'ok' else row.status)
        for row in rows
    ]
    recorder.add(write_csv(args.out, ('td', 'gap', 'chern'), table))
    failures = sum(1 for row in rows if row.status == 'error')
    if failures:
        print(f"Warnings: {failures} point(s) failed", file=sys.stderr)
    print(f"Wrote {len(rows)} rows to {args.out}", file=sys.stderr)
    return 0


def cmd_composite(args: argparse.Namespace, recorder: RunRecorder) -> int:
    specs = specs_from_params(args.sector_params, args.origin)
    report = composite_chern(specs, args.method, args.grid, args.size)
    data = report.to_dict()
    if args.many_body:
        size = hk_size(*args.green_size)
        average = composite_many_body_chern(specs, size, TwistGrid(args.twist_grid), jobs=args.jobs)
        data['many_body_average'] = str(average)
    print(f"Sigma: {list(report.sigma)}  average: {report.average}  phase: {report.phase}", file=sys.stderr)
    emit_json(data, args.out, recorder)
    return 0


def cmd_ed(args: argparse.Namespace, recorder: RunRecorder) -> int:
    specs = specs_from_params(args.sector_params)
    table_path = Path(args.out).with_suffix('.table.csv')

    if args.scan_g1:
        report = strong_coupling_scan(args.size, args.particles, specs, args.g2, args.scan_g1,
                                      args.t_scale, args.t_nn)
        recorder.add(write_csv(table_path, ('g1', 'max_deviation', 'intruders'),
                               [(row.g1, row.max_deviation, row.intruders) for row in report.rows]))
        data = report.to_dict()
        print(f"Deviations decreasing: {report.decreasing}", file=sys.stderr)
    else:
        scaled = specs_from_params([spec.params.scaled(args.t_scale) for spec in specs])
        hamiltonian = build_many_body(args.size, args.particles, scaled,
                                      CouplingConstants(args.g1, args.g2), tuple(args.twists), args.t_nn)
        levels = min(args.levels, hamiltonian.dimension)
        spectrum = low_spectrum(hamiltonian, levels)
        recorder.add(write_csv(table_path, ('index', 'energy'), enumerate(spectrum.energies)))
        data = {'lattice': args.size.to_dict(), 'particles': args.particles,
                'dimension': hamiltonian.dimension, **spectrum.to_dict()}
        print(f"Multiplets: {spectrum.multiplicities}", file=sys.stderr)
    recorder.add(write_json(args.out, data))
    return 0


# ===== Parser =====

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='fci',
        description="Fractional Chern insulator lattice toolkit",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Classical ground states at filling 3/8 on the 4x4 torus
  fci classical --size 4x4 --particles 6 --mode lex --out gs.json

  # Chern number of the HK lower band
  fci chern --t1 1 --t2 1 --td 1 --method plaquette --grid 24 --map curvature.csv

  # Chern number across td
  fci phase-diagram --td-range -1:1:0.25 --t1 1 --t2 1 --jobs 4 --out phase.csv

  # Sector-averaged Chern number
  fci composite --sector-params 1,1,1 1,1,1 1,1,1 1,1,-1

  # Strong-coupling convergence scan
  fci ed --size 4x4 --particles 6 --g2 5 --sector-params 1,1,0.5 1,1,0.5 1,1,0.5 1,1,0.5 \\
         --scan-g1 100,1000,10000 --out scan.json
        """
    )
    parser.add_argument('-v', '--verbose', action='count', default=0, help='INFO with -v, DEBUG with -vv')
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    subparsers = parser.add_subparsers(dest='command', metavar='COMMAND')
    subparsers.required = True

    # classical
    classical = subparsers.add_parser('classical', help='Exhaustive classical ground states')
    classical.add_argument('--size', type=lattice_arg, required=True, help='Torus size WxH')
    classical.add_argument('--particles', type=int, required=True, help='Fermion number')
    classical.add_argument('--g1', type=float, default=100.0, help='U1/U3 coupling (default: 100)')
    classical.add_argument('--g2', type=float, default=1.0, help='U2 coupling (default: 1)')
    classical.add_argument('--mode', choices=('numeric', 'lex', 'lexicographic'), default='numeric',
                           help='Energy ordering (default: numeric)')
    classical.add_argument('--dp', action='store_true', help='Also count zero-energy configurations by transfer matrix')
    classical.add_argument('--jobs', type=int, default=1, help='Worker processes (default: 1)')
    classical.add_argument('--out', help='Report JSON path (default: stdout)')
    classical.set_defaults(handler=cmd_classical)

    # chern
    chern = subparsers.add_parser('chern', help='Chern number of the HK lower band')
    chern.add_argument('--t1', type=float, required=True)
    chern.add_argument('--t2', type=float, required=True)
    chern.add_argument('--td', type=float, required=True)
    chern.add_argument('--grid', type=int, default=24, help='Brillouin-zone mesh size (default: 24)')
    chern.add_argument('--method', choices=('plaquette', 'analytic', 'loop'), default='plaquette')
    chern.add_argument('--eps', type=float, default=0.05, help='Loop scale (default: 0.05)')
    chern.add_argument('--steps', type=int, default=2048, help='Loop quadrature points (default: 2048)')
    chern.add_argument('--map', metavar='PATH', help='Write the curvature CSV')
    chern.add_argument('--bands', metavar='PATH', help='Write the band-structure CSV')
    chern.add_argument('--out', help='Result JSON path (default: stdout)')
    chern.set_defaults(handler=cmd_chern)

    # phase-diagram
    diagram = subparsers.add_parser('phase-diagram', help='Gap and Chern number along a td sweep')
    diagram.add_argument('--td-range', type=range_arg, required=True, metavar='A:B:STEP')
    diagram.add_argument('--t1', type=float, default=1.0)
    diagram.add_argument('--t2', type=float, default=1.0)
    diagram.add_argument('--grid', type=int, default=24)
    diagram.add_argument('--jobs', type=int, default=1)
    diagram.add_argument('--out', required=True, help='CSV path')
    diagram.set_defaults(handler=cmd_phase_diagram)

    # composite
    composite = subparsers.add_parser('composite', help='Sector Chern vector and averaged Chern number')
    composite.add_argument('--sector-params', type=params_arg, nargs=4, required=True, metavar='T1,T2,TD',
                           help='Parameters of sectors (0,0) (1,0) (0,1) (1,1)')
    composite.add_argument('--method', choices=('plaquette', 'analytic'), default='plaquette')
    composite.add_argument('--grid', type=int, default=24)
    composite.add_argument('--size', type=lattice_arg, default=TorusLattice(8, 8),
                           help='Torus for the translation checks (default: 8x8)')
    composite.add_argument('--origin', type=int, default=0, help='Alternation origin of every copy')
    composite.add_argument('--many-body', action='store_true', help='Also average twist-torus Slater Chern numbers')
    composite.add_argument('--green-size', type=shape_arg, default=(4, 4), help='Green lattice WxH (default: 4x4)')
    composite.add_argument('--twist-grid', type=int, default=8)
    composite.add_argument('--jobs', type=int, default=1)
    composite.add_argument('--out', help='Report JSON path (default: stdout)')
    composite.set_defaults(handler=cmd_composite)

    # ed
    ed = subparsers.add_parser('ed', help='Exact diagonalization on a small torus')
    ed.add_argument('--size', type=lattice_arg, required=True)
    ed.add_argument('--particles', type=int, required=True)
    ed.add_argument('--g1', type=float, default=100.0)
    ed.add_argument('--g2', type=float, default=1.0)
    ed.add_argument('--sector-params', type=params_arg, nargs=4, metavar='T1,T2,TD',
                    default=[HKParams(1.0, 1.0, 1.0)] * 4)
    ed.add_argument('--twists', type=pair_arg, default=(0.0, 0.0), metavar='THETA1,THETA2')
    ed.add_argument('--levels', type=int, default=8, help='Number of low levels (default: 8)')
    ed.add_argument('--scan-g1', type=float_list_arg, metavar='G1,G1,...', help='Run the strong-coupling scan')
    ed.add_argument('--t-scale', type=float, default=1.0, help='Multiplier on all sector hoppings')
    ed.add_argument('--t-nn', type=float, default=0.0, help='Nearest-neighbour hop between sublattices')
    ed.add_argument('--out', required=True, help='JSON path; the table goes next to it as <stem>.table.csv')
    ed.set_defaults(handler=cmd_ed)

    for sub in (parser, *subparsers.choices.values()):
        sub._negative_number_matcher = NUMERIC_VALUE

    return parser


def main(argv=None):
    """Main entry point"""
    parser = build_parser()
    args = parser.parse_args(argv)

    level = logging.WARNING if args.verbose == 0 else logging.INFO if args.verbose == 1 else logging.DEBUG
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr)

    if getattr(args, 'mode', None) == 'lex':
        args.mode = 'lexicographic'

    recorder = RunRecorder(args.command, args)
    try:
        status = args.handler(args, recorder)
        recorder.finish(args.out)
    except DOMAIN_ERRORS as e:
        print(f"Error: {type(e).__name__}: {e}", file=sys.stderr)
        sys.exit(1)
    except ValueError as e:
        print(f"Error: {e}", file=sys.stderr)
        sys.exit(1)

    sys.exit(status)


if __name__ == "__main__":
    main()
