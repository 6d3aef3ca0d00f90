"""Command line entry point: ``run``, ``presets``, ``render`` and ``converge``."""
import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

from qla2d import __version__
from qla2d.analysis.convergence import describe, refinement_study
from qla2d.cli.heatmap import MAPPINGS, render_heatmap, write_pgm, write_png
from qla2d.cli.run_config import load_config
from qla2d.cli.scenario import EXIT_CONFIG, EXIT_OK, exit_status_for, run_scenario
from qla2d.cli.snapshots import read_snapshot
from qla2d.config import Config
from qla2d.errors import QLAError
from qla2d.physics.pulses import scenario_presets
from qla2d.utils.logging import configure_logging

logger = logging.getLogger(__name__)


def _print_error(error: BaseException) -> None:
    print(json.dumps({'error': type(error).__name__, 'message': str(error)}), file=sys.stderr)


def cmd_run(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    result = run_scenario(cfg, args.output_dir)
    print(json.dumps({
        'exit_status': result.exit_status,
        'output_dir': str(result.output_dir),
        'final_t': result.final_t,
        'energy_drift': result.ledger.max_relative_drift(),
        'error': result.error,
    }))
    return result.exit_status


def cmd_presets(args: argparse.Namespace) -> int:
    table = scenario_presets()
    if args.json:
        print(table.to_json(orient='records'))
    else:
        print(table.to_string(index=False))
    return EXIT_OK


def cmd_render(args: argparse.Namespace) -> int:
    snap = read_snapshot(args.snapshot)
    component = snap.ncomp - 1 if args.component is None else args.component
    if not 0 <= component < snap.ncomp:
        raise ValueError(f"component {component} not in snapshot with {snap.ncomp} components")
    image = render_heatmap(snap.data[component], args.mapping)
    out = Path(args.output) if args.output else Path(args.snapshot).with_suffix('.pgm')
    if out.suffix.lower() == '.png':
        write_png(out, image)
    else:
        write_pgm(out, image)
    print(str(out))
    return EXIT_OK


def cmd_converge(args: argparse.Namespace) -> int:
    results, fitted = refinement_study(args.eps, args.wavelength, args.levels, args.n, args.order)
    print(describe(results, fitted))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='qla2d', description='Qubit lattice Maxwell solver for dielectric interfaces')
    parser.add_argument('--version', action='version', version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest='command', required=True)

    p_run = sub.add_parser('run', help='run a configured scenario')
    p_run.add_argument('config', help='path to a key = value run config')
    p_run.add_argument('--output-dir', default=None, help='overrides output.dir and QLA2D_OUTPUT_DIR')
    p_run.set_defaults(func=cmd_run)

    p_presets = sub.add_parser('presets', help='list the scenario table')
    p_presets.add_argument('--json', action='store_true')
    p_presets.set_defaults(func=cmd_presets)

    p_render = sub.add_parser('render', help='render a snapshot component as a heatmap')
    p_render.add_argument('snapshot')
    p_render.add_argument('--component', type=int, default=None,
                          help='component index; defaults to the last one (H_z for a full field)')
    p_render.add_argument('--mapping', choices=MAPPINGS, default='positive')
    p_render.add_argument('--output', '-o', default=None, help='.pgm or .png path')
    p_render.set_defaults(func=cmd_render)

    p_conv = sub.add_parser('converge', help='plane-wave dispersion refinement study')
    p_conv.add_argument('--eps', type=float, default=0.2)
    p_conv.add_argument('--wavelength', type=int, default=16)
    p_conv.add_argument('--levels', type=int, default=3)
    p_conv.add_argument('--n', type=float, default=1.0)
    p_conv.add_argument('--order', type=int, choices=(1, 2), default=2)
    p_conv.set_defaults(func=cmd_converge)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(Config.log_level())
    try:
        return args.func(args)
    except QLAError as e:
        _print_error(e)
        return exit_status_for(e)
    except ValueError as e:
        _print_error(e)
        return EXIT_CONFIG


if __name__ == '__main__':
    sys.exit(main())
