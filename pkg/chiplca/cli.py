#!/usr/bin/env python3
import argparse
import json
import sys
import typing as TYPE
from logging import getLogger

from logfunc import logf

from . import msgs as MSGS
from . import version
from .cli_utils import (
    parse_cli_arg_aliases,
    parse_grid,
    parse_values,
    write_output,
)
from .common import YieldVariant
from .config import MC_TRIALS, MM2_PER_CM2
from .ex import ChipLCAError, SweepError
from .inventory import aggregate_materials, load_inventory
from .main import ChipLCA, SweepSpec
from .report import (
    ReportFormat,
    csv_text,
    render_materials,
    render_report,
    render_whatif,
)
from .scenario import load_scenario
from .yields import (
    calibrate_defect_density,
    die_sites,
    gross_dies_per_wafer,
    monte_carlo_yield,
    yield_by_variant,
)

logger = getLogger(__name__)
logger.setLevel('INFO')


class UsageError(ValueError):
    """Bad flag combination; exit code 2"""


@logf()
def parse_args() -> argparse.ArgumentParser:
    """Build the command-line parser.
    Returns:
        argparse.ArgumentParser: parser with one subparser per command
    """
    parser = argparse.ArgumentParser(
        prog='chiplca',
        description='chiplca CLI: life-cycle energy assessment of chips',
    )
    parser.add_argument(
        '--version',
        '-v',
        action='version',
        version=MSGS.VERSION.format(version.__version__),
        help="Show program's version number and exit.",
    )

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        '--format',
        '-f',
        choices=[f.value for f in ReportFormat],
        default=ReportFormat.table.value,
        help='Output format',
    )
    common.add_argument(
        '--out',
        '-o',
        default=None,
        help='Write output to PATH (default stdout)',
    )
    common.add_argument(
        '--seed',
        type=int,
        default=0,
        help='Random seed; only monte-carlo paths use it',
    )

    scn = argparse.ArgumentParser(add_help=False)
    scn.add_argument(
        '--scenario', '-s', required=True, help='Scenario JSON file'
    )
    scn.add_argument(
        '--baseline', '-b', default=None, help='Baseline chip name'
    )

    model = argparse.ArgumentParser(add_help=False)
    model.add_argument(
        '--model',
        '-m',
        choices=[v.value for v in YieldVariant],
        default=YieldVariant.murphy.value,
        help='Yield model variant',
    )
    model.add_argument(
        '--area-cm2', type=float, required=True, help='Die area in cm^2'
    )

    subparsers = parser.add_subparsers(
        dest='command', required=False, help='chiplca command to execute'
    )

    # validate
    p_val = subparsers.add_parser(
        'validate', parents=[common], help='Check a scenario and/or inventory'
    )
    p_val.add_argument('--scenario', '-s', default=None)
    p_val.add_argument('--inventory', '-i', default=None)

    # yield
    p_yield = subparsers.add_parser(
        'yield', parents=[common, model], help='Die yield for a defect density'
    )
    p_yield.add_argument(
        '--defect-density',
        '-d',
        type=float,
        required=True,
        help='Defects per cm^2',
    )
    p_yield.add_argument(
        '--monte-carlo',
        action='store_true',
        default=False,
        help='Estimate yield by simulating defects on wafers',
    )
    p_yield.add_argument('--trials', type=int, default=None)
    p_yield.add_argument(
        '--diameter-mm', type=float, default=300.0, help='Wafer diameter in mm'
    )

    # calibrate
    p_cal = subparsers.add_parser(
        'calibrate',
        parents=[common, model],
        help='Defect density that produces a target yield',
    )
    p_cal.add_argument('--target-yield', '-t', type=float, required=True)

    # dpw
    p_dpw = subparsers.add_parser(
        'dpw', parents=[common], help='Gross dies per wafer'
    )
    p_dpw.add_argument('--diameter-mm', type=float, required=True)
    area = p_dpw.add_mutually_exclusive_group(required=True)
    area.add_argument('--die-area-mm2', type=float)
    area.add_argument('--area-cm2', type=float)

    # assess / compare
    subparsers.add_parser(
        'assess', parents=[common, scn], help='Assess every chip of a scenario'
    )
    subparsers.add_parser(
        'compare',
        parents=[common, scn],
        help='Improvement factors and component ratios against the baseline',
    )

    # whatif
    p_wi = subparsers.add_parser(
        'whatif', parents=[common, scn], help='Downscaled die area what-if'
    )
    p_wi.add_argument('--factor', type=float, required=True)
    p_wi.add_argument('--chip', '-c', default=None)
    p_wi.add_argument('--full-geometry', action='store_true', default=False)

    # sweep
    p_sw = subparsers.add_parser(
        'sweep', parents=[common, scn], help='Evaluate over a parameter grid'
    )
    p_sw.add_argument('--param', '-p', required=True, help='Parameter path')
    points = p_sw.add_mutually_exclusive_group()
    points.add_argument(
        '--values', default=None, help='Comma separated values'
    )
    points.add_argument('--grid', default=None, help='START:STOP:COUNT[:log]')
    p_sw.add_argument(
        '--columns', default=None, help='Comma separated columns'
    )

    # materials
    p_mat = subparsers.add_parser(
        'materials', parents=[common], help='Material and category totals'
    )
    p_mat.add_argument('--inventory', '-i', default=None)
    p_mat.add_argument('--scenario', '-s', default=None)

    return parser


def _cmd_validate(args: argparse.Namespace) -> str:
    if args.scenario is None and args.inventory is None:
        raise UsageError(MSGS.ERR_NOTHING_TO_VALIDATE)
    out = []
    if args.scenario is not None:
        s = load_scenario(args.scenario)
        out.append(
            MSGS.SCENARIO_OK.format(
                len(s.chips), s.service_period, s.replacement_policy.value
            )
        )
    if args.inventory is not None:
        inv = load_inventory(args.inventory)
        out.append(
            MSGS.INVENTORY_OK.format(
                inv.technology_name, len(inv), inv.total_energy
            )
        )
    return '\n'.join(out) + '\n'


def _cmd_yield(args: argparse.Namespace) -> str:
    if args.monte_carlo:
        trials = args.trials if args.trials is not None else MC_TRIALS
        y = monte_carlo_yield(
            args.area_cm2,
            args.defect_density,
            args.diameter_mm,
            trials=trials,
            seed=args.seed,
        )
        ix, _, _ = die_sites(args.diameter_mm, args.area_cm2 * MM2_PER_CM2)
        sites = len(ix)
        if args.format == 'table':
            return MSGS.YIELD_MC.format(y, trials, args.seed, sites) + '\n'
        result = {
            'variant': 'monte_carlo',
            'area_cm2': args.area_cm2,
            'defect_density': args.defect_density,
            'yield': y,
            'trials': trials,
            'seed': args.seed,
            'sites': sites,
        }
    else:
        y = yield_by_variant(args.model, args.area_cm2, args.defect_density)
        if args.format == 'table':
            return MSGS.YIELD.format(y) + '\n'
        result = {
            'variant': args.model,
            'area_cm2': args.area_cm2,
            'defect_density': args.defect_density,
            'yield': y,
        }
    return _dict_out(result, args.format)


def _cmd_calibrate(args: argparse.Namespace) -> str:
    d = calibrate_defect_density(args.model, args.area_cm2, args.target_yield)
    if args.format == 'table':
        return MSGS.CALIBRATED.format(d) + '\n'
    return _dict_out(
        {
            'variant': args.model,
            'area_cm2': args.area_cm2,
            'target_yield': args.target_yield,
            'defect_density': d,
        },
        args.format,
    )


def _cmd_dpw(args: argparse.Namespace) -> str:
    area = args.die_area_mm2
    if area is None:
        area = args.area_cm2 * MM2_PER_CM2
    dies = gross_dies_per_wafer(args.diameter_mm, area)
    if args.format == 'table':
        return MSGS.DPW.format(dies.gross_real, dies.gross) + '\n'
    return _dict_out(
        {
            'diameter_mm': args.diameter_mm,
            'die_area_mm2': area,
            'gross_real': dies.gross_real,
            'gross': dies.gross,
        },
        args.format,
    )


def _cmd_assess(args: argparse.Namespace) -> str:
    report = ChipLCA.from_file(args.scenario).assess(args.baseline)
    return render_report(report, args.format)


def _cmd_compare(args: argparse.Namespace) -> str:
    report = ChipLCA.from_file(args.scenario).compare(args.baseline)
    return render_report(report, args.format)


def _cmd_whatif(args: argparse.Namespace) -> str:
    result = ChipLCA.from_file(args.scenario).whatif(
        args.factor, args.chip, args.baseline, args.full_geometry
    )
    return render_whatif(result, args.format)


def _cmd_sweep(args: argparse.Namespace) -> str:
    columns = None
    if args.columns is not None:
        columns = [c.strip() for c in args.columns.split(',') if c.strip()]
    if args.values is not None:
        try:
            values = parse_values(args.values)
        except ValueError:
            raise UsageError(MSGS.ERR_VALUES.format(args.values)) from None
        spec = SweepSpec(parameter=args.param, values=values, columns=columns)
    elif args.grid is not None:
        try:
            start, stop, count, log = parse_grid(args.grid)
        except ValueError:
            raise UsageError(MSGS.ERR_GRID.format(args.grid)) from None
        spec = SweepSpec.from_grid(
            args.param, start, stop, count, log, columns
        )
    else:
        raise UsageError(MSGS.ERR_NO_POINTS)
    lca = ChipLCA.from_file(args.scenario)
    if args.baseline is not None:
        lca.document['baseline'] = lca.entry(args.baseline).name
    return lca.sweep(spec)


def _cmd_materials(args: argparse.Namespace) -> str:
    if args.inventory is None and args.scenario is None:
        raise UsageError(
            MSGS.ERR_MISSING_FLAG.format(
                'materials', '--inventory or --scenario'
            )
        )
    if args.inventory is not None:
        summaries = [aggregate_materials(load_inventory(args.inventory))]
    else:
        summaries = ChipLCA.from_file(args.scenario).materials()
    if args.format == 'json':
        docs = ',\n'.join(s.model_dump_json(indent=2) for s in summaries)
        return '[\n' + docs + '\n]\n'
    if args.format == 'csv':
        parts = [render_materials(s, 'csv') for s in summaries]
        return ''.join(parts[:1] + [p.split('\n', 1)[1] for p in parts[1:]])
    return ''.join(render_materials(s, 'table') for s in summaries)


def _dict_out(result: TYPE.Dict[str, TYPE.Any], fmt: str) -> str:
    if fmt == 'json':
        return json.dumps(result, indent=2) + '\n'
    return csv_text(list(result), [list(result.values())])


_COMMANDS: TYPE.Dict[str, TYPE.Callable[[argparse.Namespace], str]] = {
    'validate': _cmd_validate,
    'yield': _cmd_yield,
    'calibrate': _cmd_calibrate,
    'dpw': _cmd_dpw,
    'assess': _cmd_assess,
    'compare': _cmd_compare,
    'whatif': _cmd_whatif,
    'sweep': _cmd_sweep,
    'materials': _cmd_materials,
}


def run(argv: TYPE.Optional[TYPE.Sequence[str]] = None) -> int:
    """Run one chiplca command.
    Args:
        argv: arguments without the program name; defaults to sys.argv[1:]
    Returns:
        int: 0 on success, 1 on invalid input files or values, 2 on usage
            errors
    """
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = parse_args()
    try:
        args = parser.parse_args(parse_cli_arg_aliases(argv))
    except SystemExit as e:
        return 0 if e.code in (0, None) else 2

    if args.command is None:
        parser.print_help()
        return 0

    try:
        text = _COMMANDS[args.command](args)
    except (UsageError, SweepError) as e:
        print('%s %s: %s' % (parser.prog, args.command, e), file=sys.stderr)
        return 2
    except (ChipLCAError, OSError, ValueError) as e:
        print(MSGS.ERR_FILE.format(args.command, e), file=sys.stderr)
        return 1

    if args.out is not None:
        logger.info('wrote %s', write_output(args.out, text))
    else:
        sys.stdout.write(text)
    return 0


def entry_point():
    """console script: exit with the status of run()"""
    sys.exit(run())


if __name__ == '__main__':
    entry_point()
