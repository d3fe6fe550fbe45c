import sys
import logging
import argparse
from pathlib import Path
from imslab._type_hints import *
from imslab.domain import SchemeId
from imslab.analytic import disruption_time
from imslab.exceptions import ImsLabError, SimulationError, ContextMissing, UnknownPair
from imslab.schemes import run_handover, render_ladder, define_flow
from .runner import (
    ExperimentConfig, event_cap_from_env, parse_schemes, run_sweep, write_sweep_csv,
    sweep_comments, mismatched, compare, branch_diagnostic, write_figures,
)


log = logging.getLogger(__name__)


EXIT_OK         = 0
EXIT_CONFIG     = 2
EXIT_RUNTIME    = 3
EXIT_DIVERGENCE = 4


SCHEME_NAMES = [scheme.value for scheme in SchemeId]


def _scheme(text: str) -> SchemeId:
    try:
        return SchemeId.parse(text)
    except ValueError as err:
        raise argparse.ArgumentTypeError(str(err)) from None


def _schemes(text: str) -> Tuple[SchemeId, ...]:
    try:
        return parse_schemes(text)
    except ValueError as err:
        raise argparse.ArgumentTypeError(str(err)) from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('-v', '--verbose', action='store_true', help='log debug output to stderr')
    common.add_argument('--event-cap', type=int, default=None, help='deliveries allowed per run (overrides IMSLAB_EVENT_CAP)')

    parser = argparse.ArgumentParser(
        prog='imslab',
        description='IMS over (F)MIPv6 handover: closed-form disruption times and a discrete-event simulation of the same flows.',
    )
    commands = parser.add_subparsers(dest='command', required=True)

    simulate = commands.add_parser('simulate', parents=[common], help='simulate one scheme')
    simulate.add_argument('--scheme', type=_scheme, required=True, metavar='|'.join(SCHEME_NAMES))
    simulate.add_argument('--params', type=Path, required=True, help='json parameter file')
    simulate.add_argument('--trace', type=Path, help='write the delivered events as json lines')
    simulate.add_argument('--ladder', type=Path, help='write the ladder diagram of the run')

    sweep = commands.add_parser('sweep', parents=[common], help='vary one delay and tabulate every scheme')
    sweep.add_argument('--param', required=True, help='delay to vary, e.g. t_mc')
    sweep.add_argument('--from', dest='from_ms', type=float, required=True)
    sweep.add_argument('--to', dest='to_ms', type=float, required=True)
    sweep.add_argument('--step', dest='step_ms', type=float, required=True)
    sweep.add_argument('--schemes', type=_schemes, default=tuple(SchemeId), help="comma separated names or 'all'")
    sweep.add_argument('--params', type=Path, required=True)
    sweep.add_argument('--out', type=Path, required=True, help='csv file to write')
    sweep.add_argument('--simulate', action='store_true', help='fill the simulated columns too')

    analytic = commands.add_parser('analytic', parents=[common], help='closed-form disruption time of one scheme')
    analytic.add_argument('--scheme', type=_scheme, required=True, metavar='|'.join(SCHEME_NAMES))
    analytic.add_argument('--params', type=Path, required=True)

    comparison = commands.add_parser('compare', parents=[common], help='closed form against simulation for every scheme')
    comparison.add_argument('--params', type=Path, required=True)

    figures = commands.add_parser('figures', parents=[common], help='write the figure datasets')
    figures.add_argument('--out', type=Path, required=True, help='output directory')
    figures.add_argument('--params', type=Path, default=None, help='base parameters (default: the evaluation operating point)')

    return parser


def make_config(args: argparse.Namespace) -> ExperimentConfig:
    event_cap = args.event_cap if args.event_cap is not None else event_cap_from_env()
    if event_cap is not None and event_cap <= 0:
        raise ValueError(f"the event cap must be > 0, got {event_cap}")
    return ExperimentConfig(
        command     = args.command,
        params_file = getattr(args, 'params', None),
        scheme      = getattr(args, 'scheme', None),
        schemes     = getattr(args, 'schemes', ()),
        param_name  = getattr(args, 'param', None),
        from_ms     = getattr(args, 'from_ms', None),
        to_ms       = getattr(args, 'to_ms', None),
        step_ms     = getattr(args, 'step_ms', None),
        simulate    = getattr(args, 'simulate', False),
        out         = getattr(args, 'out', None),
        trace       = getattr(args, 'trace', None),
        ladder      = getattr(args, 'ladder', None),
        event_cap   = event_cap,
    )


def cmd_simulate(config: ExperimentConfig, out: Optional[TextIO] = None) -> int:
    out = out or sys.stdout
    params = config.load_params()
    result = run_handover(config.scheme, params, config.event_cap)
    out.write(f'scheme\t{result.scheme.value}\n')
    out.write(f'disruption_ms\t{result.disruption_ms:.3f}\n')
    out.write(f'messages_total\t{result.messages_total}\n')
    out.write(f'messages_mn\t{result.messages_mn}\n')
    out.write(f'context_preserved\t{str(result.context_preserved).lower()}\n')
    out.write(f'regime\t{result.regime}\n')
    if config.trace is not None:
        result.trace.write_jsonl(config.trace)
    if config.ladder is not None:
        config.ladder.write_text(render_ladder(define_flow(config.scheme), result))
    return EXIT_OK


def cmd_analytic(config: ExperimentConfig, out: Optional[TextIO] = None) -> int:
    out = out or sys.stdout
    params = config.load_params()
    out.write(f'{disruption_time(config.scheme, params):.3f}\n')
    return EXIT_OK


def cmd_sweep(config: ExperimentConfig, out: Optional[TextIO] = None) -> int:
    out = out or sys.stdout
    spec   = config.sweep_spec(config.load_params())
    result = run_sweep(spec, config.simulate, config.event_cap)
    with open(config.out, 'w', newline='') as stream:
        write_sweep_csv(result, stream, sweep_comments(spec))
    out.write(f"{config.out}\n")
    bad = mismatched(result)
    if bad:
        for point in bad:
            log.error("%s diverged at %s=%.3f", point.scheme.value, spec.param_name, point.param_value)
        return EXIT_DIVERGENCE
    return EXIT_OK


def cmd_compare(config: ExperimentConfig, out: Optional[TextIO] = None) -> int:
    out = out or sys.stdout
    rows = compare(config.load_params(), config.event_cap)
    out.write('scheme,analytic_ms,simulated_ms,abs_diff_ms,regime\n')
    for row in rows:
        out.write(f'{row.scheme.value},{row.analytic:.3f},{row.simulated:.3f},{row.diff:.3e},{row.result.regime}\n')
    diverged = [row for row in rows if not row.agrees]
    for row in diverged:
        sys.stderr.write(branch_diagnostic(row) + '\n')
    return EXIT_DIVERGENCE if diverged else EXIT_OK


def cmd_figures(config: ExperimentConfig, out: Optional[TextIO] = None) -> int:
    out = out or sys.stdout
    for path in write_figures(config.out, config.load_params(), config.event_cap):
        out.write(f'{path}\n')
    return EXIT_OK


COMMANDS: Dict[str, Callable[[ExperimentConfig], int]] = {
    'simulate': cmd_simulate,
    'sweep'   : cmd_sweep,
    'analytic': cmd_analytic,
    'compare' : cmd_compare,
    'figures' : cmd_figures,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        stream = sys.stderr,
        level  = logging.DEBUG if args.verbose else logging.WARNING,
        format = '%(levelname)s %(name)s: %(message)s',
    )
    try:
        config = make_config(args)
        return COMMANDS[config.command](config)
    except (SimulationError, ContextMissing, UnknownPair) as err:
        sys.stderr.write(f'imslab {args.command}: {err}\n')
        return EXIT_RUNTIME
    except (ImsLabError, ValueError, OSError) as err:
        sys.stderr.write(f'imslab {args.command}: {err}\n')
        return EXIT_CONFIG
