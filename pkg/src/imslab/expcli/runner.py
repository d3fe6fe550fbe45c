import os
import csv
import logging
from pathlib import Path
from dataclasses import dataclass, field
from imslab._type_hints import *
from imslab.domain import DelayParams, SchemeId, OPERATING_POINT, FIELD_NAMES
from imslab.analytic import SweepSpec, SweepResult, SweepPoint, sweep, default_sweep, disruption_time, DEFAULT_SPAN, DEFAULT_STEPS
from imslab.schemes import HandoverResult, run_handover, SLACK


log = logging.getLogger(__name__)


EVENT_CAP_ENV = 'IMSLAB_EVENT_CAP'


# simulated and closed-form values closer than this are the same number
TOLERANCE_MS = 1e-9


MISMATCH = 'mismatch'


CSV_COLUMNS = ['param', 'value', 'scheme', 'analytic_ms', 'simulated_ms', 'messages_total', 'messages_mn', 'regime']


CLASSIC_SCHEMES = (SchemeId.Standard, SchemeId.Predictive, SchemeId.Reactive)


# dataset name -> (swept delay, schemes), on the default grid around the operating point
FIGURES: Dict[str, Tuple[str, Tuple[SchemeId, ...]]] = {
    'fig10': ('t_mc',   CLASSIC_SCHEMES),
    'fig11': ('t_h',    CLASSIC_SCHEMES),
    'fig12': ('t_onp',  CLASSIC_SCHEMES),
    'fig13': ('t_onar', CLASSIC_SCHEMES),
    'fig17': ('t_onp',  tuple(SchemeId)),
}


def event_cap_from_env(environ: Optional[Dict[str, str]] = None) -> Optional[int]:
    '''the cap set through IMSLAB_EVENT_CAP, None when unset'''
    raw = (os.environ if environ is None else environ).get(EVENT_CAP_ENV)
    if raw is None or raw.strip() == '':
        return None
    try:
        cap = int(raw)
    except ValueError:
        raise ValueError(f"{EVENT_CAP_ENV} must be a positive integer, got '{raw}'") from None
    if cap <= 0:
        raise ValueError(f"{EVENT_CAP_ENV} must be a positive integer, got {cap}")
    return cap


def parse_schemes(text: str) -> Tuple[SchemeId, ...]:
    '''"all" or a comma separated list of scheme names'''
    if text.strip().lower() == 'all':
        return tuple(SchemeId)
    names = [name.strip() for name in text.split(',') if name.strip()]
    return tuple(dict.fromkeys(SchemeId.parse(name) for name in names))


@dataclass
class ExperimentConfig:
    '''everything a command needs, assembled once from the command line and the environment'''

    command    : str
    params_file: Optional[Path] = None
    scheme     : Optional[SchemeId] = None
    schemes    : Tuple[SchemeId, ...] = ()
    param_name : Optional[str] = None
    from_ms    : Optional[Ms] = None
    to_ms      : Optional[Ms] = None
    step_ms    : Optional[Ms] = None
    simulate   : bool = False
    out        : Optional[Path] = None
    trace      : Optional[Path] = None
    ladder     : Optional[Path] = None
    event_cap  : Optional[int] = None


    def load_params(self) -> DelayParams:
        if self.params_file is None:
            return OPERATING_POINT
        return DelayParams.from_json(self.params_file)


    def sweep_spec(self, base: DelayParams) -> SweepSpec:
        return SweepSpec(base, self.param_name, self.from_ms, self.to_ms, self.step_ms, frozenset(self.schemes))


def simulate_point(point: SweepPoint, params: DelayParams, event_cap: Optional[int] = None) -> HandoverResult:
    '''fill the simulated columns of one sweep point'''
    result = run_handover(point.scheme, params, event_cap)
    point.simulated_ms   = result.disruption_ms
    point.messages_total = result.messages_total
    point.messages_mn    = result.messages_mn
    point.regime         = result.regime
    if result.regime == SLACK and abs(result.disruption_ms - point.analytic_ms) > TOLERANCE_MS:
        log.error("%s at %.3f ms: simulated %.9f ms but the closed form gives %.9f ms",
                  point.scheme.name, point.param_value, result.disruption_ms, point.analytic_ms)
        point.regime = MISMATCH
    return result


def fill_simulated(result: SweepResult, spec: SweepSpec, event_cap: Optional[int] = None) -> SweepResult:
    '''
    run the simulator for every point of an analytic sweep
    each point gets its own engine, so the order of evaluation never shows in the output
    '''
    for point in result.points:
        simulate_point(point, spec.params_at(point.param_value), event_cap)
    return result


def _ms(value: Optional[Ms]) -> str:
    return '' if value is None else f'{value:.3f}'


def _count(value: Optional[int]) -> str:
    return '' if value is None else str(value)


def sweep_comments(spec: SweepSpec, grid_note: Optional[str] = None) -> List[str]:
    base = ' '.join(f'{name}={getattr(spec.base, name):.3f}' for name in FIELD_NAMES)
    lines = [
        f'sweep {spec.param_name} from {spec.from_ms:.3f} to {spec.to_ms:.3f} step {spec.step_ms:.3f}',
        f'base {base}',
    ]
    if grid_note:
        lines.append(grid_note)
    return lines


def write_sweep_csv(result: SweepResult, stream: TextIO, comments: Sequence[str] = ()) -> None:
    '''one row per (value, scheme), rows in (value, scheme name) order, '#' lines first'''
    for comment in comments:
        stream.write(f'# {comment}\n')
    writer = csv.writer(stream, lineterminator='\n')
    writer.writerow(CSV_COLUMNS)
    for point in sorted(result.points, key=lambda point: point.sort_key):
        writer.writerow([
            result.param_name,
            _ms(point.param_value),
            point.scheme.value,
            _ms(point.analytic_ms),
            _ms(point.simulated_ms),
            _count(point.messages_total),
            _count(point.messages_mn),
            point.regime or '',
        ])


def run_sweep(spec: SweepSpec, simulate: bool, event_cap: Optional[int] = None) -> SweepResult:
    result = sweep(spec)
    if simulate:
        fill_simulated(result, spec, event_cap)
    return result


def mismatched(result: SweepResult) -> List[SweepPoint]:
    return [point for point in result.points if point.regime == MISMATCH]


@dataclass
class Comparison:

    scheme   : SchemeId
    analytic : Ms
    simulated: Ms
    result   : HandoverResult = field(repr=False)


    @property
    def diff(self) -> Ms:
        return abs(self.simulated - self.analytic)


    @property
    def agrees(self) -> bool:
        return self.diff <= TOLERANCE_MS


def compare(params: DelayParams, event_cap: Optional[int] = None) -> List[Comparison]:
    '''every scheme through both the closed form and the simulator'''
    rows = []
    for scheme in SchemeId:
        result = run_handover(scheme, params, event_cap)
        rows.append(Comparison(scheme, disruption_time(scheme, params), result.disruption_ms, result))
    return rows


def branch_diagnostic(row: Comparison) -> str:
    '''why a scheme's simulation went past its closed form'''
    path = ' -> '.join(f'{leg.kind.name}({leg.src.label}->{leg.dst.label})' for leg in row.result.critical_legs)
    bound = [leg.name for leg in row.result.critical_legs if leg.concurrent]
    if bound:
        reason = f"the concurrent branch ({', '.join(bound)}) finished after the main path needed it, no slack left"
    else:
        reason = 'no concurrent leg on the critical path, the flow and the closed form disagree'
    return f'{row.scheme.value}: simulated {row.simulated:.3f} ms vs analytic {row.analytic:.3f} ms; {reason}; critical path: {path}'


def write_figures(out_dir: Union[str, Path], base: DelayParams = OPERATING_POINT, event_cap: Optional[int] = None) -> List[Path]:
    '''the datasets behind the disruption-time figures, one csv each'''
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    low, high = DEFAULT_SPAN
    written = []
    for name, (param_name, schemes) in FIGURES.items():
        spec   = default_sweep(param_name, schemes, base)
        result = run_sweep(spec, simulate=True, event_cap=event_cap)
        note   = f'grid {low}x..{high}x of the operating point in {DEFAULT_STEPS} steps (figure axis ranges are not recoverable)'
        path   = out_dir / f'{name}.csv'
        with open(path, 'w', newline='') as stream:
            write_sweep_csv(result, stream, sweep_comments(spec, note))
        log.info("wrote %s (%d rows)", path, len(result.points))
        written.append(path)
    return written
