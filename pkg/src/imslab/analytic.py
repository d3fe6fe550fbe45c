import logging
import numpy as np
from dataclasses import dataclass, field
from imslab._type_hints import *
from imslab.domain import DelayParams, SchemeId, FIELD_NAMES, OPERATING_POINT
from imslab.exceptions import InvalidParamName


__all__ = [
    't_standard', 't_predictive', 't_reactive', 't_qos_predictive', 't_qos_reactive',
    'FORMULAS', 'COEFFICIENTS', 'disruption_time', 'slope',
    'SweepSpec', 'SweepPoint', 'SweepResult', 'sweep', 'default_sweep',
]


log = logging.getLogger(__name__)


def t_standard(params: DelayParams) -> Ms:
    '''mipv6 handover followed by full re-registration and re-invite'''
    p = params
    return 2*p.t_nar + 2*p.t_h + 10*p.t_mc + 4*p.t_np


def t_predictive(params: DelayParams) -> Ms:
    '''fmipv6 with the session context pushed to the new p-cscf ahead of the move'''
    p = params
    return 4*p.t_oar + p.t_op + 2*p.t_onar + p.t_nar + 2*p.t_h + 4*p.t_mc + 2*p.t_np


def t_reactive(params: DelayParams) -> Ms:
    '''fmipv6 with the new p-cscf pulling the session context after the move'''
    p = params
    return 2*p.t_oar + 3*p.t_np + p.t_nar + 2*p.t_onar + 3*p.t_onp + 2*p.t_ops + 2*p.t_h + 4*p.t_mc


def t_qos_predictive(params: DelayParams) -> Ms:
    # the qos context rides the concurrent transfer branch
    return t_predictive(params)


def t_qos_reactive(params: DelayParams) -> Ms:
    # old p-cscf fetches the qos context from its ar before answering the context request
    return t_reactive(params) + 2*params.t_par


FORMULAS: Dict[SchemeId, Callable[[DelayParams], Ms]] = {
    SchemeId.Standard     : t_standard,
    SchemeId.Predictive   : t_predictive,
    SchemeId.Reactive     : t_reactive,
    SchemeId.QosPredictive: t_qos_predictive,
    SchemeId.QosReactive  : t_qos_reactive,
}


_PREDICTIVE = {'t_oar': 4, 't_op': 1, 't_onar': 2, 't_nar': 1, 't_h': 2, 't_mc': 4, 't_np': 2}
_REACTIVE   = {'t_oar': 2, 't_np': 3, 't_nar': 1, 't_onar': 2, 't_onp': 3, 't_ops': 2, 't_h': 2, 't_mc': 4}


# coefficient of each delay in each closed form, absent names count 0
COEFFICIENTS: Dict[SchemeId, Dict[str, int]] = {
    SchemeId.Standard     : {'t_nar': 2, 't_h': 2, 't_mc': 10, 't_np': 4},
    SchemeId.Predictive   : _PREDICTIVE,
    SchemeId.Reactive     : _REACTIVE,
    SchemeId.QosPredictive: dict(_PREDICTIVE),
    SchemeId.QosReactive  : {**_REACTIVE, 't_par': 2},
}


def disruption_time(scheme: SchemeId, params: DelayParams) -> Ms:
    return FORMULAS[scheme](params)


def _check_param_name(name: str) -> str:
    if name not in FIELD_NAMES:
        raise InvalidParamName(f"'{name}' is not a delay parameter, expected one of: {', '.join(FIELD_NAMES)}")
    return name


def slope(scheme: SchemeId, param_name: str) -> int:
    '''d(disruption)/d(param) of the scheme's closed form'''
    return COEFFICIENTS[scheme].get(_check_param_name(param_name), 0)


@dataclass(frozen=True)
class SweepSpec:

    base      : DelayParams
    param_name: str
    from_ms   : Ms
    to_ms     : Ms
    step_ms   : Ms
    schemes   : FrozenSet[SchemeId] = frozenset()


    def __post_init__(self):
        _check_param_name(self.param_name)
        if not (np.isfinite(self.from_ms) and np.isfinite(self.to_ms)):
            raise ValueError(f"sweep bounds must be finite, got {self.from_ms}..{self.to_ms}")
        if not self.from_ms <= self.to_ms:
            raise ValueError(f"sweep start {self.from_ms} is past its end {self.to_ms}")
        if not self.step_ms > 0:
            raise ValueError(f"sweep step must be > 0, got {self.step_ms}")
        if self.from_ms < 0:
            raise ValueError(f"delays cannot be negative, sweep starts at {self.from_ms}")
        object.__setattr__(self, 'schemes', frozenset(self.schemes))


    @property
    def values(self) -> List[Ms]:
        '''from_ms, from_ms + step_ms, ... up to and including to_ms'''
        # the tolerance keeps an endpoint that lands on to_ms by floating point drift
        count = int(np.floor((self.to_ms - self.from_ms) / self.step_ms + 1e-9)) + 1
        # a step past the end (infinite included) leaves from_ms alone
        later = self.from_ms + self.step_ms * np.arange(1, count)
        return [float(self.from_ms)] + [float(value) for value in later]


    @property
    def ordered_schemes(self) -> List[SchemeId]:
        return sorted(self.schemes, key=lambda scheme: scheme.value)


    def params_at(self, value: Ms) -> DelayParams:
        return self.base.with_value(self.param_name, value)


@dataclass
class SweepPoint:

    param_value   : Ms
    scheme        : SchemeId
    analytic_ms   : Ms
    simulated_ms  : Optional[Ms] = None
    messages_total: Optional[int] = None
    messages_mn   : Optional[int] = None
    regime        : Optional[str] = None


    @property
    def sort_key(self) -> Tuple[Ms, str]:
        return (self.param_value, self.scheme.value)


@dataclass
class SweepResult:

    param_name: str
    points    : List[SweepPoint] = field(default_factory=list)


    def curve(self, scheme: SchemeId, simulated: bool = False) -> List[Tuple[Ms, Ms]]:
        '''(value, disruption) pairs of one scheme in sweep order'''
        attr = 'simulated_ms' if simulated else 'analytic_ms'
        return [(point.param_value, getattr(point, attr)) for point in self.points if point.scheme is scheme]


def sweep(spec: SweepSpec) -> SweepResult:
    '''analytic disruption times over the grid, one point per (value, scheme)'''
    result = SweepResult(spec.param_name)
    for value in spec.values:
        params = spec.params_at(value)
        for scheme in spec.ordered_schemes:
            result.points.append(SweepPoint(value, scheme, disruption_time(scheme, params)))
    log.debug("swept %s over %d values for %d scheme(s)", spec.param_name, len(spec.values), len(spec.schemes))
    return result


# operating point x [0.5, 2.5] in ten steps
DEFAULT_SPAN  = (0.5, 2.5)
DEFAULT_STEPS = 10


def default_sweep(param_name: str, schemes: Iterable[SchemeId], base: DelayParams = OPERATING_POINT) -> SweepSpec:
    '''the grid used for the figure datasets when no explicit range is given'''
    centre = getattr(base, _check_param_name(param_name))
    low, high = DEFAULT_SPAN
    return SweepSpec(
        base       = base,
        param_name = param_name,
        from_ms    = centre * low,
        to_ms      = centre * high,
        step_ms    = centre * (high - low) / DEFAULT_STEPS,
        schemes    = frozenset(schemes),
    )
