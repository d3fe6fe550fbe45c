import json
import logging
from math import isfinite
from enum import Enum, auto
from pathlib import Path
from dataclasses import dataclass, field, fields, replace, asdict
from imslab._type_hints import *
from imslab.exceptions import UnknownPair, ParamFileError


__all__ = [
    'NodeRole', 'MessageKind', 'SchemeId', 'RegistrationState', 'SessionState', 'ReservationState',
    'SessionContext', 'QoSContext', 'Payload', 'DelayParams', 'FIELD_NAMES', 'OPERATING_POINT',
    'link_field', 'link_delay',
]


log = logging.getLogger(__name__)


class NodeRole(Enum):
    MN       = auto()
    OldAR    = auto()
    NewAR    = auto()
    OldPCSCF = auto()
    NewPCSCF = auto()
    SCSCF    = auto()
    HA       = auto()
    CN       = auto()


    @property
    def label(self) -> str:
        '''short name used in ladder diagrams'''
        return _ROLE_LABELS[self]


_ROLE_LABELS = {
    NodeRole.MN      : 'MN',
    NodeRole.OldAR   : 'oAR',
    NodeRole.NewAR   : 'nAR',
    NodeRole.OldPCSCF: 'oP-CSCF',
    NodeRole.NewPCSCF: 'nP-CSCF',
    NodeRole.SCSCF   : 'S-CSCF',
    NodeRole.HA      : 'HA',
    NodeRole.CN      : 'CN',
}


class MessageKind(Enum):
    # mipv6 / fmipv6
    RtSolPr = auto()
    PrRtAdv = auto()
    RtSol   = auto()
    RtAdv   = auto()
    FBU     = auto()
    HI      = auto()
    HAck    = auto()
    FBack   = auto()
    FNA     = auto()
    BU      = auto()
    BAck    = auto()
    # sip, one abstract hop per leg of a multi-message exchange
    SipRegisterLeg   = auto()
    SipRegisterOkLeg = auto()
    SipInviteLeg     = auto()
    SipInviteOkLeg   = auto()
    ReInviteLeg      = auto()
    # context transfer
    MoveNotify    = auto()
    CtRequest     = auto()
    CtData        = auto()
    CtAck         = auto()
    RouteUpdate   = auto()
    RouteUpdateOk = auto()
    QosCtxRequest = auto()
    QosCtxData    = auto()
    QosCtxForward = auto()


class SchemeId(Enum):
    Standard      = 'standard'
    Predictive    = 'predictive'
    Reactive      = 'reactive'
    QosPredictive = 'qos-predictive'
    QosReactive   = 'qos-reactive'


    @classmethod
    def parse(cls, name: str) -> 'SchemeId':
        '''accepts either the cli spelling ("qos-reactive") or the member name ("QosReactive")'''
        for scheme in cls:
            if name in (scheme.value, scheme.name):
                return scheme
        raise ValueError(f"'{name}' is not a handover scheme")


    @property
    def uses_context_transfer(self) -> bool:
        return self is not SchemeId.Standard


    @property
    def carries_qos(self) -> bool:
        return self in (SchemeId.QosPredictive, SchemeId.QosReactive)


class RegistrationState(Enum):
    Registered   = auto()
    Unregistered = auto()


class SessionState(Enum):
    Active     = auto()
    Terminated = auto()


class ReservationState(Enum):
    NoReservation = auto()
    Requested     = auto()
    Reserved      = auto()


@dataclass(frozen=True)
class SessionContext:
    '''the session state a p-cscf holds for the mn and hands over on context transfer'''

    registration_state       : RegistrationState
    session_state            : SessionState
    final_network_entry_point: str
    ue_address               : str
    public_user_id           : str
    private_user_id          : str
    access_network_type      : str


    def __post_init__(self):
        if self.session_state is SessionState.Active:
            empty = [f.name for f in fields(self) if getattr(self, f.name) in ('', None)]
            if empty:
                raise ValueError(f"an active session context needs every field populated, missing: {', '.join(empty)}")


@dataclass(frozen=True)
class QoSContext:

    qos_proposal     : Tuple[Tuple[str, float], ...] = ()
    approved         : bool = False
    reservation_state: ReservationState = ReservationState.NoReservation


    def __post_init__(self):
        object.__setattr__(self, 'qos_proposal', tuple((str(media), float(kbps)) for media, kbps in self.qos_proposal))
        if self.reservation_state is ReservationState.Reserved and not self.approved:
            raise ValueError("a qos context cannot be reserved before it is approved")


    def reserve(self) -> 'QoSContext':
        return replace(self, reservation_state=ReservationState.Reserved)


@dataclass(frozen=True)
class Payload:
    '''what a signaling message carries besides its kind'''

    session: Optional[SessionContext] = None
    qos    : Optional[QoSContext] = None
    care_of: Optional[str] = None


@dataclass(frozen=True)
class DelayParams:
    '''
    per-link one-way delays in milliseconds, symmetric in direction

    t_nar and t_np default to t_oar and t_op when left out,
    t_par (p-cscf <-> its local ar) defaults to 5 ms.
    t_mr and t_hc are carried for completeness, no formula reads them.
    '''

    t_mr  : Ms
    t_oar : Ms
    t_onar: Ms
    t_op  : Ms
    t_onp : Ms
    t_ops : Ms
    t_h   : Ms
    t_mc  : Ms
    t_hc  : Ms
    t_nar : Optional[Ms] = None
    t_np  : Optional[Ms] = None
    t_par : Ms = 5.0


    def __post_init__(self):
        if self.t_nar is None: object.__setattr__(self, 't_nar', self.t_oar)
        if self.t_np is None:  object.__setattr__(self, 't_np', self.t_op)

        for name in FIELD_NAMES:
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise TypeError(f"{name} must be a number of milliseconds, got '{type(value).__name__}'")
            if not isfinite(value) or value < 0:
                raise ValueError(f"{name} must be finite and >= 0, got {value}")
            object.__setattr__(self, name, float(value))


    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'DelayParams':
        '''build from a mapping keyed by the lowercase field names'''
        if not isinstance(data, dict):
            raise ParamFileError(f"parameters must be a json object, got '{type(data).__name__}'")
        unknown = sorted(set(data) - set(FIELD_NAMES))
        if unknown:
            raise ParamFileError(f"unknown parameter(s): {', '.join(unknown)}")
        missing = [name for name in REQUIRED_NAMES if name not in data]
        if missing:
            raise ParamFileError(f"missing parameter(s): {', '.join(missing)}")
        try:
            return cls(**data)
        except (TypeError, ValueError) as err:
            raise ParamFileError(str(err)) from err


    @classmethod
    def from_json(cls, path: Union[str, Path]) -> 'DelayParams':
        path = Path(path)
        try:
            data = json.loads(path.read_text())
        except FileNotFoundError as err:
            raise ParamFileError(f"parameter file not found: {path}") from err
        except json.JSONDecodeError as err:
            raise ParamFileError(f"{path} is not valid json: {err}") from err
        log.debug("loaded parameters from %s", path)
        return cls.from_dict(data)


    def asdict(self) -> Dict[str, Ms]:
        return asdict(self)


    def with_value(self, name: str, value: Ms) -> 'DelayParams':
        '''copy with one field replaced'''
        return replace(self, **{name: value})


    def scaled(self, factor: Num) -> 'DelayParams':
        '''copy with every delay multiplied by the factor'''
        return DelayParams(**{name: getattr(self, name) * factor for name in FIELD_NAMES})


FIELD_NAMES     = tuple(f.name for f in fields(DelayParams))
DEFAULTED_NAMES = ('t_nar', 't_np', 't_par')
REQUIRED_NAMES  = tuple(name for name in FIELD_NAMES if name not in DEFAULTED_NAMES)


# the operating point of the evaluation: t_nar and t_np take their symmetric defaults
OPERATING_POINT = DelayParams(
    t_mr  = 10.0,
    t_oar = 11.0,
    t_onar= 5.0,
    t_op  = 15.0,
    t_onp = 7.0,
    t_ops = 10.0,
    t_h   = 116.0,
    t_mc  = 128.0,
    t_hc  = 114.0,
)


_LINKS = {
    frozenset((NodeRole.MN, NodeRole.OldAR))         : 't_oar',
    frozenset((NodeRole.MN, NodeRole.NewAR))         : 't_nar',
    frozenset((NodeRole.OldAR, NodeRole.NewAR))      : 't_onar',
    frozenset((NodeRole.MN, NodeRole.OldPCSCF))      : 't_op',
    frozenset((NodeRole.MN, NodeRole.NewPCSCF))      : 't_np',
    frozenset((NodeRole.OldPCSCF, NodeRole.NewPCSCF)): 't_onp',
    frozenset((NodeRole.MN, NodeRole.HA))            : 't_h',
    frozenset((NodeRole.OldPCSCF, NodeRole.SCSCF))   : 't_ops',
    frozenset((NodeRole.MN, NodeRole.CN))            : 't_mc',
    frozenset((NodeRole.HA, NodeRole.CN))            : 't_hc',
    frozenset((NodeRole.OldPCSCF, NodeRole.OldAR))   : 't_par',
    frozenset((NodeRole.NewPCSCF, NodeRole.NewAR))   : 't_par',
}


def link_field(a: NodeRole, b: NodeRole) -> Optional[str]:
    '''
    name of the DelayParams field that prices the a <-> b link
    None when a and b are the same node
    '''
    if a is b:
        return None
    try:
        return _LINKS[frozenset((a, b))]
    except KeyError:
        raise UnknownPair(f"no link delay is defined between {a.name} and {b.name}") from None


def link_delay(params: DelayParams, a: NodeRole, b: NodeRole) -> Ms:
    '''one-way delay between two nodes, 0 for a node talking to itself'''
    name = link_field(a, b)
    return 0.0 if name is None else getattr(params, name)
