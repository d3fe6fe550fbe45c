from dataclasses import dataclass
from imslab._type_hints import *
from imslab.domain import NodeRole, MessageKind, SchemeId, link_field


MN, OAR, NAR       = NodeRole.MN, NodeRole.OldAR, NodeRole.NewAR
OPCSCF, NPCSCF     = NodeRole.OldPCSCF, NodeRole.NewPCSCF
SCSCF, HA, CN      = NodeRole.SCSCF, NodeRole.HA, NodeRole.CN
K = MessageKind


@dataclass(frozen=True)
class Leg:
    '''
    one hop of a scheme's message flow
    after: the legs whose delivery releases this one, empty for the trigger
    concurrent: the leg belongs to a branch that runs beside the handover proper
    '''

    name      : str
    src       : NodeRole
    dst       : NodeRole
    kind      : MessageKind
    after     : Tuple[str, ...] = ()
    concurrent: bool = False


    @property
    def delay_symbol(self) -> str:
        '''"T_op" style name of the delay this leg costs, "0" for a self-hop'''
        name = link_field(self.src, self.dst)
        return '0' if name is None else 'T' + name[1:]


@dataclass(frozen=True)
class Flow:

    scheme: SchemeId
    legs  : Tuple[Leg, ...]
    final : str


    def __post_init__(self):
        names = [leg.name for leg in self.legs]
        if len(set(names)) != len(names):
            raise ValueError(f"{self.scheme.name} flow repeats a leg name")
        seen = set()
        for leg in self.legs:
            if not set(leg.after) <= seen:
                raise ValueError(f"{self.scheme.name} leg '{leg.name}' comes before its prerequisites {leg.after}")
            seen.add(leg.name)
        if self.final not in seen:
            raise ValueError(f"{self.scheme.name} flow has no final leg '{self.final}'")


    def __iter__(self):
        return iter(self.legs)


    def __len__(self):
        return len(self.legs)


    def __getitem__(self, name: str) -> Leg:
        for leg in self.legs:
            if leg.name == name:
                return leg
        raise KeyError(name)


    @property
    def triggers(self) -> List[Leg]:
        return [leg for leg in self.legs if not leg.after]


    def accepts(self, role: NodeRole) -> FrozenSet[MessageKind]:
        '''message kinds the role's state machine has a transition for in this flow'''
        return frozenset(leg.kind for leg in self.legs if leg.dst is role)


def _binding_updates(after: str, prefix: str = 'bu') -> List[Leg]:
    # home agent first, then the correspondent node
    return [
        Leg(f'{prefix}_ha',    MN, HA, K.BU,   (after,)),
        Leg(f'{prefix}_ha_ok', HA, MN, K.BAck, (f'{prefix}_ha',)),
        Leg(f'{prefix}_cn',    MN, CN, K.BU,   (f'{prefix}_ha_ok',)),
        Leg(f'{prefix}_cn_ok', CN, MN, K.BAck, (f'{prefix}_cn',)),
    ]


def _standard() -> List[Leg]:
    legs = [
        Leg('rtsol', MN, NAR, K.RtSol),
        Leg('rtadv', NAR, MN, K.RtAdv, ('rtsol',)),
        *_binding_updates('rtadv'),
        # register, 401 challenge, register again, 200 ok
        Leg('register_1',    MN, NPCSCF, K.SipRegisterLeg,   ('bu_cn_ok',)),
        Leg('register_1_ok', NPCSCF, MN, K.SipRegisterOkLeg, ('register_1',)),
        Leg('register_2',    MN, NPCSCF, K.SipRegisterLeg,   ('register_1_ok',)),
        Leg('register_2_ok', NPCSCF, MN, K.SipRegisterOkLeg, ('register_2',)),
    ]
    # four invite round trips with the cn, the first one carries the qos proposal
    previous = 'register_2_ok'
    for n in range(1, 5):
        legs.append(Leg(f'invite_{n}',    MN, CN, K.SipInviteLeg,   (previous,)))
        legs.append(Leg(f'invite_{n}_ok', CN, MN, K.SipInviteOkLeg, (f'invite_{n}',)))
        previous = f'invite_{n}_ok'
    return legs


def _qos_forwarding() -> List[Leg]:
    # no old p-cscf <-> nar link, so the nar copy is relayed by the new p-cscf
    return [
        Leg('qos_fwd_scscf', OPCSCF, SCSCF, K.QosCtxForward, ('ct_ack',), concurrent=True),
        Leg('qos_fwd_relay', OPCSCF, NPCSCF, K.QosCtxForward, ('ct_ack',), concurrent=True),
        Leg('qos_fwd_nar',   NPCSCF, NAR, K.QosCtxForward, ('qos_fwd_relay',), concurrent=True),
    ]


def _predictive(qos: bool) -> List[Leg]:
    legs = [
        Leg('rtsolpr', MN, OAR, K.RtSolPr),
        Leg('prrtadv', OAR, MN, K.PrRtAdv, ('rtsolpr',)),
        Leg('move_notify', MN, OPCSCF, K.MoveNotify, ('prrtadv',)),
        # context branch, runs beside the fast handover
        Leg('ct_notify', OPCSCF, NPCSCF, K.MoveNotify, ('move_notify',), concurrent=True),
        Leg('ct_data',   OPCSCF, NPCSCF, K.CtData,     ('move_notify',), concurrent=True),
        Leg('ct_ack',    NPCSCF, OPCSCF, K.CtAck,      ('ct_data',), concurrent=True),
        Leg('route_update',    OPCSCF, SCSCF, K.RouteUpdate,   ('ct_ack',), concurrent=True),
        Leg('route_update_ok', SCSCF, OPCSCF, K.RouteUpdateOk, ('route_update',), concurrent=True),
    ]
    if qos:
        legs += _qos_forwarding()
    legs += [
        Leg('fbu',   MN, OAR, K.FBU,   ('move_notify',)),
        Leg('hi',    OAR, NAR, K.HI,   ('fbu',)),
        Leg('hack',  NAR, OAR, K.HAck, ('hi',)),
        Leg('fback', OAR, MN, K.FBack, ('hack',)),
        Leg('fback_nar', OAR, NAR, K.FBack, ('hack',), concurrent=True),
        Leg('fna',   MN, NAR, K.FNA,   ('fback',)),
        *_binding_updates('fna'),
        Leg('register',    MN, NPCSCF, K.SipRegisterLeg,   ('bu_cn_ok',)),
        # the new p-cscf answers once it holds the transferred context
        Leg('register_ok', NPCSCF, MN, K.SipRegisterOkLeg, ('register', 'ct_data')),
        Leg('reinvite',    MN, CN, K.ReInviteLeg,    ('register_ok',)),
        Leg('reinvite_ok', CN, MN, K.SipInviteOkLeg, ('reinvite',)),
    ]
    return legs


def _reactive(qos: bool) -> List[Leg]:
    legs = [
        Leg('rtsolpr', MN, OAR, K.RtSolPr),
        Leg('prrtadv', OAR, MN, K.PrRtAdv, ('rtsolpr',)),
        Leg('move_notify', MN, NPCSCF, K.MoveNotify, ('prrtadv',)),
        # fbu encapsulated in the fna, tunnelled back to the old ar
        Leg('fna',   MN, NAR, K.FNA,   ('move_notify',)),
        Leg('fbu',   NAR, OAR, K.FBU,  ('fna',)),
        Leg('fback', OAR, NAR, K.FBack, ('fbu',)),
        Leg('ct_request', NPCSCF, OPCSCF, K.CtRequest, ('fback',)),
    ]
    if qos:
        legs += [
            Leg('qos_request', OPCSCF, OAR, K.QosCtxRequest, ('ct_request',)),
            Leg('qos_data',    OAR, OPCSCF, K.QosCtxData,    ('qos_request',)),
            Leg('ct_data',     OPCSCF, NPCSCF, K.CtData,     ('qos_data',)),
        ]
    else:
        legs.append(Leg('ct_data', OPCSCF, NPCSCF, K.CtData, ('ct_request',)))
    legs += [
        Leg('ct_ack',          NPCSCF, OPCSCF, K.CtAck,       ('ct_data',)),
        Leg('route_update',    OPCSCF, SCSCF, K.RouteUpdate,   ('ct_ack',)),
        Leg('route_update_ok', SCSCF, OPCSCF, K.RouteUpdateOk, ('route_update',)),
    ]
    if qos:
        legs += _qos_forwarding()
    legs += [
        *_binding_updates('route_update_ok'),
        Leg('register',    MN, NPCSCF, K.SipRegisterLeg,   ('bu_cn_ok',)),
        Leg('register_ok', NPCSCF, MN, K.SipRegisterOkLeg, ('register', 'ct_data')),
        Leg('reinvite',    MN, CN, K.ReInviteLeg,    ('register_ok',)),
        Leg('reinvite_ok', CN, MN, K.SipInviteOkLeg, ('reinvite',)),
    ]
    return legs


_BUILDERS = {
    SchemeId.Standard     : lambda: (_standard(), 'invite_4_ok'),
    SchemeId.Predictive   : lambda: (_predictive(qos=False), 'reinvite_ok'),
    SchemeId.Reactive     : lambda: (_reactive(qos=False), 'reinvite_ok'),
    SchemeId.QosPredictive: lambda: (_predictive(qos=True), 'reinvite_ok'),
    SchemeId.QosReactive  : lambda: (_reactive(qos=True), 'reinvite_ok'),
}


def define_flow(scheme: SchemeId) -> Flow:
    '''the canonical leg sequence of a scheme, with its concurrent branches marked'''
    legs, final = _BUILDERS[scheme]()
    return Flow(scheme, tuple(legs), final)
