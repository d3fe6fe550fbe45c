import logging
from dataclasses import dataclass, replace
from imslab._type_hints import *
from imslab.domain import (
    NodeRole, MessageKind, Payload, SessionContext, QoSContext,
    RegistrationState, SessionState, ReservationState,
)
from imslab.exceptions import HandlerPanic, ContextMissing


log = logging.getLogger(__name__)


K = MessageKind


OLD_COA = '2001:db8:a::10'
NEW_COA = '2001:db8:b::10'


DEFAULT_SESSION = SessionContext(
    registration_state        = RegistrationState.Registered,
    session_state             = SessionState.Active,
    final_network_entry_point = 'scscf.home.example.net',
    ue_address                = '2001:db8:a::10',
    public_user_id            = 'sip:alice@home.example.net',
    private_user_id           = 'alice@home.example.net',
    access_network_type       = 'WLAN',
)


DEFAULT_QOS = QoSContext(
    qos_proposal      = (('audio', 64.0), ('video', 384.0)),
    approved          = True,
    reservation_state = ReservationState.Reserved,
)


@dataclass(frozen=True)
class NodeState:
    '''
    what one node knows during a handover
    phase: the last message kind it handled ('idle' before any)
    bindings: (public user id, care-of address) pairs, the binding cache of ha/cn
    route: where the s-cscf sends the mn's signaling
    '''

    role    : NodeRole
    phase   : str = 'idle'
    session : Optional[SessionContext] = None
    qos     : Optional[QoSContext] = None
    care_of : Optional[str] = None
    bindings: Tuple[Tuple[str, str], ...] = ()
    route   : Optional[NodeRole] = None


    def binding_for(self, user_id: str) -> Optional[str]:
        return dict(self.bindings).get(user_id)


    def bind(self, user_id: str, care_of: str) -> 'NodeState':
        cache = dict(self.bindings)
        cache[user_id] = care_of
        return replace(self, bindings=tuple(sorted(cache.items())))


def initial_states(
    session: Optional[SessionContext] = DEFAULT_SESSION,
    qos    : Optional[QoSContext] = DEFAULT_QOS,
    ) -> Dict[NodeRole, NodeState]:
    '''every node as it stands just before the trigger: the session lives at the old p-cscf'''
    states = {role: NodeState(role) for role in NodeRole}
    user   = (session or DEFAULT_SESSION).public_user_id
    states[NodeRole.MN]       = NodeState(NodeRole.MN, session=session, qos=qos, care_of=OLD_COA)
    states[NodeRole.OldPCSCF] = NodeState(NodeRole.OldPCSCF, session=session, qos=qos)
    states[NodeRole.OldAR]    = NodeState(NodeRole.OldAR, qos=qos)
    states[NodeRole.SCSCF]    = NodeState(NodeRole.SCSCF, session=session, route=NodeRole.OldPCSCF)
    states[NodeRole.HA]       = NodeState(NodeRole.HA).bind(user, OLD_COA)
    states[NodeRole.CN]       = NodeState(NodeRole.CN).bind(user, OLD_COA)
    return states


def pack_context(old_pcscf: NodeState, with_qos: bool = False) -> Payload:
    '''the payload of a context transfer message, read off the old p-cscf'''
    if old_pcscf.session is None:
        raise ContextMissing(f"{old_pcscf.role.name} holds no session context to transfer")
    if old_pcscf.session.session_state is not SessionState.Active:
        raise ContextMissing(f"{old_pcscf.role.name} holds a {old_pcscf.session.session_state.name.lower()} session, only active ones are transferred")
    return Payload(session=old_pcscf.session, qos=old_pcscf.qos if with_qos else None)


def receive_context(new_pcscf: NodeState, payload: Payload) -> NodeState:
    if payload is None or payload.session is None:
        raise ContextMissing(f"context transfer to {new_pcscf.role.name} carried no session context")
    log.debug("%s took over the session of %s", new_pcscf.role.name, payload.session.public_user_id)
    return replace(new_pcscf, session=payload.session, qos=payload.qos if payload.qos is not None else new_pcscf.qos)


def transfer_context(old_pcscf: NodeState, new_pcscf: NodeState, with_qos: bool = False) -> NodeState:
    '''
    returns the new p-cscf holding a copy of the old one's session context
    the old p-cscf is left as it is, it lets go of its copy on RouteUpdateOk
    '''
    return receive_context(new_pcscf, pack_context(old_pcscf, with_qos))


# (role, kind) -> transition, kinds a flow routes to a role but that are missing here only move the phase
def _mn_new_prefix(state, event):
    return replace(state, care_of=NEW_COA)


def _bind(state, event):
    payload = event.payload
    if payload is None or payload.care_of is None or payload.session is None:
        return state
    return state.bind(payload.session.public_user_id, payload.care_of)


def _register(state, event):
    # standard scheme: the new p-cscf learns the session only from the mn's own registration
    if event.payload is None or event.payload.session is None:
        return state
    return replace(state, session=replace(event.payload.session, registration_state=RegistrationState.Registered))


def _context_data(state, event):
    return receive_context(state, event.payload)


def _qos_in(state, event):
    if event.payload is None or event.payload.qos is None:
        return state
    return replace(state, qos=event.payload.qos)


def _qos_reserve(state, event):
    qos = event.payload.qos if event.payload is not None else None
    if qos is None:
        return state
    return replace(state, qos=qos.reserve() if qos.approved else qos)


def _approve(state, event):
    # cn checks the proposal and agrees to it
    qos = event.payload.qos if event.payload is not None else None
    if qos is None:
        return state
    return replace(state, qos=replace(qos, approved=True))


def _reroute(state, event):
    return replace(state, route=NodeRole.NewPCSCF)


def _release(state, event):
    log.debug("%s released its copy of the session context", state.role.name)
    return replace(state, session=None, qos=None)


TRANSITIONS: Dict[Tuple[NodeRole, MessageKind], Callable[[NodeState, Any], NodeState]] = {
    (NodeRole.MN, K.RtAdv)               : _mn_new_prefix,
    (NodeRole.MN, K.PrRtAdv)             : _mn_new_prefix,
    (NodeRole.MN, K.SipInviteOkLeg)      : _qos_in,
    (NodeRole.HA, K.BU)                  : _bind,
    (NodeRole.CN, K.BU)                  : _bind,
    (NodeRole.CN, K.SipInviteLeg)        : _approve,
    (NodeRole.NewPCSCF, K.SipRegisterLeg): _register,
    (NodeRole.NewPCSCF, K.CtData)        : _context_data,
    (NodeRole.OldPCSCF, K.QosCtxData)    : _qos_in,
    (NodeRole.OldPCSCF, K.RouteUpdateOk) : _release,
    (NodeRole.SCSCF, K.RouteUpdate)      : _reroute,
    (NodeRole.SCSCF, K.QosCtxForward)    : _qos_in,
    (NodeRole.NewAR, K.QosCtxForward)    : _qos_reserve,
}


def transition(state: NodeState, event, accepts: FrozenSet[MessageKind]) -> NodeState:
    '''apply one delivered event to a node, accepts is the set of kinds its state machine takes'''
    if event.kind not in accepts:
        raise HandlerPanic(f"{state.role.name} has no transition for {event.kind.name} from {event.src.name} (in phase '{state.phase}')")
    step  = TRANSITIONS.get((state.role, event.kind))
    state = step(state, event) if step is not None else state
    return replace(state, phase=event.kind.name)


def outgoing_payload(leg, states: Dict[NodeRole, NodeState], with_qos: bool, context_transfer: bool) -> Optional[Payload]:
    '''what the sender of a leg puts in the message, read from its state at send time'''
    sender = states[leg.src]
    kind   = leg.kind

    if kind is K.CtData:
        return pack_context(sender, with_qos)
    if kind in (K.QosCtxData, K.QosCtxForward):
        return Payload(qos=sender.qos)
    if kind is K.BU:
        return Payload(session=sender.session, care_of=sender.care_of)
    if kind is K.SipRegisterLeg and not context_transfer:
        return Payload(session=sender.session)
    if kind is K.SipRegisterOkLeg and context_transfer and sender.session is None:
        raise ContextMissing(f"{sender.role.name} reached re-registration without a transferred context")
    if kind is K.SipInviteLeg and sender.qos is not None:
        # negotiating from scratch: the proposal goes out unapproved
        return Payload(qos=replace(sender.qos, approved=False, reservation_state=ReservationState.Requested))
    if kind is K.SipInviteOkLeg and sender.qos is not None:
        return Payload(qos=sender.qos)
    return None
