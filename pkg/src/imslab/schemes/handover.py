import logging
from dataclasses import dataclass, field
from imslab._type_hints import *
from imslab.domain import DelayParams, NodeRole, SchemeId, SessionContext, QoSContext
from imslab.simengine import Engine, Event, Trace, critical_path
from .flows import Leg, define_flow
from .nodes import NodeState, DEFAULT_SESSION, DEFAULT_QOS, initial_states, transition, outgoing_payload


log = logging.getLogger(__name__)


SLACK        = 'slack'
BRANCH_BOUND = 'branch-bound'


@dataclass
class HandoverResult:

    scheme           : SchemeId
    disruption_ms    : Ms
    messages_total   : int
    messages_mn      : int
    trace            : Trace
    context_preserved: bool
    critical_path    : List[Event] = field(default_factory=list)
    critical_legs    : List[Leg] = field(default_factory=list)
    legs             : Dict[int, Leg] = field(default_factory=dict)
    states           : Dict[NodeRole, NodeState] = field(default_factory=dict)


    @property
    def regime(self) -> str:
        '''
        'slack' when no concurrent-branch leg sits on the critical path,
        i.e. the closed form's assumption that the context branch finishes early holds
        '''
        return BRANCH_BOUND if any(leg.concurrent for leg in self.critical_legs) else SLACK


def message_counts(scheme: SchemeId, trace: Trace) -> Tuple[int, int]:
    '''(delivered messages, delivered messages with the mn at either end)'''
    total = len(trace.events)
    mn    = sum(1 for event in trace.events if NodeRole.MN in (event.src, event.dst))
    log.debug("%s: %d messages, %d at the mn", scheme.name, total, mn)
    return total, mn


class HandoverRun:
    '''
    drives one scheme's flow through an engine

    every node shares the same handler: it applies the node's transition, then releases
    the legs whose prerequisites are now all delivered. the delivery that completes a
    leg's prerequisites is that leg's causal parent.
    '''

    def __init__(self,
        scheme   : SchemeId,
        params   : DelayParams,
        event_cap: Optional[int] = None,
        session  : Optional[SessionContext] = DEFAULT_SESSION,
        qos      : Optional[QoSContext] = DEFAULT_QOS,
        ):
        self.scheme  = scheme
        self.flow    = define_flow(scheme)
        self.engine  = Engine(params, event_cap)
        self.states  = initial_states(session, qos)
        self.source  = (session, qos)

        self._accepts   = {role: self.flow.accepts(role) for role in NodeRole}
        self._released  : set = set()
        self._delivered : set = set()
        self._leg_of_seq: Dict[int, Leg] = {}

        for role in NodeRole:
            self.engine.register(role, self.handle_event)


    def emit(self, leg: Leg) -> Event:
        payload = outgoing_payload(leg, self.states, self.scheme.carries_qos, self.scheme.uses_context_transfer)
        event   = self.engine.send(leg.src, leg.dst, leg.kind, payload)
        self._released.add(leg.name)
        self._leg_of_seq[event.seq] = leg
        return event


    def handle_event(self, event: Event) -> None:
        state = self.states[event.dst]
        self.states[event.dst] = transition(state, event, self._accepts[event.dst])

        leg = self._leg_of_seq.get(event.seq)
        if leg is None:
            return
        self._delivered.add(leg.name)

        # flow order keeps the seq numbers of simultaneous releases deterministic
        for candidate in self.flow:
            if candidate.name in self._released or not candidate.after:
                continue
            if all(name in self._delivered for name in candidate.after):
                self.emit(candidate)


    def run(self) -> HandoverResult:
        triggers = [self.emit(leg) for leg in self.flow.triggers]
        trace    = self.engine.run_until_quiescent()

        # events injected outside the flow have no leg
        legs  = self._leg_of_seq
        final = next((e for e in trace.events if e.seq in legs and legs[e.seq].name == self.flow.final), None)
        if final is None:
            raise RuntimeError(f"{self.scheme.name} never delivered its final leg '{self.flow.final}'")

        path       = critical_path(trace, final)
        disruption = final.deliver_at - min(event.sent_at for event in triggers)
        total, mn  = message_counts(self.scheme, trace)

        result = HandoverResult(
            scheme            = self.scheme,
            disruption_ms     = disruption,
            messages_total    = total,
            messages_mn       = mn,
            trace             = trace,
            context_preserved = self.context_preserved(),
            critical_path     = path,
            critical_legs     = [self._leg_of_seq[event.seq] for event in path],
            states            = dict(self.states),
            legs              = dict(self._leg_of_seq),
        )
        log.info("%s: disruption %.3f ms, %d messages (%d at the mn), %s",
                 self.scheme.name, disruption, total, mn, result.regime)
        return result


    def context_preserved(self) -> bool:
        '''the new p-cscf ends up with exactly the context the old one started with'''
        session, qos = self.source
        new_pcscf = self.states[NodeRole.NewPCSCF]
        if new_pcscf.session != session:
            return False
        if self.scheme.carries_qos and new_pcscf.qos != qos:
            return False
        return True


def run_handover(
    scheme   : SchemeId,
    params   : DelayParams,
    event_cap: Optional[int] = None,
    session  : Optional[SessionContext] = DEFAULT_SESSION,
    qos      : Optional[QoSContext] = DEFAULT_QOS,
    ) -> HandoverResult:
    '''simulate one handover of the given scheme from trigger to session re-establishment'''
    return HandoverRun(scheme, params, event_cap, session, qos).run()
