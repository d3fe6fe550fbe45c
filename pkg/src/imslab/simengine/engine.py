import json
import heapq
import logging
import itertools
from pathlib import Path
from dataclasses import dataclass, field
from imslab._type_hints import *
from imslab.domain import DelayParams, NodeRole, MessageKind, Payload, link_delay
from imslab.exceptions import NonTermination, OrphanEvent
from ._event_type import Event


__all__ = ['DEFAULT_EVENT_CAP', 'Engine', 'Trace', 'critical_path', 'path_length']


log = logging.getLogger(__name__)


DEFAULT_EVENT_CAP = 10_000


Handler = Callable[[Event], None]


@dataclass
class Trace:
    '''everything an engine delivered (in dispatch order) and dropped, plus where its clock ended'''

    events : List[Event] = field(default_factory=list)
    dropped: List[Event] = field(default_factory=list)
    clock  : Ms = 0.0


    def __len__(self):
        return len(self.events)


    def __iter__(self):
        return iter(self.events)


    @property
    def records(self) -> List[Dict[str, Any]]:
        return [event.record() for event in self.events]


    def by_seq(self) -> Dict[int, Event]:
        return {event.seq: event for event in itertools.chain(self.events, self.dropped)}


    def to_jsonl(self) -> str:
        return ''.join(json.dumps(record) + '\n' for record in self.records)


    def write_jsonl(self, path: Union[str, Path]) -> None:
        Path(path).write_text(self.to_jsonl())


class Engine:
    '''
        - a deterministic discrete-event loop over delay-weighted logical links

        [INPUT]:

            params    -> the DelayParams that price every link
            event_cap -> how many deliveries a run may dispatch before it is declared runaway

        [PROCESS]:

            1) node handlers are registered per NodeRole

            2) send() puts an event on the 'eventQueue' keyed by (deliver_at, seq)
               -> deliver_at = now + link delay, seq is a running counter
               -> the event being handled at the time becomes the new event's parent

            3) run_until_quiescent() pops the minimum event, moves the clock to it
               and hands it to the handler of its destination

               i) a handler may send further events
               ii) a destination with no handler gets the event marked as dropped
               iii) a handler that cannot take the event raises, and the run stops

            4) repeat until the 'eventQueue' is empty
    '''

    def __init__(self, params: DelayParams, event_cap: Optional[int] = None):
        self.params    = params
        self.event_cap = DEFAULT_EVENT_CAP if event_cap is None else int(event_cap)
        if self.event_cap <= 0:
            raise ValueError(f"the event cap must be > 0, got {self.event_cap}")

        self.now   = 0.0
        self.trace = Trace()
        self.handlers: Dict[NodeRole, Handler] = {}

        # heap of (deliver_at, seq, event)
        self.eventQueue: List[Tuple[Ms, int, Event]] = []
        self._counter = itertools.count()
        self._current: Optional[Event] = None


    @property
    def scheduled(self) -> int:
        '''events scheduled so far, delivered or not'''
        return len(self.trace.events) + len(self.trace.dropped) + len(self.eventQueue)


    def register(self, role: NodeRole, handler: Handler) -> None:
        self.handlers[role] = handler


    def send(self,
        src    : NodeRole,
        dst    : NodeRole,
        kind   : MessageKind,
        payload: Optional[Payload] = None,
        ) -> Event:
        '''schedule a message for delivery one link delay from now'''
        delay  = link_delay(self.params, src, dst)
        parent = self._current.seq if self._current is not None else None
        event  = Event(
            deliver_at = self.now + delay,
            seq        = next(self._counter),
            src        = src,
            dst        = dst,
            kind       = kind,
            sent_at    = self.now,
            parent_seq = parent,
            payload    = payload,
        )
        heapq.heappush(self.eventQueue, (event.deliver_at, event.seq, event))
        return event


    def run_until_quiescent(self,
        initial_events: Iterable[Tuple[NodeRole, NodeRole, MessageKind]] = (),
        ) -> Trace:
        '''
        send the initial (src, dst, kind) triggers, then dispatch until nothing is left
        returns the engine's trace
        '''
        for src, dst, kind in initial_events:
            self.send(src, dst, kind)

        while self.eventQueue:
            if len(self.trace.events) >= self.event_cap:
                log.error("event cap of %d reached at t=%.3f, %d event(s) still queued", self.event_cap, self.now, len(self.eventQueue))
                raise NonTermination(f"more than {self.event_cap} events dispatched, the flow does not terminate")

            _, _, event = heapq.heappop(self.eventQueue)
            self.now = event.deliver_at

            handler = self.handlers.get(event.dst)
            if handler is None:
                log.warning("no node registered as %s, dropping %r", event.dst.name, event)
                self.trace.dropped.append(event)
                continue

            log.debug("t=%.3f %s -> %s %s", event.deliver_at, event.src.name, event.dst.name, event.kind.name)
            self.trace.events.append(event)
            self._current = event
            try:
                handler(event)
            finally:
                self._current = None

        self.trace.clock = self.now
        return self.trace


def critical_path(trace: Trace, final_event: Event) -> List[Event]:
    '''the chain of causal parents from the triggering event down to final_event'''
    index = trace.by_seq()
    path  = [final_event]
    while path[-1].parent_seq is not None:
        parent = index.get(path[-1].parent_seq)
        if parent is None:
            raise OrphanEvent(f"{path[-1]!r} names parent #{path[-1].parent_seq} which is not in the trace")
        path.append(parent)
    path.reverse()
    return path


def path_length(path: Sequence[Event]) -> Ms:
    '''sum of the link delays along a path'''
    return sum(event.delay for event in path)
