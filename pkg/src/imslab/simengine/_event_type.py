from dataclasses import dataclass, field
from imslab._type_hints import *
from imslab.domain import NodeRole, MessageKind, Payload


__all__ = ['Event']


@dataclass(frozen=True)
class Event:
    '''
    one scheduled message delivery
    events order by delivery time, ties fall back to the order they were scheduled in
    '''

    deliver_at: Ms
    seq       : int
    src       : NodeRole
    dst       : NodeRole
    kind      : MessageKind
    sent_at   : Ms = 0.0
    parent_seq: Optional[int] = None
    payload   : Optional[Payload] = field(default=None, compare=False)


    @property
    def sort_index(self) -> Tuple[Ms, int]:
        return (self.deliver_at, self.seq)


    @property
    def delay(self) -> Ms:
        return self.deliver_at - self.sent_at


    def __lt__(self, other: 'Event') -> bool:
        return self.sort_index < other.sort_index


    def __gt__(self, other: 'Event') -> bool:
        return self.sort_index > other.sort_index


    def record(self) -> Dict[str, Any]:
        '''the exported view of the event, key order is part of the format'''
        return {
            'sent_at'   : self.sent_at,
            'deliver_at': self.deliver_at,
            'src'       : self.src.name,
            'dst'       : self.dst.name,
            'kind'      : self.kind.name,
            'parent_seq': self.parent_seq,
        }


    def __repr__(self):
        return f"Event(#{self.seq} t={self.deliver_at:.3f} {self.src.name}->{self.dst.name} {self.kind.name})"
