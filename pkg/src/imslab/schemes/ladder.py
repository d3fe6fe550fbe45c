from imslab._type_hints import *
from .flows import Flow
from .handover import HandoverResult


def render_ladder(flow: Flow, result: Optional[HandoverResult] = None) -> str:
    '''
    one line per leg, e.g. "t=+T_op MN -> oP-CSCF : MoveNotify"
    concurrent legs are tagged, and with a simulated result each line also gets its delivery time
    '''
    delivered = {}
    if result is not None:
        delivered = {result.legs[event.seq].name: event.deliver_at for event in result.trace.events if event.seq in result.legs}

    lines = [f"# {flow.scheme.value}"]
    for leg in flow:
        line = f"t=+{leg.delay_symbol} {leg.src.label} -> {leg.dst.label} : {leg.kind.name}"
        if leg.concurrent:
            line += '  [concurrent]'
        if leg.name in delivered:
            line += f'  @ {delivered[leg.name]:.3f} ms'
        lines.append(line)
    return '\n'.join(lines) + '\n'
