from .flows import Leg, Flow, define_flow
from .nodes import NodeState, DEFAULT_SESSION, DEFAULT_QOS, transfer_context
from .handover import HandoverResult, HandoverRun, run_handover, message_counts, SLACK, BRANCH_BOUND
from .ladder import render_ladder
