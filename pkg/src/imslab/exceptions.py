class ImsLabError(Exception):
    '''base class of every error raised by imslab'''


class UnknownPair(ImsLabError, KeyError):
    '''two node roles have no link delay defined between them'''

    def __str__(self):
        # KeyError quotes its argument, which reads badly in diagnostics
        return str(self.args[0]) if self.args else ''


class InvalidParamName(ImsLabError, ValueError):
    '''a name that is not one of the DelayParams fields'''


class ParamFileError(ImsLabError, ValueError):
    '''a parameter file that cannot be read or is missing fields'''


class ContextMissing(ImsLabError):
    '''a context-transfer scheme needed a session context that is not there'''


class SimulationError(ImsLabError):
    '''base class of engine failures'''


class HandlerPanic(SimulationError):
    '''a node received a message kind its state machine has no transition for'''


class NonTermination(SimulationError):
    '''the event count went past the configured cap'''


class OrphanEvent(SimulationError):
    '''the causal parent of an event is not in the trace'''
