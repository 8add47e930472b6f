"""Exception types raised across the toolkit."""


class FaultSatError(Exception):
    pass


class MiniCSyntaxError(SyntaxError, FaultSatError):
    def __init__(self, msg, line=None, col=None, filename=None):
        super().__init__(msg if line is None else f"{line}:{col}: {msg}")
        self.lineno = line
        self.offset = col
        self.filename = filename
        self.msg = msg


class CallCycleError(RecursionError, FaultSatError):
    pass


class UndeclaredVariableError(NameError, FaultSatError):
    pass


class UnrollBoundError(ValueError, FaultSatError):
    pass


class UnsupportedOperator(ValueError, FaultSatError):
    pass


class InvalidTestInput(ValueError, FaultSatError):
    pass


class DisconnectedTrace(ValueError, FaultSatError):
    pass


class NotAFailingTest(FaultSatError):
    pass


class NotAFailingProgram(FaultSatError):
    pass


class GranularityError(ValueError, FaultSatError):
    pass


class HardUnsat(FaultSatError):
    """The hard clauses of a MAX-SAT instance are unsatisfiable on their own."""


class ModelViolatesHard(ValueError, FaultSatError):
    pass


class NoFailingTests(FaultSatError):
    pass


class SolverTimeout(FaultSatError):
    pass
