"""Exception hierarchy. Every error the library raises derives from KolmoError."""


class KolmoError(Exception):
    pass


class DomainViolation(KolmoError, ValueError):
    pass


class NoConvergence(KolmoError, RuntimeError):
    pass


class SingularJacobian(KolmoError, ArithmeticError):
    pass


class UnknownModel(KolmoError, KeyError):
    pass


class InvalidParameters(KolmoError, ValueError):
    pass


class NeitherVariant(KolmoError):
    """Neither sign condition holds on the probe grid.

    ``point`` is the first probe at which both conditions were violated.
    """

    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class QuadratureFailure(KolmoError, RuntimeError):
    pass


class NonpositiveDenominator(KolmoError, ValueError):
    pass


class OutOfTable(KolmoError, ValueError):
    pass


class NoRoot(KolmoError, ValueError):
    pass


class NoRootInInterval(NoRoot):
    pass


class HypothesisViolated(KolmoError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class StepUnderflow(KolmoError, RuntimeError):
    pass


class LeftDomain(KolmoError, RuntimeError):
    pass


class NotASaddle(KolmoError):
    pass


class DidNotApproachOrigin(KolmoError, RuntimeError):
    pass


class DivisionByZero(KolmoError, ZeroDivisionError):
    pass
