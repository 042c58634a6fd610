"""Exception hierarchy shared by all modules."""


class MultifractalError(Exception):
    """Base class for every error raised by the package."""


class DomainError(MultifractalError, ValueError):
    """A requested moment of the driving law is infinite."""


class ModelUnusable(MultifractalError, ValueError):
    """psi'(1) >= 1: no moment above one is finite, estimation is meaningless."""


class InvalidModel(MultifractalError, ValueError):
    pass


class InvalidH(MultifractalError, ValueError):
    pass


class ValidityError(MultifractalError, ValueError):
    """H - psi(2)/2 <= 1/2, the walk with H > 1/2 does not exist."""


class EmbeddingFailure(MultifractalError, RuntimeError):
    pass


class NonFinite(MultifractalError, ArithmeticError):
    pass


class DegenerateSample(MultifractalError, ValueError):
    pass


class ConditionViolated(MultifractalError, ValueError):
    pass


class ShapeError(MultifractalError, ValueError):
    pass


class TooFewSamples(MultifractalError, ValueError):
    pass


class NonNumeric(MultifractalError, ValueError):
    pass


class ParseError(MultifractalError, ValueError):
    pass


class ValidationError(MultifractalError, ValueError):
    """Config rejected; ``violations`` lists every failed inequality."""

    def __init__(self, violations):
        if isinstance(violations, str):
            violations = [violations]
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class ReplicationError(MultifractalError, RuntimeError):
    def __init__(self, index, cause):
        self.index = index
        self.cause = cause
        super().__init__(f"replication {index} failed: {cause!r}")
