"""Exception hierarchy shared by all modules."""


class DetuneSimError(Exception):
    """Base class for every error raised by this package."""


class NonHermitian(DetuneSimError):
    def __init__(self, violation, scale=1.0):
        self.violation = float(violation)
        super().__init__(
            f"matrix is not Hermitian: max |M - M^H| = {self.violation:.3e} "
            f"(scale {scale:.3e})"
        )


class DimensionMismatch(DetuneSimError):
    pass


class NonPhysicalState(DetuneSimError):
    pass


class DimensionCap(DetuneSimError):
    pass


class ExpectedResonance(DetuneSimError):
    pass


class DegenerateScale(DetuneSimError):
    pass


class AmbiguousBranches(DetuneSimError):
    pass


class DomainError(DetuneSimError, ValueError):
    pass


class InsufficientPoints(DetuneSimError):
    pass


class UnknownMetric(DetuneSimError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "unknown metric"


class ConfigError(DetuneSimError):
    pass


class ParseError(ConfigError):
    def __init__(self, msg, line=None, column=None):
        self.line = line
        self.column = column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{msg}{where}")


class ValidationError(ConfigError, ValueError):
    def __init__(self, msg, key=None):
        self.key = key
        super().__init__(msg)
