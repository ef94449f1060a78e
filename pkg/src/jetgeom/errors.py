"""Exception hierarchy shared by every module of the package."""


class JetGeomError(Exception):
    """Base class for all errors raised by jetgeom."""


class SingularMatrix(JetGeomError, ArithmeticError):
    pass


class NonInvertibleMetric(SingularMatrix):
    """The fundamental tensor of a Lagrangian cannot be inverted at a point."""


class MalformedField(JetGeomError, ValueError):
    pass


class ParseError(JetGeomError, ValueError):
    """Bad configuration text. Carries the offending line and key when known."""

    def __init__(self, message, line=None, key=None):
        self.line = line
        self.key = key
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"key {key!r}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)


class DomainError(JetGeomError, ValueError):
    """Evaluation requested outside the domain of a geometric object."""

    def __init__(self, message, point=None):
        self.point = point
        if point is not None:
            message = f"{message} at {point}"
        super().__init__(message)


class DomainExit(DomainError):
    """An integrated trajectory left the domain; ``last_t`` is the last valid time."""

    def __init__(self, message, last_t, point=None):
        self.last_t = last_t
        super().__init__(f"{message} (last valid t = {last_t!r})", point)


class SignatureMismatch(JetGeomError, ArithmeticError):
    pass


class InvalidConstant(JetGeomError, ValueError):
    pass
