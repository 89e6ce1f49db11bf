"""Exception hierarchy shared by every toraldyn module."""


class ToralDynError(Exception):
    """Base class for all errors raised by toraldyn."""


class ParseError(ToralDynError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f" (line {line}" + (f", column {column})" if column is not None else ")")
        super().__init__(message + where)


class DimMismatch(ToralDynError):
    pass


class DegreeZero(ToralDynError):
    pass


class NotUnimodular(ToralDynError):
    pass


class DefectiveMatrix(ToralDynError):
    pass


class UnresolvedModulus(ToralDynError):
    pass


class InsideWeakStable(ToralDynError):
    pass


class AmbiguousDominance(ToralDynError):
    pass


class BoxTooSmall(ToralDynError):
    pass


class GuaranteeViolated(ToralDynError):
    pass


class PrecisionExhausted(ToralDynError):
    def __init__(self, message, stage=None):
        self.stage = stage
        super().__init__(message if stage is None else f"{stage}: {message}")


class QuadratureUnstable(ToralDynError):
    pass
