"""Error taxonomy shared by the whole package.

Every class derives from :class:`ToolkitError` (itself a ``ValueError``) so
callers can catch broadly, while tests and the CLI can distinguish the
failure kind.
"""


class ToolkitError(ValueError):
    """Base class for all errors raised by this package."""


class DimensionError(ToolkitError):
    """An array has the wrong shape for the requested operation."""


class ContractError(ToolkitError):
    """An input violates a structural contract (e.g. not Hermitian)."""


class DomainError(ToolkitError):
    """An argument lies outside the mathematical domain of the operation."""


class ParameterError(ToolkitError):
    """A scalar/structural parameter is invalid (wrong sign, wrong type)."""


class GeometryError(ToolkitError):
    """A coordinate lies outside the stack, or interval endpoints are bad."""


class NumericRangeError(ToolkitError):
    """A computation overflowed or produced non-finite entries."""


class SingularMatrixError(ToolkitError):
    """A matrix is singular or numerically too ill-conditioned to use.

    Carries the 1-norm condition estimate that triggered the failure in
    :attr:`condition` (``inf`` for exactly singular input).
    """

    def __init__(self, message: str, condition: float = float("inf")):
        super().__init__(message)
        self.condition = float(condition)


class StackParseError(ToolkitError):
    """A stack/config document failed validation.

    :attr:`key` names the offending field (dotted path into the document).
    """

    def __init__(self, message: str, key: str = ""):
        super().__init__(message)
        self.key = key
