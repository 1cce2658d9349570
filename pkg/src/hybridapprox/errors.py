"""Exception hierarchy shared by all modules."""


class HybridError(Exception):
    """Base class for library errors."""


class ParameterError(HybridError, ValueError):
    """Invalid or inconsistent input parameter."""


class DomainError(ParameterError):
    """Argument lies outside the domain of the operation (e.g. x not in [0, 1))."""


class DimensionError(ParameterError):
    """Vector lengths or point-set dimensions do not match."""


class PrecisionError(ParameterError):
    """Input needs more base-b digits than the requested precision provides."""


class DivergenceError(ParameterError):
    """A series or product that the operation relies on diverges for these inputs."""


class UnsupportedError(HybridError):
    """The operation is not defined for this kind of input (e.g. explicit weight lists)."""


class ConsistencyError(HybridError):
    """An internal guarantee (such as a proven error bound) was violated."""
