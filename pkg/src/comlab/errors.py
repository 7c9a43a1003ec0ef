"""Exception hierarchy shared by every comlab module."""


class ComlabError(Exception):
    """Base class for all errors raised by comlab."""


class DomainError(ComlabError, ValueError):
    """A point, radius or slice lies outside the region where a quantity is defined."""


class ConsistencyError(ComlabError, ArithmeticError):
    """An internal invariant failed (e.g. a metric lost positive-definiteness)."""


class ConfigError(ComlabError, ValueError):
    """A configuration object does not match the documented schema."""


class ContractError(ComlabError, RuntimeError):
    """A caller violated an operation's precondition."""
