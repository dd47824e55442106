"""
Exceptions raised by tpcpy.

Every error the library raises derives from :class:`TpcError`, so callers can catch the whole family
with one clause while the command module maps the kinds onto exit status.
"""


class TpcError(Exception):
    """Base class of all tpcpy errors."""


class InvalidArgumentError(TpcError, ValueError):
    """An argument lies outside the domain of the operation."""


class RegularityError(TpcError):
    """A random geometric graph could not be drawn with every square occupied."""


class DisconnectedGraphError(TpcError):
    """The operation needs a connected graph."""


class ProtocolPreconditionError(TpcError):
    """The graph does not satisfy a precondition of the averaging protocol."""


class UnsupportedTopologyError(TpcError):
    """The operation is not defined for this topology."""


class InvalidMatrixError(TpcError):
    """A matrix violates the structure an averaged matrix must have."""


class InvalidPathSetError(TpcError):
    """A canonical path uses a transition of zero probability."""


class SpecFileError(TpcError):
    """
    An experiment spec file could not be read or parsed.

    Parameters
    ----------
    text : str
    kind : {'io', 'parse'}
        Whether reading the file or parsing its content failed.
    """

    def __init__(self, text, kind='parse'):
        self.kind = kind
        super(SpecFileError, self).__init__(text)


class SpecValidationError(TpcError):
    """
    An experiment spec violates one or more constraints.

    Parameters
    ----------
    violations : list of str
        Every violation found, not only the first one.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        super(SpecValidationError, self).__init__('; '.join(self.violations))
