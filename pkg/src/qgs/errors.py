"""Exception hierarchy.

Input problems derive from ``InputError`` (a ``ValueError``); numerical
breakdowns derive from ``NumericalError`` (an ``ArithmeticError``).  The CLI
maps the two families onto different exit codes.
"""


class QGSError(Exception):
    pass


class InputError(QGSError, ValueError):
    pass


class NumericalError(QGSError, ArithmeticError):
    pass


class IsolatedVertex(InputError):
    pass


class UnknownVertexReference(InputError):
    pass


class DuplicateIdentifier(InputError):
    pass


class DegreeBoundExceeded(InputError):
    pass


class OddGraphWithUnevenPotential(InputError):
    pass


class InvalidPotential(InputError):
    pass


class BandIndexOutOfRange(InputError, IndexError):
    pass


class MeshTooCoarse(InputError):
    pass


class WindowMismatch(InputError):
    pass


class NotAnEigenpair(InputError):
    pass


class DirichletPole(NumericalError):
    """Spectral parameter sits on (or within 1e-12 of) a Dirichlet eigenvalue."""


class ScanResolutionExceeded(NumericalError):
    pass


class EigensolverFailure(NumericalError):
    pass
