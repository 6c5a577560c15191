"""Exception hierarchy shared by every module.

Each error carries the process exit code the CLI reports for it.
"""

from __future__ import annotations


class Waring5Error(Exception):
    exit_code = 5


class InputError(Waring5Error):
    """Malformed or out-of-scope input (exit code 2)."""

    exit_code = 2


class ParseError(InputError):
    pass


class BadType(InputError):
    pass


class DegreeMismatch(InputError):
    pass


class VarMismatch(InputError):
    pass


class DegreeTooSmall(InputError):
    pass


class ZeroPolynomial(InputError):
    pass


class ZeroForm(ZeroPolynomial):
    pass


class DependentScheme(InputError):
    pass


class NonReducedInput(InputError):
    pass


class NotPlanar(InputError):
    pass


class NotInSpan(InputError):
    pass


class NotOnCurve(InputError):
    pass


class TooFewVariables(InputError):
    """Border rank 5 but fewer than 5 essential variables (outside the classified range)."""


class NonCurvilinear(InputError):
    """The recovered scheme has a component that is not a jet on a smooth curve."""


class MixedInexactExact(Waring5Error):
    pass


class NotBorderRankFive(Waring5Error):
    exit_code = 3


class IrrationalSupport(Waring5Error):
    """The scheme's support is not defined over the rationals.

    ``suggested_type`` is the type read off the factor degrees of the
    characteristic polynomial; it is reported but not certified.
    """

    exit_code = 4

    def __init__(self, message: str, suggested_type=None):
        super().__init__(message)
        self.suggested_type = suggested_type


class WitnessSearchFailed(Waring5Error):
    """No exact witness was found and numeric fallback was disabled."""

    exit_code = 4


class RecoveryInconsistent(Waring5Error):
    exit_code = 5


class PullbackMismatch(Waring5Error):
    exit_code = 5
