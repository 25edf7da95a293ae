"""Exception types shared across the package."""


class TwirlingError(Exception):
    """Base class for all errors raised by :mod:`twirling`."""


class InvalidSpec(TwirlingError, ValueError):
    """Representation family parameters are invalid."""


class InvalidInput(TwirlingError, ValueError):
    """An argument violates an operation's precondition."""


class NumericFailure(TwirlingError, ArithmeticError):
    """A numerical routine produced non-finite or unusable output."""


class NotRepresentable(TwirlingError, ValueError):
    """A GKLS form has Hamiltonian or jump operators outside V_U."""


class NotPauli(TwirlingError, ValueError):
    """A qubit map could not be written as a frame-rotated Pauli channel."""


class StepTooCoarse(TwirlingError, ValueError):
    """Time step too large for Bernoulli thinning of the jump process."""


class AmbiguousPreimage(UserWarning):
    """The Lie-algebra preimage is not unique; a minimum-norm one was used."""
