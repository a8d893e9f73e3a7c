"""Exception hierarchy."""


class SemigroupForgeError(Exception):
    """Base class for all library errors."""


class InvalidDimensionError(SemigroupForgeError, ValueError):
    pass


class InvariantError(SemigroupForgeError, ValueError):
    """A domain object was constructed in violation of its invariants."""


class NotCompletelyPositiveError(SemigroupForgeError, ValueError):
    """Raised when an operation needs a positive semidefinite matrix and got one
    with a negative eigenvalue.

    The offending eigenvalue is kept on ``eigenvalue``.
    """

    def __init__(self, message, eigenvalue):
        super().__init__(f"{message} (min eigenvalue {eigenvalue:.6g})")
        self.eigenvalue = float(eigenvalue)


class BlockPositivityGapError(NotCompletelyPositiveError):
    """A dynamical matrix that is not positive semidefinite has no
    ``sum mu W (x) conj(W)`` decomposition, even if it is block positive."""


class NotHermiticityPreservingError(SemigroupForgeError, ValueError):
    pass


class NonPhysicalInputError(SemigroupForgeError, ValueError):
    """Input parameters describe an unphysical object (negative potential,
    mismatched cure map, rates with the wrong ordering, ...)."""


class StiffnessError(SemigroupForgeError, RuntimeError):
    pass


class AccuracyError(SemigroupForgeError, RuntimeError):
    pass


class MissingSpectralDataError(SemigroupForgeError, ValueError):
    pass
