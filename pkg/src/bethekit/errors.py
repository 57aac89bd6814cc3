"""Exception types raised by bethekit."""


class BetheError(Exception):
    """Base class for all bethekit errors."""


class InvalidInputError(BetheError, ValueError):
    pass


class PoleError(BetheError, ZeroDivisionError):
    """A denominator of the rational Bethe form vanishes.

    ``kind`` is ``"site"`` when the offending pair is (root, site) and
    ``"root"`` when it is (root, root); ``indices`` are 0-based.
    """

    def __init__(self, message, kind, indices):
        super().__init__(message)
        self.kind = kind
        self.indices = indices


class NonSimplePoleError(BetheError, ValueError):
    """Two poles of an identity integrand coincide within tolerance."""


class BranchPlacementError(BetheError, ValueError):
    pass


class DegenerateSystemError(BetheError, ArithmeticError):
    pass


class ApplicabilityError(BetheError, ValueError):
    pass
