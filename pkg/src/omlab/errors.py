"""Exception types shared across the package."""


class OmlabError(Exception):
    """Base class for all errors raised by this package."""


class MixedLattice(OmlabError):
    """Two elements from different finite lattices were combined."""


class DimMismatch(OmlabError):
    """Two subspaces with different ambient dimensions were combined."""


class NotHermitian(OmlabError):
    """An operator expected to be Hermitian is not, beyond tolerance."""


class AmbiguousSpectrum(OmlabError):
    """An eigenvalue sits too close to a classification boundary to decide.

    Carries the offending spectrum so callers can inspect or widen tolerances.
    """

    def __init__(self, message: str, spectrum=()):
        super().__init__(message)
        self.spectrum = tuple(float(x) for x in spectrum)


class NoRefutation(OmlabError):
    """No refuting observable exists for the given element."""


class NotIncompatible(OmlabError):
    """A witness was requested for a pair that is in fact compatible."""


class UnknownVertex(OmlabError):
    """A vertex handle does not belong to the graph it was used with."""


class ProbeRequired(OmlabError):
    """A check over an infinite label lattice needs a finite probe set."""


class UnsupportedFilter(OmlabError):
    """The requested filter query is not decidable in the stored form."""


class ParseError(OmlabError):
    """A workspace file is not well-formed JSON of the documented shape."""


class ValidationError(OmlabError):
    """A parsed object fails its semantic validator."""
