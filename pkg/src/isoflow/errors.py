"""Exception types raised by isoflow."""


class IsoflowError(Exception):
    """Base class for all library errors."""


class SingularInput(IsoflowError):
    """The input matrix is numerically singular."""


class ZeroMinor(IsoflowError):
    """A leading principal minor vanishes.

    ``k`` is the size of the first failing top-left block (1-based).
    """

    def __init__(self, k, message=None):
        self.k = k
        super().__init__(message or f"leading minor of order {k} is zero")


class ComplexSpectrum(IsoflowError):
    """The matrix has eigenvalues with a nonzero imaginary part."""


class DegenerateSpectrum(IsoflowError):
    """Two eigenvalues are closer than the gap tolerance."""


class NonpositiveSpectrum(IsoflowError):
    """``log`` was requested on a matrix with a nonpositive eigenvalue."""


class NotInChart(IsoflowError):
    """The matrix lies outside the domain of the chart ``pi``.

    ``k`` is the order of the first vanishing leading minor of the frame.
    """

    def __init__(self, pi, k):
        self.pi = pi
        self.k = k
        super().__init__(f"matrix not in chart {pi}: leading minor {k} vanishes")


class OrderMismatch(IsoflowError):
    """p does not strictly decrease along the chart-ordered spectrum."""


class ZeroAnchor(IsoflowError):
    """The anchor coordinate of a straight-line chart is zero."""


class NonmonotonicFunction(IsoflowError):
    """p is not strictly monotonic on the spectrum."""


class FlowOverflow(IsoflowError, OverflowError):
    """A closed-form exponent left the representable floating point range."""


class DegenerateSingularValues(IsoflowError):
    """Singular values are not simple (or one of them vanishes)."""


class NotInSvdChart(IsoflowError):
    """The matrix lies outside the SVD chart ``(pi, rho, E)``."""

    def __init__(self, pi, rho, E, reason=""):
        self.pi, self.rho, self.E = pi, rho, E
        msg = f"matrix not in svd chart (pi={pi}, rho={rho}, E={tuple(E)})"
        if reason:
            msg += f": {reason}"
        super().__init__(msg)


class NonUnitConjugator(IsoflowError):
    """A computed conjugator lost its unit diagonal to round-off."""
