"""Exception types shared across the package."""


class GkpLabError(Exception):
    """Base class for all gkplab errors."""


class InvalidDimension(GkpLabError, ValueError):
    """Matrix or vector dimensions are inconsistent or not even."""


class InvalidParameter(GkpLabError, ValueError):
    """A scalar parameter is outside its allowed range."""


class InvalidGain(InvalidParameter):
    """Two-mode squeezing gain below 1."""


class InvalidModes(GkpLabError, ValueError):
    """Bad mode indices (duplicate or out of range)."""


class InvalidTransmittance(InvalidParameter):
    """Loss transmittance outside (0, 1]."""


class NotPositiveDefinite(GkpLabError, ValueError):
    """Matrix expected to be positive (semi)definite is not."""


class NotIntegral(GkpLabError, ValueError):
    """Symplectic Gram matrix has a non-integer entry."""


class InvalidCodeDimension(GkpLabError, ValueError):
    """det(Gram) is not a perfect square of a positive integer."""


class UnsupportedCodeDimension(GkpLabError, ValueError):
    """Operation requires a qubit (d=2) or canonical (d=1) code."""


class SearchBoundTooSmall(GkpLabError, RuntimeError):
    """Lattice enumeration hit the boundary of the coefficient box."""


class NotInDual(GkpLabError, ValueError):
    """Vector is not a dual-lattice point within tolerance."""


class ConcatenationInvalid(GkpLabError, ValueError):
    """Concatenation inputs mismatch or determinant is not 2**k."""


class SingularBasis(GkpLabError, ValueError):
    """Basis columns are linearly dependent."""


class NonCanonicalAncilla(GkpLabError, ValueError):
    """O2O ancilla lattice must have code dimension d=1."""


class NumericalSingularity(GkpLabError, RuntimeError):
    """A matrix inversion failed inside a numeric pipeline."""


class TruncationTooSmall(GkpLabError, RuntimeError):
    """Fock-space truncation leaks too much population."""


class StepTooLarge(GkpLabError, ValueError):
    """Integrator step violates the stability precondition."""


class NumericalInstability(GkpLabError, RuntimeError):
    """Trace or positivity drift exceeded tolerance during evolution."""
