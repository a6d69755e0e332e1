"""Generalized GKP Pauli operators, defined on the whole oscillator space."""

import numpy as np

from ..errors import InvalidParameter
from .operators import operators, spectral_function

XI = 2.0 * np.sqrt(np.pi)    # square-qubit stabilizer displacement length


def generalized_pauli(axis: str, D: int) -> np.ndarray:
    """Z = sgn[cos(xi q / 2)] or X = sgn[cos(xi p / 2)] with xi = 2 sqrt(pi).

    Built spectrally from the truncated quadrature; squares to the identity
    away from the (measure-zero) sign zeros and agrees with the logical
    Pauli on the code manifold.
    """
    if D < 40:
        raise InvalidParameter(f"need D >= 40 for a faithful sign function, got {D}")
    ops = operators(D)
    quad = ops["q"] if axis.upper() == "Z" else ops["p"] if axis.upper() == "X" else None
    if quad is None:
        raise InvalidParameter(f"axis must be 'Z' or 'X', got {axis!r}")
    return spectral_function(quad, lambda w: np.sign(np.cos(XI * w / 2.0)))
