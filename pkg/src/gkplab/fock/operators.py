"""Truncated-oscillator operators (dimensionless quadratures, hbar = 1)."""

import warnings

import numpy as np
from scipy.linalg import expm

from ..errors import InvalidParameter


def operators(D: int):
    """Ladder and quadrature matrices {a, adag, n, q, p} at truncation D."""
    if D < 2:
        raise InvalidParameter(f"need D >= 2, got {D}")
    a = np.diag(np.sqrt(np.arange(1, D)), 1).astype(complex)
    adag = a.conj().T
    n = adag @ a
    q = (a + adag) / np.sqrt(2.0)
    p = -1j * (a - adag) / np.sqrt(2.0)
    return {"a": a, "adag": adag, "n": n, "q": q, "p": p}


def displacement_op(alpha: complex, D: int) -> np.ndarray:
    """D(alpha) = exp(alpha a^dag - alpha* a); warn when |alpha|^2 > D/4."""
    if abs(alpha) ** 2 > D / 4:
        warnings.warn(f"|alpha|^2 = {abs(alpha)**2:.1f} is large for truncation {D}; "
                      "unitarity degrades", stacklevel=2)
    ops = operators(D)
    return expm(alpha * ops["adag"] - np.conj(alpha) * ops["a"])


def exact_displacement(alpha: complex, D: int) -> np.ndarray:
    """Exact projected matrix elements <m|D(alpha)|n> for m, n < D.

    Unlike expm of the truncated generator, these are the true
    infinite-dimensional elements, so operators assembled from them have no
    spectral-edge artifacts (the matrix itself is only approximately unitary
    near the truncation).  Stable Laguerre recurrence along diagonals.
    """
    x = abs(alpha) ** 2
    if x == 0:
        return np.eye(D, dtype=complex)
    u = alpha / abs(alpha)
    out = np.zeros((D, D), complex)
    for k in range(D):
        if k == 0:
            T = np.exp(-x / 2.0)
            ph_lo = ph_up = 1.0
        else:
            log_fact = sum(np.log(j) for j in range(1, k + 1))
            T = np.exp(0.5 * k * np.log(x) - x / 2.0 - 0.5 * log_fact)
            ph_lo = u ** k
            ph_up = (-np.conj(u)) ** k
        T_prev = 0.0
        for n in range(D - k):
            out[n + k, n] = T * ph_lo
            out[n, n + k] = T * ph_up
            c1 = (2 * n + 1 + k - x) / np.sqrt((n + 1) * (n + k + 1))
            c2 = np.sqrt(n * (n + k) / ((n + 1.0) * (n + k + 1)))
            T, T_prev = c1 * T - c2 * T_prev, T
    return out


def hermite_basis(n_levels: int, x: float) -> np.ndarray:
    """Orthonormal Hermite functions psi_n(x) for n < n_levels.

    psi_n is the position wavefunction of Fock level n; the three-term
    recurrence is stable for the |x| <~ 20 used here.
    """
    out = np.zeros(n_levels)
    out[0] = np.pi ** -0.25 * np.exp(-x * x / 2.0)
    if n_levels > 1:
        out[1] = np.sqrt(2.0) * x * out[0]
    for n in range(1, n_levels - 1):
        out[n + 1] = np.sqrt(2.0 / (n + 1)) * x * out[n] - np.sqrt(n / (n + 1.0)) * out[n - 1]
    return out


def spectral_function(op: np.ndarray, fn) -> np.ndarray:
    """Apply a real scalar function to a Hermitian operator by eigen-decomposition."""
    w, V = np.linalg.eigh(op)
    return (V * fn(w)) @ V.conj().T


def modular_quadrature(op: np.ndarray, width: float) -> np.ndarray:
    """Symmetric modular version of a quadrature: eigenvalues mapped to
    [-width/2, width/2) about bin center 0."""
    return spectral_function(op, lambda w: (w + width / 2.0) % width - width / 2.0)
