"""Finite-energy GKP states on a truncated Fock space.

States are built by applying the envelope exp(-Delta^2 n) to the ideal
position comb, expanded exactly in Hermite functions.  By construction they
are +1 eigenstates of the finite-energy stabilizers E S E^-1 up to
truncation error.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from ..errors import InvalidParameter, TruncationTooSmall
from .operators import hermite_basis, operators

SQRT_PI = np.sqrt(np.pi)

LEAKAGE_LEVELS = 5
LEAKAGE_TOL = 1e-6


@dataclass(frozen=True)
class GkpFockParams:
    delta: float                 # envelope parameter
    logical: str = "zero"        # 'zero' | 'one' | 'canonical'
    dim: int = 120
    t_max: int = None            # comb truncation; default from delta

    def __post_init__(self):
        if self.delta <= 0:
            raise InvalidParameter(f"delta must be positive, got {self.delta}")
        if self.logical not in ("zero", "one", "canonical"):
            raise InvalidParameter(f"unknown logical label {self.logical!r}")


def leakage(state_or_rho: np.ndarray, levels: int = LEAKAGE_LEVELS) -> float:
    """Population in the top `levels` Fock levels."""
    arr = np.asarray(state_or_rho)
    if arr.ndim == 1:
        return float(np.sum(np.abs(arr[-levels:]) ** 2))
    return float(np.sum(np.real(np.diag(arr)[-levels:])))


def gkp_state(params: GkpFockParams) -> np.ndarray:
    """Normalized finite-energy GKP state vector.

    Square-qubit states comb the position axis with spacing 2 sqrt(pi)
    (offset sqrt(pi) for logical one); the canonical state uses spacing
    sqrt(2 pi).  Raises TruncationTooSmall when the top Fock levels hold
    more than 1e-6 population.
    """
    D = params.dim
    if params.logical == "canonical":
        spacing, offset = np.sqrt(2.0 * np.pi), 0.0
    else:
        spacing, offset = 2.0 * SQRT_PI, (SQRT_PI if params.logical == "one" else 0.0)
    t_max = params.t_max
    if t_max is None:
        t_max = int(np.ceil(5.0 / (params.delta * spacing))) + 2
    envelope = np.exp(-params.delta ** 2 * np.arange(D))
    psi = np.zeros(D)
    for t in range(-t_max, t_max + 1):
        psi += envelope * hermite_basis(D, t * spacing + offset)
    psi = psi / np.linalg.norm(psi)
    if leakage(psi) > LEAKAGE_TOL:
        raise TruncationTooSmall(
            f"leakage {leakage(psi):.2e} above {LEAKAGE_TOL:.0e}; increase dim")
    return psi.astype(complex)


def logical_y_state(delta: float, dim: int = 120, sign: int = +1) -> np.ndarray:
    """Finite-energy |+Y> (or |-Y>) square-qubit state, the natural fixed
    point of one sharpen round in each quadrature."""
    psi0 = gkp_state(GkpFockParams(delta, "zero", dim))
    psi1 = gkp_state(GkpFockParams(delta, "one", dim))
    psi = psi0 + sign * 1j * psi1
    return psi / np.linalg.norm(psi)


def stabilizer_ops(delta: float, D: int, kind: str = "qubit", finite: bool = True):
    """Stabilizers {S_x, S_z} of the square code at truncation D.

    kind 'qubit' uses displacement length 2 sqrt(pi), 'canonical' uses
    sqrt(2 pi).  With finite=True the envelope-conjugated operators
    E S E^-1 = exp(i L (cosh(D^2) v + i sinh(D^2) v_perp)) are returned;
    these fix the finite-energy states exactly.
    """
    ops = operators(D)
    q, p = ops["q"], ops["p"]
    L = 2.0 * SQRT_PI if kind == "qubit" else np.sqrt(2.0 * np.pi)
    if finite:
        c, s = np.cosh(delta ** 2), np.sinh(delta ** 2)
        S_x = expm(-1j * L * (c * p - 1j * s * q))
        S_z = expm(1j * L * (c * q + 1j * s * p))
    else:
        S_x = expm(-1j * L * p)
        S_z = expm(1j * L * q)
    return {"S_x": S_x, "S_z": S_z}


def expectation(op: np.ndarray, state_or_rho: np.ndarray) -> complex:
    arr = np.asarray(state_or_rho)
    if arr.ndim == 1:
        return complex(arr.conj() @ op @ arr)
    return complex(np.trace(op @ arr))


def fidelity_to_pure(rho: np.ndarray, psi: np.ndarray) -> float:
    """<psi| rho |psi> for a density matrix against a pure target."""
    return float(np.real(psi.conj() @ rho @ psi))


def twirl_noise(delta: float):
    """Effective AGN variance of a finite-energy GKP state under twirling.

    Returns (sigma_gkp_sq, squeezing_db) with sigma^2 = tanh(delta^2 / 2)
    and s = -10 log10(2 sigma^2).
    """
    if delta <= 0:
        raise InvalidParameter(f"delta must be positive, got {delta}")
    sigma2 = float(np.tanh(delta ** 2 / 2.0))
    return sigma2, float(-10.0 * np.log10(2.0 * sigma2))
