"""Small-Big-small dissipative stabilization of the square GKP code.

One round couples the oscillator to a two-level ancilla prepared in its
ground state, applies the three-pulse unitary

    U_X = exp(i eps q sigma_y) exp(i sqrt(pi) p sigma_x) exp(i eps q sigma_y),
    U_Z = exp(i eps p sigma_y) exp(-i sqrt(pi) q sigma_x) exp(i eps p sigma_y),

with eps = (sqrt(pi)/2) Delta^2, and resets the ancilla.  The ground state
is the sigma_z = -1 eigenvector (physical convention); with that identification
the Kraus pair K_g = <g|U|g>, K_e = <e|U|g> contracts toward the
finite-energy code manifold.

Each round also applies a known, deterministic logical Pauli (X for an
X round, Z for a Z round) that experiments absorb into the software Pauli
frame; `evolve_sbs` tracks the frame so reported logicals refer to a fixed
frame, and the one-cycle fixed point is the |+Y> code state.
"""

import numpy as np
from scipy.linalg import expm

from ..errors import TruncationTooSmall, NumericalInstability
from .operators import operators
from .paulis import generalized_pauli
from .states import SQRT_PI, stabilizer_ops

_SX = np.array([[0.0, 1.0], [1.0, 0.0]], complex)
_SY = np.array([[0.0, -1.0j], [1.0j, 0.0]], complex)
_G = 1   # index of |g>: sigma_z |g> = -|g>
_E = 0


def sbs_round(axis: str, delta: float, D: int = 120, completeness_tol: float = 1e-9):
    """Unitary and Kraus pair of one sBs round along 'X' or 'Z'.

    Returns {'unitary': 2D x 2D, 'K_g': D x D, 'K_e': D x D}.  Kraus
    completeness is verified on the low Fock block; a violation raises
    TruncationTooSmall.
    """
    ops = operators(D)
    q, p = ops["q"], ops["p"]
    eps = SQRT_PI / 2.0 * delta ** 2
    if axis.upper() == "X":
        small = expm(1j * eps * np.kron(q, _SY))
        big = expm(1j * SQRT_PI * np.kron(p, _SX))
    elif axis.upper() == "Z":
        small = expm(1j * eps * np.kron(p, _SY))
        big = expm(-1j * SQRT_PI * np.kron(q, _SX))
    else:
        raise ValueError(f"axis must be 'X' or 'Z', got {axis!r}")
    U = small @ big @ small
    blocks = U.reshape(D, 2, D, 2)
    K_g = blocks[:, _G, :, _G].copy()
    K_e = blocks[:, _E, :, _G].copy()
    comp = K_g.conj().T @ K_g + K_e.conj().T @ K_e
    guard = max(8, D // 10)
    err = np.max(np.abs((comp - np.eye(D))[: D - guard, : D - guard]))
    if err > completeness_tol:
        raise TruncationTooSmall(f"Kraus completeness violated by {err:.2e} at D={D}")
    return {"unitary": U, "K_g": K_g, "K_e": K_e}


def _apply_pair(rho, kraus):
    return (kraus["K_g"] @ rho @ kraus["K_g"].conj().T +
            kraus["K_e"] @ rho @ kraus["K_e"].conj().T)


def evolve_sbs(rho0: np.ndarray, delta: float, rounds: int, D: int = None,
               trace_tol: float = 1e-6):
    """Iterate full XZ sBs cycles, recording stabilizer and logical traces.

    Returns a dict of arrays over rounds: re_Sx, re_Sp (finite-energy
    stabilizers), re_Sx_inf, re_Sp_inf, Z, X (frame-corrected logicals),
    n_mean, plus the final density matrix under 'rho'.  Trace drift beyond
    `trace_tol` per round raises NumericalInstability.
    """
    rho = np.asarray(rho0, complex).copy()
    if rho.ndim == 1:
        rho = np.outer(rho, rho.conj())
    if D is None:
        D = rho.shape[0]
    kx = sbs_round("X", delta, D)
    kz = sbs_round("Z", delta, D)
    stab_fin = stabilizer_ops(delta, D, "qubit", finite=True)
    stab_inf = stabilizer_ops(delta, D, "qubit", finite=False)
    Z_op = generalized_pauli("Z", D)
    X_op = generalized_pauli("X", D)
    n_op = operators(D)["n"]

    rec = {k: [] for k in ("re_Sx", "re_Sp", "re_Sx_inf", "re_Sp_inf", "Z", "X", "n_mean")}
    zsign = 1.0
    xsign = 1.0
    for _ in range(rounds):
        rho = _apply_pair(rho, kx)
        zsign = -zsign                      # X round applies a logical X
        rho = _apply_pair(rho, kz)
        xsign = -xsign                      # Z round applies a logical Z
        tr = float(np.real(np.trace(rho)))
        if abs(tr - 1.0) > trace_tol:
            raise NumericalInstability(f"trace drifted to {tr}; increase D")
        rho /= tr
        rec["re_Sx"].append(float(np.real(np.trace(stab_fin["S_x"] @ rho))))
        rec["re_Sp"].append(float(np.real(np.trace(stab_fin["S_z"] @ rho))))
        rec["re_Sx_inf"].append(float(np.real(np.trace(stab_inf["S_x"] @ rho))))
        rec["re_Sp_inf"].append(float(np.real(np.trace(stab_inf["S_z"] @ rho))))
        rec["Z"].append(zsign * float(np.real(np.trace(Z_op @ rho))))
        rec["X"].append(xsign * float(np.real(np.trace(X_op @ rho))))
        rec["n_mean"].append(float(np.real(np.trace(n_op @ rho))))
    out = {k: np.array(v) for k, v in rec.items()}
    out["rho"] = rho
    return out
