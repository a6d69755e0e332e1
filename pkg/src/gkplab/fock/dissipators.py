"""Jump-operator families for Lindblad evolution."""

import numpy as np
from scipy.linalg import expm

from ..errors import InvalidParameter
from .operators import modular_quadrature, operators
from .paulis import XI
from .states import SQRT_PI


def dissipator_set(kind: str, D: int, delta: float = None, kappa: float = None,
                   kappa_phi: float = None) -> list:
    """Named dissipator lists for the Lindblad integrator.

    'modular' (delta): d_x = 2 sqrt(pi) (q_[m] + i delta^2 p) and
        d_p = 2 sqrt(pi) (p_[m] - i delta^2 q), modular bin sqrt(pi)
        (square-qubit stabilizers); unit rate, scale via `rates`.
    'displacement' (delta): L_k = A R_{k pi/2} e^{i xi q} (I - eps p)
        R_{k pi/2}^dag - I for k = 0..3, eps = xi sinh(delta),
        A = exp(-xi eps / 2), xi = 2 sqrt(pi); unit rate.
    'loss' (kappa): sqrt(kappa) a.
    'dephasing' (kappa_phi): sqrt(2 kappa_phi) n.
    'agn' (kappa): the pair sqrt(kappa) q, sqrt(kappa) p.
    """
    ops = operators(D)
    kind = kind.lower()
    if kind == "modular":
        if delta is None or delta <= 0:
            raise InvalidParameter("modular needs delta > 0")
        q_m = modular_quadrature(ops["q"], SQRT_PI)
        p_m = modular_quadrature(ops["p"], SQRT_PI)
        d_x = 2.0 * SQRT_PI * (q_m + 1j * delta ** 2 * ops["p"])
        d_p = 2.0 * SQRT_PI * (p_m - 1j * delta ** 2 * ops["q"])
        return [d_x, d_p]
    if kind == "displacement":
        if delta is None or delta <= 0:
            raise InvalidParameter("displacement needs delta > 0")
        eps = XI * np.sinh(delta)
        amp = np.exp(-XI * eps / 2.0)
        core = expm(1j * XI * ops["q"]) @ (np.eye(D) - eps * ops["p"])
        eye = np.eye(D)
        out = []
        for k in range(4):
            rot = np.diag(np.exp(1j * k * np.pi / 2.0 * np.arange(D)))
            out.append(amp * rot @ core @ rot.conj().T - eye)
        return out
    if kind == "loss":
        if kappa is None or kappa < 0:
            raise InvalidParameter("loss needs kappa >= 0")
        return [np.sqrt(kappa) * ops["a"]]
    if kind == "dephasing":
        if kappa_phi is None or kappa_phi < 0:
            raise InvalidParameter("dephasing needs kappa_phi >= 0")
        return [np.sqrt(2.0 * kappa_phi) * ops["n"]]
    if kind == "agn":
        if kappa is None or kappa < 0:
            raise InvalidParameter("agn needs kappa >= 0")
        return [np.sqrt(kappa) * ops["q"], np.sqrt(kappa) * ops["p"]]
    raise InvalidParameter(f"unknown dissipator kind {kind!r}")
