"""Bosonic noise channels: AGN sampling, loss-to-AGN conversions, capacity bounds.

All capacities are in qubits per channel use (base-2 logs, energy
unconstrained).
"""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidDimension, InvalidParameter, InvalidTransmittance, NotPositiveDefinite


@dataclass(frozen=True)
class NoiseSpec:
    """One of: 'agn' (Y or sigma2), 'loss' (eta, nbar), 'amp' (G, nbar)."""

    kind: str
    eta: float = None
    nbar: float = None
    G: float = None
    sigma2: float = None
    Y: np.ndarray = None

    def __post_init__(self):
        if self.kind == "loss":
            if self.eta is None or not (0.0 < self.eta <= 1.0):
                raise InvalidTransmittance(f"loss needs 0 < eta <= 1, got {self.eta}")
            if self.nbar is None or self.nbar < 0:
                raise InvalidParameter(f"loss needs nbar >= 0, got {self.nbar}")
        elif self.kind == "amp":
            if self.G is None or self.G < 1:
                raise InvalidParameter(f"amp needs G >= 1, got {self.G}")
            if self.nbar is None or self.nbar < 0:
                raise InvalidParameter(f"amp needs nbar >= 0, got {self.nbar}")
        elif self.kind == "agn":
            if self.Y is None and self.sigma2 is None:
                raise InvalidParameter("agn needs Y or sigma2")
            if self.sigma2 is not None and self.sigma2 < 0:
                raise InvalidParameter(f"agn needs sigma2 >= 0, got {self.sigma2}")
        else:
            raise InvalidParameter(f"unknown channel kind {self.kind!r}")

    def noise_matrix(self, n_modes: int = 1) -> np.ndarray:
        if self.kind != "agn":
            raise InvalidParameter("noise_matrix is defined for agn channels")
        if self.Y is not None:
            return np.asarray(self.Y, float)
        return self.sigma2 * np.eye(2 * n_modes)

    def to_json(self) -> dict:
        if self.kind == "loss":
            return {"kind": "loss", "eta": self.eta, "nbar": self.nbar}
        if self.kind == "amp":
            return {"kind": "amp", "gain": self.G, "nbar": self.nbar}
        if self.Y is not None:
            return {"kind": "agn", "Y": np.asarray(self.Y).tolist()}
        return {"kind": "agn", "sigma2": self.sigma2}

    @staticmethod
    def from_json(obj: dict) -> "NoiseSpec":
        kind = obj.get("kind")
        if kind == "loss":
            return NoiseSpec("loss", eta=obj["eta"], nbar=obj.get("nbar", 0.0))
        if kind == "amp":
            return NoiseSpec("amp", G=obj["gain"], nbar=obj.get("nbar", 0.0))
        if kind == "agn":
            if "Y" in obj:
                return NoiseSpec("agn", Y=np.asarray(obj["Y"], float))
            return NoiseSpec("agn", sigma2=float(obj["sigma2"]))
        raise InvalidParameter(f"unknown channel kind {kind!r}")


@dataclass(frozen=True)
class CapacityBounds:
    lower: float          # qubits/use, clamped at 0
    upper: float
    lower_vacuous: bool   # True when the achievable-rate formula went negative


def sample_agn(Y: np.ndarray, rng: np.random.Generator, size: int = None) -> np.ndarray:
    """Draw xi ~ N(0, Y) phase-space displacements.

    Returns shape (2N,) for size=None, else (size, 2N).  Uses Cholesky when
    Y is positive definite, eigenvalue factorization for semidefinite Y.
    """
    Y = np.asarray(Y, float)
    if Y.ndim != 2 or Y.shape[0] != Y.shape[1] or Y.shape[0] % 2:
        raise InvalidDimension(f"Y must be 2N x 2N, got {Y.shape}")
    sym_err = np.max(np.abs(Y - Y.T))
    if sym_err > 1e-10 * max(1.0, np.max(np.abs(Y))):
        raise NotPositiveDefinite("noise matrix not symmetric")
    try:
        L = np.linalg.cholesky(Y)
    except np.linalg.LinAlgError:
        w, V = np.linalg.eigh((Y + Y.T) / 2)
        if w.min() < -1e-10 * max(1.0, w.max(), 1.0):
            raise NotPositiveDefinite(f"noise matrix has negative eigenvalue {w.min():.3e}")
        L = V * np.sqrt(np.clip(w, 0.0, None))
    z = rng.standard_normal((size or 1, Y.shape[0]))
    out = z @ L.T
    return out[0] if size is None else out


def loss_to_agn(eta: float, nbar: float = 0.0, mode: str = "pre") -> float:
    """Effective AGN variance from converting a thermal-loss channel.

    mode='pre' amplifies before the loss, sigma^2 = (1-eta)(1+2*nbar);
    mode='post' amplifies after, sigma^2 = ((1-eta)/eta)(1+2*nbar).
    Pre-amplification never adds more noise than post-amplification.
    """
    if not (0.0 < eta <= 1.0):
        raise InvalidTransmittance(f"need 0 < eta <= 1, got {eta}")
    if nbar < 0:
        raise InvalidParameter(f"need nbar >= 0, got {nbar}")
    if mode == "pre":
        return (1.0 - eta) * (1.0 + 2.0 * nbar)
    if mode == "post":
        return (1.0 - eta) / eta * (1.0 + 2.0 * nbar)
    raise InvalidParameter(f"mode must be 'pre' or 'post', got {mode!r}")


def teleport_agn(eta: float, r: float) -> float:
    """AGN variance of teleportation-based conversion with a mid-point
    two-mode squeezed source of strength r: sqrt(eta) e^{-2r} + 1 - sqrt(eta)."""
    if not (0.0 < eta <= 1.0):
        raise InvalidTransmittance(f"need 0 < eta <= 1, got {eta}")
    if r < 0:
        raise InvalidParameter(f"need r >= 0, got {r}")
    return np.sqrt(eta) * np.exp(-2.0 * r) + 1.0 - np.sqrt(eta)


def thermal_entropy(nbar: float) -> float:
    """s_th(n) = (n+1) log2(n+1) - n log2(n); 0 at n = 0."""
    if nbar < 0:
        raise InvalidParameter(f"need nbar >= 0, got {nbar}")
    if nbar == 0:
        return 0.0
    return (nbar + 1) * np.log2(nbar + 1) - nbar * np.log2(nbar)


def capacity_bounds(channel: NoiseSpec) -> CapacityBounds:
    """Lower/upper bounds on the quantum capacity of a loss or AGN channel.

    Thermal loss: log2(eta/(1-eta)) - s_th(nbar) <= C <= log2((eta-(1-eta)nbar)
    / ((1-eta)(1+nbar))).  N-mode AGN with noise matrix Y: log2(1/(e^N
    sqrt(det Y))) <= C <= log2((1-sqrt(det Y))/sqrt(det Y)).  Negative values
    clamp to 0; a clamped lower bound is flagged vacuous.
    """
    if channel.kind == "loss":
        eta, nbar = channel.eta, channel.nbar
        if eta == 1.0:
            return CapacityBounds(np.inf, np.inf, False)
        lower = np.log2(eta / (1 - eta)) - thermal_entropy(nbar)
        num = eta - (1 - eta) * nbar
        den = (1 - eta) * (1 + nbar)
        upper = np.log2(num / den) if num / den > 1.0 else 0.0
    elif channel.kind == "agn":
        if channel.Y is not None:
            Y = np.asarray(channel.Y, float)
            N = Y.shape[0] // 2
            root_det = np.sqrt(np.linalg.det(Y))
        else:
            N = 1
            root_det = channel.sigma2
        if root_det <= 0:
            return CapacityBounds(np.inf, np.inf, False)
        lower = np.log2(1.0 / (np.e ** N * root_det))
        upper = np.log2((1 - root_det) / root_det) if root_det < 0.5 else 0.0
    else:
        raise InvalidParameter(f"no capacity bounds for channel kind {channel.kind!r}")
    vacuous = lower < 0
    lower = max(lower, 0.0)
    upper = max(upper, lower)
    return CapacityBounds(lower, upper, vacuous)
