"""Real symplectic linear algebra in the interleaved (q1, p1, ..., qN, pN) ordering.

All matrices are plain float ndarrays; ``hbar = 1`` and quadratures are
dimensionless.  Gaussian unitaries act on quadratures as ``r -> S r`` with
``S Omega S^T = Omega``.
"""

import numpy as np
from scipy.linalg import schur, sqrtm

from .errors import (
    InvalidDimension,
    InvalidGain,
    InvalidModes,
    NotPositiveDefinite,
)

DEFAULT_TOL = 1e-10


def omega(n_modes: int) -> np.ndarray:
    """N-mode symplectic form, direct sum of [[0, 1], [-1, 0]] blocks."""
    if n_modes < 1:
        raise InvalidDimension(f"n_modes must be >= 1, got {n_modes}")
    out = np.zeros((2 * n_modes, 2 * n_modes))
    for i in range(n_modes):
        out[2 * i, 2 * i + 1] = 1.0
        out[2 * i + 1, 2 * i] = -1.0
    return out


def n_modes_of(matrix: np.ndarray) -> int:
    """Mode count of a 2N x 2N matrix; raises on odd or non-square input."""
    m = np.asarray(matrix)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] % 2:
        raise InvalidDimension(f"expected square even-dimensional matrix, got shape {m.shape}")
    return m.shape[0] // 2


def is_symplectic(S: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    """True iff max|S Omega S^T - Omega| <= tol."""
    S = np.asarray(S, float)
    n = n_modes_of(S)
    O = omega(n)
    return bool(np.max(np.abs(S @ O @ S.T - O)) <= tol)


def rotation(phi: float) -> np.ndarray:
    """Single-mode phase rotation, takes a -> a e^{-i phi}."""
    c, s = np.cos(phi), np.sin(phi)
    return np.array([[c, s], [-s, c]])


def squeeze(r: float) -> np.ndarray:
    """Single-mode squeezer diag(e^r, e^-r)."""
    return np.diag([np.exp(r), np.exp(-r)])


def beamsplitter(theta: float) -> np.ndarray:
    """Two-mode beamsplitter with transmittance cos^2(theta)."""
    c, s = np.cos(theta), np.sin(theta)
    I2 = np.eye(2)
    return np.block([[c * I2, s * I2], [-s * I2, c * I2]])


def two_mode_squeeze(G: float) -> np.ndarray:
    """Two-mode squeezing with gain G >= 1."""
    if G < 1:
        raise InvalidGain(f"gain must be >= 1, got {G}")
    Z = np.diag([1.0, -1.0])
    I2 = np.eye(2)
    return np.block([[np.sqrt(G) * I2, np.sqrt(G - 1) * Z], [np.sqrt(G - 1) * Z, np.sqrt(G) * I2]])


def sum_gate() -> np.ndarray:
    """SUM gate (CV CNOT): q_B -> q_B + q_A, p_A -> p_A - p_B."""
    Pq = np.diag([1.0, 0.0])
    Pp = np.diag([0.0, 1.0])
    I2 = np.eye(2)
    return np.block([[I2, -Pp], [Pq, I2]])


def embed(gate: np.ndarray, targets, n_modes: int) -> np.ndarray:
    """Embed a 1- or 2-mode gate on `targets`, identity elsewhere.

    `targets` is a sequence of distinct mode indices with length matching
    the gate (1 mode for 2x2, 2 modes for 4x4).
    """
    gate = np.asarray(gate, float)
    targets = list(targets)
    k = gate.shape[0] // 2
    if len(targets) != k:
        raise InvalidModes(f"gate acts on {k} modes, got targets {targets}")
    if len(set(targets)) != len(targets):
        raise InvalidModes(f"duplicate targets {targets}")
    if any(t < 0 or t >= n_modes for t in targets):
        raise InvalidModes(f"targets {targets} out of range for {n_modes} modes")
    S = np.eye(2 * n_modes)
    for bi, mi in enumerate(targets):
        for bj, mj in enumerate(targets):
            S[2 * mi:2 * mi + 2, 2 * mj:2 * mj + 2] = gate[2 * bi:2 * bi + 2, 2 * bj:2 * bj + 2]
    return S


def standard_gate(kind: str, n_modes: int = None, targets=None, **params) -> np.ndarray:
    """Named gate embedded into an N-mode symplectic matrix.

    kind is one of 'rotation' (phi), 'squeeze' (r), 'beamsplitter' (theta),
    'two_mode_squeeze' (G), 'sum', 'identity'.  With `n_modes`/`targets`
    omitted the bare 1- or 2-mode matrix is returned.
    """
    builders = {
        "rotation": lambda: rotation(params["phi"]),
        "squeeze": lambda: squeeze(params["r"]),
        "beamsplitter": lambda: beamsplitter(params["theta"]),
        "two_mode_squeeze": lambda: two_mode_squeeze(params["G"]),
        "sum": sum_gate,
        "identity": lambda: np.eye(2 * (n_modes or 1)),
    }
    if kind not in builders:
        raise InvalidModes(f"unknown gate kind {kind!r}")
    gate = builders[kind]()
    if kind == "identity" or n_modes is None:
        return gate
    if targets is None:
        targets = list(range(gate.shape[0] // 2))
    return embed(gate, targets, n_modes)


def compose(*mats: np.ndarray) -> np.ndarray:
    """Matrix product S_k ... S_2 S_1 (first argument applied first)."""
    out = np.asarray(mats[0], float)
    for m in mats[1:]:
        m = np.asarray(m, float)
        if m.shape[1] != out.shape[0]:
            raise InvalidDimension(f"cannot compose {out.shape} with {m.shape}")
        out = m @ out
    return out


def direct_sum(*mats: np.ndarray) -> np.ndarray:
    """Block-diagonal direct sum."""
    mats = [np.asarray(m, float) for m in mats]
    n = sum(m.shape[0] for m in mats)
    out = np.zeros((n, n))
    at = 0
    for m in mats:
        k = m.shape[0]
        out[at:at + k, at:at + k] = m
        at += k
    return out


def apply_to_covariance(S: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Propagate a covariance matrix: Y -> S Y S^T."""
    S = np.asarray(S, float)
    Y = np.asarray(Y, float)
    if S.shape[1] != Y.shape[0]:
        raise InvalidDimension(f"dimension mismatch {S.shape} vs {Y.shape}")
    return S @ Y @ S.T


def williamson(Y: np.ndarray, tol: float = 1e-9):
    """Williamson normal form of a positive definite covariance matrix.

    Returns (S, nu) with S symplectic, nu the symplectic eigenvalues in
    non-increasing order, and S @ Y @ S.T = diag(nu_1, nu_1, ..., nu_N, nu_N).

    Algorithm: real Schur form of X^-1 Omega X^-1 with X = sqrtm(Y); the
    antisymmetric Schur blocks carry 1/nu_i and the Schur vectors, combined
    with X^-1, give a symplectic congruence exactly (up to roundoff).
    """
    Y = np.asarray(Y, float)
    n = n_modes_of(Y)
    if np.max(np.abs(Y - Y.T)) > tol * max(1.0, np.max(np.abs(Y))):
        raise NotPositiveDefinite("covariance matrix is not symmetric")
    evals = np.linalg.eigvalsh((Y + Y.T) / 2)
    if evals.min() <= tol * max(1.0, evals.max()):
        raise NotPositiveDefinite(f"covariance not positive definite (min eig {evals.min():.3e})")

    X = sqrtm((Y + Y.T) / 2).real
    Xinv = np.linalg.inv(X)
    r1 = Xinv @ omega(n) @ Xinv
    r1 = (r1 - r1.T) / 2
    T, Q = schur(r1, output="real")
    # each 2x2 Schur block is [[0, t], [-t, 0]]; flip to t > 0, then sort
    ts = np.empty(n)
    for i in range(n):
        t = T[2 * i, 2 * i + 1]
        if t < 0:
            Q[:, [2 * i, 2 * i + 1]] = Q[:, [2 * i + 1, 2 * i]]
            t = -t
        ts[i] = t
    nus = 1.0 / ts
    order = np.argsort(-nus)
    perm = np.zeros((2 * n, 2 * n))
    for new, old in enumerate(order):
        perm[2 * old, 2 * new] = 1.0
        perm[2 * old + 1, 2 * new + 1] = 1.0
    Qs = Q @ perm
    nus = nus[order]
    S = np.diag(np.repeat(np.sqrt(nus), 2)) @ Qs.T @ Xinv
    return S, nus
