"""Error rates for multimode GKP qubits under iid additive Gaussian noise.

Closed-form Pauli error probabilities, brute-force closest-vector decoding,
and a chunk-deterministic Monte Carlo harness.  Decoding model: exact CVP on
the scaled primal lattice, residual snapped to the scaled dual lattice and
classified into Pauli cosets (minimum-distance decoding).
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc

from .errors import SearchBoundTooSmall, UnsupportedCodeDimension
from .lattices import GkpLattice, PauliData, _integer_box, dual, pauli_data
from .rng import chunk_sizes, stream

_PAULIS = ("X", "Y", "Z")


@dataclass(frozen=True)
class ErrorRates:
    p_x: float
    p_y: float
    p_z: float
    p_e: float                      # union bound, clamped to [0, 1]
    trials: int                     # 0 for closed form
    stderr: tuple                   # (se_x, se_y, se_z)

    def rate(self, pauli: str) -> float:
        return {"X": self.p_x, "Y": self.p_y, "Z": self.p_z}[pauli]


def pauli_error_prob(lattice: GkpLattice, sigma: float, coeff_bound: int = 4) -> ErrorRates:
    """Closed-form p_J = erfc(sqrt(ell^2 |j|^2 / (8 sigma^2))) per Pauli coset."""
    if lattice.d != 2:
        raise UnsupportedCodeDimension(f"need d = 2, got {lattice.d}")
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    pd = pauli_data(lattice, coeff_bound)
    ps = {}
    for name, dist in zip(_PAULIS, (pd.distances[0], pd.distances[1], pd.distances[2])):
        ps[name] = float(erfc(np.sqrt(lattice.ell ** 2 * dist ** 2 / (8.0 * sigma ** 2))))
    p_e = min(1.0, ps["X"] + ps["Y"] + ps["Z"])
    return ErrorRates(ps["X"], ps["Y"], ps["Z"], p_e, 0, (0.0, 0.0, 0.0))


def _nearest_batch(points: np.ndarray, basis: np.ndarray, bound: int):
    """Nearest lattice point of basis Z^n to each row of `points`.

    Returns (lattice points, integer coefficients, on_boundary mask).  The
    candidate box is centered on the rounded coefficients of each point, so a
    small bound suffices for points anywhere in space.  Tie-break follows the
    lexicographic enumeration order of the offsets.
    """
    dim = basis.shape[0]
    base = np.round(np.linalg.solve(basis, points.T).T)
    offsets = _integer_box(bound, dim).astype(float)         # K x dim
    order = np.lexsort(offsets.T[::-1])
    offsets = offsets[order]
    off_vec = offsets @ basis.T
    off_norm2 = np.einsum("kd,kd->k", off_vec, off_vec)
    resid = points - base @ basis.T                          # t x dim
    pick = np.empty(points.shape[0], dtype=np.intp)
    block = max(128, int(2.5e6 / max(1, off_vec.shape[0])))
    for lo in range(0, points.shape[0], block):
        hi = min(lo + block, points.shape[0])
        scores = off_norm2[None, :] - 2.0 * (resid[lo:hi] @ off_vec.T)
        pick[lo:hi] = np.argmin(scores, axis=1)
    coeffs = base + offsets[pick]
    on_edge = np.max(np.abs(offsets[pick]), axis=1) >= bound
    return coeffs @ basis.T, coeffs.astype(int), on_edge


def cvp_decode(lattice: GkpLattice, e: np.ndarray, coeff_bound: int = None) -> np.ndarray:
    """Closest point of ell * L to `e` by brute-force enumeration.

    The enumeration box is centered on round(M^-1 e / ell); the argmin must be
    interior to the box, else SearchBoundTooSmall.  Ties break toward the
    lexicographically smallest coefficient vector.
    """
    e = np.asarray(e, float)
    basis = lattice.ell * lattice.generator
    if coeff_bound is None:
        coeff_bound = 2
    point, _, edge = _nearest_batch(e[None, :], basis, coeff_bound)
    if edge[0]:
        raise SearchBoundTooSmall(f"CVP argmin on the enumeration boundary (bound {coeff_bound})")
    return point[0]


def _wilson_halfwidth(k: int, n: int, z: float = 1.0) -> float:
    """One-sigma Wilson score half-width; sane at k = 0."""
    if n == 0:
        return 0.0
    p = k / n
    denom = 1.0 + z * z / n
    return z * np.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom


def mc_logical_rates(lattice: GkpLattice, sigma: float, trials: int, seed: int,
                     coeff_bound: int = 2, threads: int = 1,
                     paulis: PauliData = None) -> ErrorRates:
    """Monte Carlo logical Pauli rates under e ~ N(0, sigma^2 I).

    Per trial the error is decoded by exact CVP on ell*L, the residual is
    snapped to the nearest point of ell*L*, and that point's coset is
    tallied.  Trials are split into fixed chunks seeded by (seed, chunk), so
    tallies are identical for any thread count.
    """
    if lattice.d != 2:
        raise UnsupportedCodeDimension(f"need d = 2, got {lattice.d}")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if paulis is None:
        paulis = pauli_data(lattice)
    label_of = dict(paulis.labels)
    primal = lattice.ell * lattice.generator
    dual_basis = lattice.ell * dual(lattice)
    Ainv2 = 2.0 * np.linalg.inv(lattice.gram.astype(float)).T

    def run_chunk(args):
        index, size = args
        rng = stream(seed, index)
        e = sigma * rng.standard_normal((size, lattice.dim))
        counts = {"I": 0, "X": 0, "Y": 0, "Z": 0}
        bound = coeff_bound
        for _ in range(4):
            near, _, edge = _nearest_batch(e, primal, bound)
            if not edge.any():
                break
            bound += 2
        else:
            raise SearchBoundTooSmall("primal CVP kept hitting the enumeration boundary")
        resid = e - near
        bound = coeff_bound
        for _ in range(4):
            snapped, bcoef, edge = _nearest_batch(resid, dual_basis, bound)
            if not edge.any():
                break
            bound += 2
        else:
            raise SearchBoundTooSmall("dual snap kept hitting the enumeration boundary")
        labels = np.mod(np.round(bcoef @ Ainv2.T), 2).astype(int)
        keys = labels @ (1 << np.arange(lattice.dim))
        uniq, cnt = np.unique(keys, return_counts=True)
        for key, c in zip(uniq, cnt):
            bits = tuple((int(key) >> np.arange(lattice.dim)) & 1)
            counts[label_of.get(bits, "I") if any(bits) else "I"] += int(c)
        return counts

    jobs = list(enumerate(chunk_sizes(trials)))
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run_chunk, jobs))
    else:
        results = [run_chunk(j) for j in jobs]

    total = {"I": 0, "X": 0, "Y": 0, "Z": 0}
    for counts in results:
        for key in total:
            total[key] += counts[key]
    n = sum(total.values())
    assert n == trials
    rates = {p: total[p] / n for p in _PAULIS}
    se = tuple(_wilson_halfwidth(total[p], n) for p in _PAULIS)
    p_e = min(1.0, rates["X"] + rates["Y"] + rates["Z"])
    return ErrorRates(rates["X"], rates["Y"], rates["Z"], p_e, n, se)
