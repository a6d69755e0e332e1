"""GKP oscillators-to-oscillators codes.

N data modes are entangled with M GKP-ancilla modes by a Gaussian encoder
S_enc; after transmission through an additive-Gaussian-noise channel the
decoder applies S_enc^-1, measures the ancilla stabilizers to get a syndrome
s, and subtracts an estimate f(s) from the data noise.  Output noise is
evaluated by Monte Carlo over the exact pipeline.

Noise-block convention: with V_x = S_enc^-1 Y S_enc^-T and the ancilla rows
mapped through M^T Omega, the blocks (V_d, V_da; V_da^T, V_a) are defined as
the INVERSE of the transformed covariance, so the optimal linear estimate of
the data noise given the unwrapped syndrome y is -V_d^-1 V_da y, and
V_d|a = V_a - V_da^T V_d^-1 V_da is the inverse covariance of y.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameter, NonCanonicalAncilla, NumericalSingularity
from .lattices import ELL, GkpLattice, centered_mod, standard_lattice, _integer_box
from .rng import chunk_sizes, stream
from .symplectic import is_symplectic, omega, two_mode_squeeze

__all__ = [
    "O2OCode", "NoiseBlocks", "OutputNoise", "GainOpt",
    "tms_code", "sq_rep_code", "noise_blocks", "estimate", "mc_output",
    "optimize_gain", "output_lower_bound", "no_threshold_rhs", "breakeven",
]


@dataclass(frozen=True)
class O2OCode:
    n_data: int
    n_ancilla: int
    S_enc: np.ndarray
    ancilla: GkpLattice
    gains: tuple = ()

    def __post_init__(self):
        if self.ancilla.d != 1:
            raise NonCanonicalAncilla(f"ancilla lattice must have d = 1, got d = {self.ancilla.d}")
        if not is_symplectic(self.S_enc, 1e-9):
            raise InvalidParameter("encoder is not symplectic")


@dataclass(frozen=True)
class NoiseBlocks:
    V_d: np.ndarray
    V_da: np.ndarray
    V_a: np.ndarray
    V_d_given_a: np.ndarray


@dataclass(frozen=True)
class OutputNoise:
    V_out: np.ndarray
    rms_sq: float                  # tr(V_out) / 2N
    gm_sq: float                   # det(V_out)^(1/2N)
    trials: int
    stderr_rms_sq: float


@dataclass(frozen=True)
class GainOpt:
    gain: float
    output: OutputNoise
    boundary: bool                 # True when the optimum sat on the search edge


def tms_code(gains, ancilla: GkpLattice) -> O2OCode:
    """Two-mode-squeezing code: data mode i pairs with ancilla mode i.

    `gains` has one entry >= 1 per data mode; the ancilla lattice spans
    M >= N modes and must be canonical (d = 1).
    """
    gains = tuple(float(g) for g in np.atleast_1d(gains))
    N = len(gains)
    M = ancilla.n_modes
    if M < N:
        raise InvalidParameter(f"need at least as many ancilla modes ({M}) as data modes ({N})")
    K = N + M
    S = np.eye(2 * K)
    for i, G in enumerate(gains):
        if G < 1:
            raise InvalidParameter(f"gain must be >= 1, got {G}")
        T = np.eye(2 * K)
        block = two_mode_squeeze(G)
        pair = (i, N + i)
        for bi, mi in enumerate(pair):
            for bj, mj in enumerate(pair):
                T[2 * mi:2 * mi + 2, 2 * mj:2 * mj + 2] = block[2 * bi:2 * bi + 2, 2 * bj:2 * bj + 2]
        S = T @ S
    return O2OCode(N, M, S, ancilla, gains)


def sq_rep_code(lam: float, kappa: float) -> O2OCode:
    """Squeezing-repetition code on one data and one ancilla mode."""
    if lam <= 0 or kappa <= 0:
        raise InvalidParameter(f"parameters must be positive, got lam={lam}, kappa={kappa}")
    S = np.array([
        [kappa / lam, 0.0, 0.0, 0.0],
        [0.0, lam / kappa, 0.0, -lam],
        [lam, 0.0, lam / kappa, 0.0],
        [0.0, 0.0, 0.0, kappa / lam],
    ])
    return O2OCode(1, 1, S, standard_lattice("canonical_square"), (lam, kappa))


def noise_blocks(code: O2OCode, Y: np.ndarray) -> NoiseBlocks:
    """Precision blocks of the decoded joint (data noise, syndrome) pair."""
    Y = np.asarray(Y, float)
    K = code.n_data + code.n_ancilla
    if Y.shape != (2 * K, 2 * K):
        raise InvalidParameter(f"Y must be {2*K}x{2*K}, got {Y.shape}")
    Sinv = np.linalg.inv(code.S_enc)
    Vx = Sinv @ Y @ Sinv.T
    T = np.zeros((2 * K, 2 * K))
    nd = 2 * code.n_data
    T[:nd, :nd] = np.eye(nd)
    T[nd:, nd:] = code.ancilla.generator.T @ omega(code.n_ancilla)
    W = T @ Vx @ T.T
    try:
        P = np.linalg.inv(W)
    except np.linalg.LinAlgError as exc:
        raise NumericalSingularity(f"transformed covariance is singular: {exc}") from exc
    V_d = P[:nd, :nd]
    V_da = P[:nd, nd:]
    V_a = P[nd:, nd:]
    V_dga = V_a - V_da.T @ np.linalg.solve(V_d, V_da)
    return NoiseBlocks(V_d, V_da, V_a, (V_dga + V_dga.T) / 2)


class _MmseTable:
    """Precomputed integer offsets and quadratic weights for the MMSE sum."""

    def __init__(self, blocks: NoiseBlocks, n_max: int):
        if n_max < 1:
            raise InvalidParameter(f"n_max must be >= 1, got {n_max}")
        dim = blocks.V_a.shape[0]
        self.offsets = _integer_box(n_max, dim).astype(float)      # K x 2M
        self.VN = blocks.V_d_given_a @ self.offsets.T              # 2M x K
        self.quad = np.pi * np.einsum("ki,ik->k", self.offsets, self.VN)

    def unwrapped_mean(self, s: np.ndarray) -> np.ndarray:
        """E[y | s] where y is the pre-wrap syndrome: s - ell * E[n | s]."""
        out = np.empty_like(s)
        block = max(256, int(4e6 / max(1, self.offsets.shape[0])))
        for lo in range(0, s.shape[0], block):
            hi = min(lo + block, s.shape[0])
            expo = ELL * (s[lo:hi] @ self.VN) - self.quad[None, :]
            expo -= expo.max(axis=1, keepdims=True)
            w = np.exp(expo)
            w /= w.sum(axis=1, keepdims=True)
            out[lo:hi] = s[lo:hi] - ELL * (w @ self.offsets)
        return out


def estimate(blocks: NoiseBlocks, s: np.ndarray, kind: str = "mmse", n_max: int = 3) -> np.ndarray:
    """Displacement estimate f(s) for syndrome rows `s`.

    'linear' returns -V_d^-1 V_da s.  'mmse' softly unwraps the syndrome
    over integer shifts |n|_inf <= n_max (log-sum-exp weights) before the
    linear map, which is the minimum-mean-square-error estimator.
    """
    single = np.asarray(s).ndim == 1
    s = np.atleast_2d(np.asarray(s, float))
    gain_mat = np.linalg.solve(blocks.V_d, blocks.V_da)
    if kind == "linear":
        out = -(s @ gain_mat.T)
    elif kind == "mmse":
        table = _MmseTable(blocks, n_max)
        out = -(table.unwrapped_mean(s) @ gain_mat.T)
    else:
        raise InvalidParameter(f"estimator kind must be 'linear' or 'mmse', got {kind!r}")
    return out[0] if single else out


def mmse_converged(blocks: NoiseBlocks, n_max: int, probe: np.ndarray, tol: float = 1e-4) -> bool:
    """True when growing n_max by one moves the estimate by less than tol."""
    a = estimate(blocks, probe, "mmse", n_max)
    b = estimate(blocks, probe, "mmse", n_max + 1)
    return bool(np.max(np.abs(a - b)) < tol)


def mc_output(code: O2OCode, Y: np.ndarray, kind: str = "mmse", trials: int = 100000,
              seed: int = 0, n_max: int = 3, threads: int = 1,
              check_truncation: bool = True) -> OutputNoise:
    """Monte Carlo output noise of the full encode/noise/decode pipeline.

    Per trial: xi ~ N(0, Y); x = S_enc^-1 xi; the ancilla part yields the
    wrapped syndrome s; x_out = x_d - f(s).  Second moments accumulate into
    V_out; rms_sq = tr(V_out)/2N with a chunk-jackknife standard error, and
    gm_sq = det(V_out)^(1/2N).
    """
    if trials < 1000:
        raise InvalidParameter(f"trials must be >= 1000, got {trials}")
    Y = np.asarray(Y, float)
    blocks = noise_blocks(code, Y)
    nd = 2 * code.n_data
    Sinv = np.linalg.inv(code.S_enc)
    MTO = code.ancilla.generator.T @ omega(code.n_ancilla)
    gain_mat = np.linalg.solve(blocks.V_d, blocks.V_da)
    table = _MmseTable(blocks, n_max) if kind == "mmse" else None
    if kind not in ("linear", "mmse"):
        raise InvalidParameter(f"estimator kind must be 'linear' or 'mmse', got {kind!r}")
    try:
        chol = np.linalg.cholesky(Y)
    except np.linalg.LinAlgError as exc:
        raise NumericalSingularity(f"noise matrix not factorizable: {exc}") from exc

    if check_truncation and kind == "mmse":
        probe_rng = stream(seed, 1 << 40)
        probe = centered_mod(probe_rng.standard_normal((256, 2 * code.n_ancilla)), ELL)
        if not mmse_converged(blocks, n_max, probe):
            raise InvalidParameter(f"MMSE sum not converged at n_max={n_max}; increase n_max")

    def run_chunk(args):
        index, size = args
        rng = stream(seed, index)
        xi = rng.standard_normal((size, Y.shape[0])) @ chol.T
        x = xi @ Sinv.T
        xd, xa = x[:, :nd], x[:, nd:]
        s = centered_mod(xa @ MTO.T, ELL)
        if kind == "linear":
            f = -(s @ gain_mat.T)
        else:
            f = -(table.unwrapped_mean(s) @ gain_mat.T)
        xo = xd - f
        return xo.T @ xo, float(np.einsum("ij,ij->", xo, xo)), size

    jobs = list(enumerate(chunk_sizes(trials)))
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run_chunk, jobs))
    else:
        results = [run_chunk(j) for j in jobs]

    acc = np.zeros((nd, nd))
    total = 0
    means = []
    weights = []
    for mat, ssum, size in results:
        acc += mat
        total += size
        means.append(ssum / (size * nd))
        weights.append(size)
    V_out = acc / total
    rms_sq = float(np.trace(V_out) / nd)
    gm_sq = float(np.linalg.det(V_out) ** (1.0 / nd))
    means = np.array(means)
    w = np.array(weights, float) / total
    if len(means) > 1:
        var = np.sum(w ** 2 * (means - rms_sq) ** 2) * len(means) / (len(means) - 1)
        se = float(np.sqrt(var))
    else:
        se = 0.0
    return OutputNoise(V_out, rms_sq, gm_sq, total, se)


def output_lower_bound(sigmas, n_data: int):
    """Capacity lower bound on the output error:
    sigma_LB = e^{-1/2} (prod sigma_i^2/(1-sigma_i^2))^{1/2N}.

    Returns (sigma_LB, vacuous); the bound is flagged vacuous when any
    sigma_i >= 1.
    """
    sigmas = np.atleast_1d(np.asarray(sigmas, float))
    if np.any(sigmas <= 0):
        raise InvalidParameter("sigmas must be positive")
    if np.any(sigmas >= 1):
        return 0.0, True
    prod = np.prod(sigmas ** 2 / (1 - sigmas ** 2))
    return float(np.exp(-0.5) * prod ** (1.0 / (2 * n_data))), False


def no_threshold_rhs(gains, sigma: float) -> float:
    """Estimation-theory floor on the RMS output error:
    (1/N) sum_i sigma^2 / (2 G_i - 1)."""
    gains = np.atleast_1d(np.asarray(gains, float))
    if np.any(gains < 1):
        raise InvalidParameter("gains must be >= 1")
    return float(np.mean(sigma ** 2 / (2 * gains - 1)))


def _iid_Y(sigma: float, n_total: int) -> np.ndarray:
    return sigma ** 2 * np.eye(2 * n_total)


def optimize_gain(ancilla: GkpLattice, sigma: float, kind: str = "mmse",
                  trials: int = 200000, seed: int = 0, n_data: int = None,
                  g_max: float = 60.0, n_max: int = 3, threads: int = 1) -> GainOpt:
    """Scalar TMS gain minimizing the Monte Carlo RMS output error.

    Common random numbers (a fixed seed) across evaluations make the
    objective smooth in G; a coarse log-grid bracket is refined by
    golden-section search.  A minimum on the search edge is returned with
    boundary=True.
    """
    N = n_data if n_data is not None else ancilla.n_modes
    cache = {}

    def objective(G):
        key = round(float(G), 10)
        if key not in cache:
            code = tms_code([G] * N, ancilla)
            out = mc_output(code, _iid_Y(sigma, N + ancilla.n_modes), kind, trials, seed,
                            n_max=n_max, threads=threads, check_truncation=False)
            cache[key] = out
        return cache[key]

    grid = 1.0 + np.logspace(-2, np.log10(g_max - 1.0), 14)
    vals = [objective(G).rms_sq for G in grid]
    best = int(np.argmin(vals))
    if best == 0 or best == len(grid) - 1:
        G = grid[best]
        return GainOpt(float(G), objective(G), True)

    lo, hi = grid[best - 1], grid[best + 1]
    phi = (np.sqrt(5.0) - 1) / 2
    a, b = lo, hi
    c = b - phi * (b - a)
    d = a + phi * (b - a)
    fc, fd = objective(c).rms_sq, objective(d).rms_sq
    while b - a > 0.02 * (1 + a):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - phi * (b - a)
            fc = objective(c).rms_sq
        else:
            a, c, fc = c, d, fd
            d = a + phi * (b - a)
            fd = objective(d).rms_sq
    G = c if fc < fd else d
    return GainOpt(float(G), objective(G), False)


def convention_check(seed: int = 123) -> None:
    """Abort if the estimator sign convention fails to reduce noise.

    At sigma = 0.05 with a square ancilla and G = 2, the corrected output
    variance must drop well below the input variance; a failure indicates a
    block-convention error rather than a statistical fluke.
    """
    anc = standard_lattice("canonical_square")
    code = tms_code([2.0], anc)
    out = mc_output(code, _iid_Y(0.05, 2), "linear", 20000, seed, check_truncation=False)
    if not out.rms_sq < 0.05 ** 2 * 0.8:
        raise NumericalSingularity(
            f"estimator convention check failed: rms {out.rms_sq:.3e} vs input {0.05**2:.3e}")


def _margin_mc(ancilla: GkpLattice, sigma: float, G: float, kind: str,
               trials: int, seed: int, n_data: int, n_max: int):
    """Paired estimate of the QEC margin (input - output variance) / 2N.

    The margin mean(|x_d|^2 - |x_out|^2) is estimated on common samples, so
    the O(sigma^2) bulk cancels and the standard error scales with the
    margin itself -- raw rms estimates cannot resolve the ~1e-4 relative
    margins near break-even at any sane trial count.

    Returns (margin, stderr).
    """
    code = tms_code([G] * n_data, ancilla)
    blocks = noise_blocks(code, _iid_Y(sigma, n_data + ancilla.n_modes))
    nd = 2 * n_data
    Sinv = np.linalg.inv(code.S_enc)
    MTO = code.ancilla.generator.T @ omega(code.n_ancilla)
    gain_mat = np.linalg.solve(blocks.V_d, blocks.V_da)
    table = _MmseTable(blocks, n_max) if kind == "mmse" else None

    sums = []
    sizes = chunk_sizes(trials)
    for index, size in enumerate(sizes):
        rng = stream(seed, index)
        xi = sigma * rng.standard_normal((size, 2 * (n_data + ancilla.n_modes)))
        x = xi @ Sinv.T
        xd, xa = x[:, :nd], x[:, nd:]
        s = centered_mod(xa @ MTO.T, ELL)
        if kind == "linear":
            f = -(s @ gain_mat.T)
        else:
            f = -(table.unwrapped_mean(s) @ gain_mat.T)
        raw = np.einsum("ij,ij->i", xi[:, :nd], xi[:, :nd])
        out = xd - f
        corr = np.einsum("ij,ij->i", out, out)
        sums.append(np.mean(raw - corr) / nd)
    sums = np.array(sums)
    w = np.array([s_ / trials for s_ in sizes])
    margin = float(np.sum(w * sums))
    if len(sums) > 1:
        se = float(np.sqrt(np.sum(w ** 2 * (sums - margin) ** 2)
                           * len(sums) / (len(sums) - 1)))
    else:
        se = 0.0
    return margin, se


def _best_margin(ancilla, sigma, kind, trials, seed, n_data, n_max):
    """Maximize the paired margin over the gain, searching in log(G - 1)."""
    cache = {}

    def val(u):
        key = round(u, 9)
        if key not in cache:
            cache[key] = _margin_mc(ancilla, sigma, 1.0 + np.exp(u), kind,
                                    trials, seed, n_data, n_max)
        return cache[key]

    grid = np.linspace(np.log(3e-4), np.log(11.0), 16)
    best = int(np.argmax([val(u)[0] for u in grid]))
    a = grid[max(best - 1, 0)]
    b = grid[min(best + 1, len(grid) - 1)]
    phi = (np.sqrt(5.0) - 1) / 2
    c, d = b - phi * (b - a), a + phi * (b - a)
    fc, fd = val(c)[0], val(d)[0]
    while b - a > 0.05:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - phi * (b - a)
            fc = val(c)[0]
        else:
            a, c, fc = c, d, fd
            d = a + phi * (b - a)
            fd = val(d)[0]
    u = c if fc > fd else d
    return 1.0 + np.exp(u)


def breakeven(ancilla: GkpLattice, kind: str = "mmse", trials: int = 600000,
              seed: int = 0, tol: float = 0.005, n_data: int = None,
              n_max: int = 3, threads: int = 1) -> float:
    """Break-even input noise sigma*: above it, no gain choice beats no coding.

    Bisection on sigma for the sign of the best achievable QEC margin
    sigma^2 - min_G rms(G), measured by the paired common-random-numbers
    estimator (see _margin_mc) at 4x `trials` (gain search runs at 1x); an
    indecisive point is re-measured at 16x with fresh samples.
    """
    convention_check()
    lo, hi = 0.45, 0.75
    N = n_data or ancilla.n_modes

    def has_gain(sigma):
        G = _best_margin(ancilla, sigma, kind, trials, seed, N, n_max)
        margin, se = _margin_mc(ancilla, sigma, G, kind, 4 * trials, seed + 1, N, n_max)
        if abs(margin) < 3 * se:
            margin, se = _margin_mc(ancilla, sigma, G, kind, 16 * trials,
                                    seed + 2, N, n_max)
        return margin > 0

    if not has_gain(lo):
        raise InvalidParameter(f"no QEC gain even at sigma={lo}; cannot bracket break-even")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if has_gain(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
