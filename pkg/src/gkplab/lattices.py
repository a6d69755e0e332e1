"""GKP codes as symplectically integral lattices.

A code is a lattice L = M Z^{2N} (columns of M are basis vectors, in
dimensionless quadrature units) whose symplectic Gram matrix A = M^T Omega M
is integer.  det A = d^2 fixes the encodable dimension d.  The physical
lattice constant ell = sqrt(2*pi) multiplies coordinates only at the
syndrome/decoding boundary; generator matrices stay dimensionless.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ConcatenationInvalid,
    InvalidDimension,
    InvalidParameter,
    NotIntegral,
    InvalidCodeDimension,
    NotInDual,
    SearchBoundTooSmall,
    SingularBasis,
    UnsupportedCodeDimension,
)
from .symplectic import omega

ELL = np.sqrt(2.0 * np.pi)

GRAM_TOL = 1e-8


def centered_mod(x, m):
    """Elementwise x mod m mapped to [-m/2, m/2)."""
    return (np.asarray(x, float) + m / 2.0) % m - m / 2.0


@dataclass(frozen=True)
class GkpLattice:
    """A symplectically integral lattice with its code data."""

    n_modes: int
    generator: np.ndarray            # 2N x 2N, columns are basis vectors
    gram: np.ndarray                 # integer A = M^T Omega M
    d: int                           # code dimension, det A = d^2
    name: str = "custom"
    ell: float = ELL

    @property
    def dim(self) -> int:
        return 2 * self.n_modes

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "n_modes": self.n_modes,
            "generator": self.generator.tolist(),
            "d": self.d,
        }

    @staticmethod
    def from_json(obj: dict) -> "GkpLattice":
        return from_generator(np.asarray(obj["generator"], float), name=obj.get("name", "custom"))


@dataclass(frozen=True)
class PauliData:
    """Shortest dual-lattice representatives of the X, Y, Z cosets (units of ell)."""

    x_vec: np.ndarray
    y_vec: np.ndarray
    z_vec: np.ndarray
    distances: tuple                 # (|x|, |y|, |z|)
    labels: dict = field(repr=False, default=None)   # coset label (mod-2 tuple) -> 'X'|'Y'|'Z'


def from_generator(M: np.ndarray, tol: float = GRAM_TOL, name: str = "custom") -> GkpLattice:
    """Validate a generator matrix and build the lattice object.

    Raises NotIntegral when A = M^T Omega M has a non-integer entry, and
    InvalidCodeDimension when det A is not the square of a positive integer.
    """
    M = np.asarray(M, float)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] % 2:
        raise InvalidDimension(f"generator must be square and even-dimensional, got {M.shape}")
    n = M.shape[0] // 2
    A = M.T @ omega(n) @ M
    A_int = np.round(A)
    if np.max(np.abs(A - A_int)) > tol:
        raise NotIntegral(f"Gram matrix deviates from integers by {np.max(np.abs(A - A_int)):.3e}")
    det = np.linalg.det(A_int)
    d = np.sqrt(abs(det))
    d_int = int(round(d))
    if d_int < 1 or abs(d - d_int) > tol:
        raise InvalidCodeDimension(f"det A = {det:.6f} is not a perfect square")
    return GkpLattice(n_modes=n, generator=M, gram=A_int.astype(int), d=d_int, name=name)


def _hex_symplectic() -> np.ndarray:
    # canonical hexagonal cell, unit covolume, basis vectors at 120 degrees
    s = np.sqrt(2.0) * 3.0 ** (-0.25)
    return s * np.array([[1.0, -0.5], [0.0, np.sqrt(3.0) / 2.0]])


def _canonical_d4() -> np.ndarray:
    # Symplectic basis of the densest 4-d lattice packing at unit cell volume
    # (min norm^2 = sqrt 2, kissing number 24).  Derived from the quaternion
    # (Hurwitz) representation of the lattice with the symplectic form realized
    # as left multiplication by (j+k)/sqrt2.
    s = 1.0 / np.sqrt(2.0)
    return 2.0 ** 0.25 * np.array([
        [1.0, 0.0, -1.0, 0.5],
        [-s, 0.0, 0.0, -s],
        [s, 0.0, 0.0, 0.0],
        [-1.0, 1.0, 1.0, 0.5],
    ])


def _e8() -> np.ndarray:
    # integral basis of E8; |det| = 1, so d = 1 unscaled
    rows = np.array([
        [2, 0, 0, 0, 0, 0, 0, 0],
        [-1, 1, 0, 0, 0, 0, 0, 0],
        [0, -1, 1, 0, 0, 0, 0, 0],
        [0, 0, -1, 1, 0, 0, 0, 0],
        [0, 0, 0, -1, 1, 0, 0, 0],
        [0, 0, 0, 0, -1, 1, 0, 0],
        [0, 0, 0, 0, 0, -1, 1, 0],
        [0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5],
    ])
    return rows.T.copy()


def standard_lattice(kind: str, n_modes: int = 1, eta: float = None) -> GkpLattice:
    """Named code lattices.

    kind: 'square_qubit', 'canonical_square' (N modes), 'rectangular' (eta),
    'hex_qubit', 'canonical_hex', 'tesseract', 'd4_qubit', 'canonical_d4',
    'e8', 'gkp_bell'.
    """
    kind = kind.lower().replace("-", "_")
    if kind == "square_qubit":
        return from_generator(np.sqrt(2.0) * np.eye(2), name="square")
    if kind == "canonical_square":
        if n_modes < 1:
            raise InvalidParameter(f"n_modes must be >= 1, got {n_modes}")
        return from_generator(np.eye(2 * n_modes), name="canonical-square")
    if kind == "rectangular":
        if eta is None or eta <= 0:
            raise InvalidParameter(f"rectangular lattice needs eta > 0, got {eta}")
        return from_generator(np.sqrt(2.0) * np.diag([eta, 1.0 / eta]), name=f"rectangular({eta:g})")
    if kind == "hex_qubit":
        return from_generator(np.sqrt(2.0) * _hex_symplectic(), name="hexagonal")
    if kind == "canonical_hex":
        return from_generator(_hex_symplectic(), name="canonical-hex")
    if kind == "tesseract":
        s = 1.0 / np.sqrt(2.0)
        O_tilde = np.array([
            [1.0, 0.0, 0.0, 0.0],
            [0.0, s, 0.0, s],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, s, 0.0, -s],
        ])
        return from_generator(2.0 ** 0.25 * O_tilde, name="tesseract")
    if kind == "d4_qubit":
        # sqrt2 x (dual of the checkerboard lattice): min stabilizer length
        # sqrt2, all Pauli distances 1; equals square (x) [[2,1]] Y-repetition
        s = 1.0 / np.sqrt(2.0)
        M = np.array([
            [np.sqrt(2.0), 0.0, 0.0, s],
            [0.0, np.sqrt(2.0), 0.0, s],
            [0.0, 0.0, np.sqrt(2.0), s],
            [0.0, 0.0, 0.0, s],
        ])
        return from_generator(M, name="d4")
    if kind == "canonical_d4":
        return from_generator(_canonical_d4(), name="canonical-d4")
    if kind == "e8":
        return from_generator(_e8(), name="e8")
    if kind == "gkp_bell":
        c = 1.0 / np.sqrt(2.0)
        I2 = np.eye(2)
        B = np.block([[c * I2, c * I2], [-c * I2, c * I2]])
        return from_generator(B, name="gkp-bell")
    raise InvalidParameter(f"unknown lattice kind {kind!r}")


def dual(lattice: GkpLattice) -> np.ndarray:
    """Generator of the dual lattice, M* = M A^{-T}."""
    return lattice.generator @ np.linalg.inv(lattice.gram.astype(float)).T


def _integer_box(bound: int, dim: int) -> np.ndarray:
    rng = np.arange(-bound, bound + 1)
    grids = np.meshgrid(*([rng] * dim), indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def _coset_label(lattice: GkpLattice, coeffs: np.ndarray) -> np.ndarray:
    """Mod-2 label of dual vectors M* b in L*/L (valid for d = 2)."""
    Ainv_T = np.linalg.inv(lattice.gram.astype(float)).T
    c = coeffs @ (2.0 * Ainv_T).T
    c_int = np.round(c)
    if np.max(np.abs(c - c_int)) > 1e-8:
        raise InvalidCodeDimension("dual cosets are not half-integral; is d = 2?")
    return np.mod(c_int.astype(int), 2)


def pauli_data(lattice: GkpLattice, coeff_bound: int = 4) -> PauliData:
    """Shortest dual-lattice vectors of the three nontrivial Pauli cosets.

    Enumerates M* b over the integer box |b|_inf <= coeff_bound, classifies
    into the cosets of L*/L, and keeps the shortest representative of each
    (lexicographic tie-break on b).  The bound is doubled internally; an
    unstable result raises SearchBoundTooSmall.

    Coset naming: X is the coset whose shortest vector is most q-like,
    Z the most p-like of the remaining pair, Y the third.  The closure
    x + z = y (mod L) then holds automatically.
    """
    if lattice.d != 2:
        raise UnsupportedCodeDimension(f"pauli_data requires d = 2, got d = {lattice.d}")

    def search(bound):
        coeffs = _integer_box(bound, lattice.dim)
        coeffs = coeffs[np.any(coeffs != 0, axis=1)]
        # lexicographic enumeration order makes the tie-break deterministic
        order = np.lexsort(coeffs.T[::-1])
        coeffs = coeffs[order]
        Mstar = dual(lattice)
        vecs = coeffs @ Mstar.T
        labels = _coset_label(lattice, coeffs)
        norms = np.einsum("ij,ij->i", vecs, vecs)
        best = {}
        for key in map(tuple, np.unique(labels, axis=0)):
            if not any(key):
                continue
            mask = np.all(labels == key, axis=1)
            idx = np.argmin(norms[mask])
            best[key] = (np.sqrt(norms[mask][idx]), vecs[mask][idx])
        return best

    best = search(coeff_bound)
    if len(best) != 3:
        raise SearchBoundTooSmall(
            f"found {len(best)} nontrivial cosets with bound {coeff_bound}; expected 3")
    check = search(2 * coeff_bound)
    for key, (dist, _) in best.items():
        if abs(check[key][0] - dist) > 1e-9:
            raise SearchBoundTooSmall(
                f"coset distances changed when doubling coeff_bound={coeff_bound}")

    def q_share(vec):
        nrm = vec @ vec
        return (np.sum(vec[0::2] ** 2) - np.sum(vec[1::2] ** 2)) / nrm

    keys = sorted(best, key=lambda k: (-q_share(best[k][1]), k))
    x_key = keys[0]
    rest = sorted([k for k in keys[1:]], key=lambda k: (q_share(best[k][1]), k))
    z_key = rest[0]
    y_key = rest[1]
    assert tuple((np.array(x_key) + np.array(z_key)) % 2) == y_key
    labels = {x_key: "X", y_key: "Y", z_key: "Z"}
    return PauliData(
        x_vec=best[x_key][1],
        y_vec=best[y_key][1],
        z_vec=best[z_key][1],
        distances=(best[x_key][0], best[y_key][0], best[z_key][0]),
        labels=labels,
    )


def syndrome(lattice: GkpLattice, e: np.ndarray) -> np.ndarray:
    """Syndrome s = (M^T Omega e) mod ell, centered into [-ell/2, ell/2).

    `e` is a displacement in absolute units; stabilizer shifts ell*(M a) and
    logical shifts ell*(M* b) are both invisible.
    """
    e = np.asarray(e, float)
    if e.shape[-1] != lattice.dim:
        raise InvalidDimension(f"expected displacement of length {lattice.dim}, got {e.shape}")
    raw = e @ (lattice.generator.T @ omega(lattice.n_modes)).T
    return centered_mod(raw, lattice.ell)


def classify_residual(lattice: GkpLattice, r: np.ndarray, tol: float = 1e-6,
                      paulis: PauliData = None) -> str:
    """Classify a zero-syndrome residual displacement as 'I', 'X', 'Y' or 'Z'.

    `r` must lie in ell * L* within tol (NotInDual otherwise).  The label J
    is the unique one with (r/ell - j_vec) a primal lattice point.
    """
    r = np.asarray(r, float)
    v = r / lattice.ell
    Minv = np.linalg.inv(lattice.generator)
    Mstar = dual(lattice)
    b = np.linalg.solve(Mstar, v)
    if np.max(np.abs(b - np.round(b))) > tol:
        raise NotInDual(f"residual is {np.max(np.abs(b - np.round(b))):.3e} from the dual lattice")
    if lattice.d != 2:
        raise UnsupportedCodeDimension("classification implemented for d = 2 only")
    if paulis is None:
        paulis = pauli_data(lattice)
    for label, j in (("I", 0.0), ("X", paulis.x_vec), ("Y", paulis.y_vec), ("Z", paulis.z_vec)):
        c = Minv @ (v - j)
        if np.max(np.abs(c - np.round(c))) <= tol:
            return label
    raise NotInDual("residual not in any Pauli coset; inconsistent lattice data")


def repetition_stabilizers(n: int = 2, pauli: str = "Y") -> np.ndarray:
    """Stabilizer columns of the [[n, 1]] repetition code in interleaved
    (X1, Z1, X2, Z2, ...) binary symplectic convention.

    pauli picks the repeated operator; stabilizers are P_i P_{i+1}.
    """
    comp = {"X": (1, 0), "Z": (0, 1), "Y": (1, 1)}[pauli.upper()]
    cols = []
    for i in range(n - 1):
        col = np.zeros(2 * n, dtype=int)
        col[2 * i:2 * i + 2] = comp
        col[2 * i + 2:2 * i + 4] = comp
        cols.append(col)
    return np.column_stack(cols)


def concatenate(inner: GkpLattice, outer_stabilizers: np.ndarray, reduce: bool = False) -> GkpLattice:
    """Concatenate an inner single-mode GKP qubit with an outer [[n, k]] code.

    `outer_stabilizers` holds n-k stabilizer columns of length 2n in the
    interleaved (X1, Z1, ...) convention.  The lattice generator is built as
    L T with L = (direct sum of n inner generators) / 2 and T = [H | 2 E],
    where E holds complementary unit columns making [H | E] unimodular.
    |det| = 2^k is enforced.  With reduce=True the basis is LLL-reduced and
    re-validated.
    """
    H = np.asarray(outer_stabilizers)
    if H.ndim == 1:
        H = H[:, None]
    if H.shape[0] % 2:
        raise ConcatenationInvalid(f"stabilizer columns must have even length, got {H.shape[0]}")
    n = H.shape[0] // 2
    k = n - H.shape[1]
    if k < 0:
        raise ConcatenationInvalid(f"more stabilizers ({H.shape[1]}) than qubits ({n})")
    if inner.n_modes != 1 or inner.d != 2:
        raise ConcatenationInvalid("inner code must be a single-mode qubit (d = 2) lattice")
    if np.any(inner.gram % 2):
        # logical operators must be colinear with stabilizers: M2/2 in L*
        raise ConcatenationInvalid("inner Gram matrix must be even for this construction")

    M2 = inner.generator
    L = np.zeros((2 * n, 2 * n))
    for i in range(n):
        L[2 * i:2 * i + 2, 2 * i:2 * i + 2] = M2 / 2.0

    # greedily extend H with unit columns to a unimodular integer matrix
    cols = [H[:, j].astype(float) for j in range(H.shape[1])]
    units = []
    for j in range(2 * n):
        e = np.zeros(2 * n)
        e[j] = 1.0
        trial = np.column_stack(cols + units + [e])
        if np.linalg.matrix_rank(trial) == trial.shape[1]:
            units.append(e)
        if len(cols) + len(units) == 2 * n:
            break
    B = np.column_stack(cols + units)
    if B.shape[1] != 2 * n or abs(abs(np.linalg.det(B)) - 1.0) > 1e-9:
        raise ConcatenationInvalid("stabilizer columns do not extend to a unimodular basis")
    T = np.column_stack(cols + [2.0 * u for u in units])

    M_final = L @ T
    if reduce:
        M_final = lll_reduce(M_final)
    lat = from_generator(M_final, name=f"{inner.name}(x)[[{n},{k}]]")
    if abs(abs(np.linalg.det(M_final)) - 2.0 ** k) > 1e-8:
        raise ConcatenationInvalid(
            f"|det M| = {abs(np.linalg.det(M_final)):.6f}, expected 2^{k}")
    return lat


def same_lattice(a: GkpLattice, b: GkpLattice, tol: float = 1e-9) -> bool:
    """True iff the two generators span the identical lattice
    (mutual integer membership of basis vectors)."""
    X = np.linalg.solve(a.generator, b.generator)
    Y = np.linalg.solve(b.generator, a.generator)
    return (np.max(np.abs(X - np.round(X))) <= tol and
            np.max(np.abs(Y - np.round(Y))) <= tol)


def lll_reduce(M: np.ndarray, delta: float = 0.75) -> np.ndarray:
    """Lenstra-Lenstra-Lovasz reduction of the columns of M.

    Returns M N for a unimodular integer N; the output spans the identical
    lattice and is delta-LLL-reduced.  1/4 < delta < 1.
    """
    if not (0.25 < delta < 1.0):
        raise InvalidParameter(f"delta must be in (1/4, 1), got {delta}")
    B = np.asarray(M, float).T.copy()   # rows = basis vectors
    nvec = B.shape[0]
    if np.linalg.matrix_rank(B) < nvec:
        raise SingularBasis("basis columns are linearly dependent")

    def gram_schmidt(B):
        Q = np.zeros_like(B)
        mu = np.zeros((nvec, nvec))
        for i in range(nvec):
            Q[i] = B[i]
            for j in range(i):
                mu[i, j] = (B[i] @ Q[j]) / (Q[j] @ Q[j])
                Q[i] = Q[i] - mu[i, j] * Q[j]
        return Q, mu

    Q, mu = gram_schmidt(B)
    k = 1
    while k < nvec:
        for j in range(k - 1, -1, -1):
            m = np.round(mu[k, j])
            if abs(m) > 1e-9:
                B[k] -= m * B[j]
                Q, mu = gram_schmidt(B)
        if Q[k] @ Q[k] >= (delta - mu[k, k - 1] ** 2) * (Q[k - 1] @ Q[k - 1]):
            k += 1
        else:
            B[[k, k - 1]] = B[[k - 1, k]]
            Q, mu = gram_schmidt(B)
            k = max(k - 1, 1)
    return B.T.copy()
