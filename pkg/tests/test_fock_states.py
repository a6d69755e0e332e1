import numpy as np
import pytest

from gkplab.errors import InvalidParameter, TruncationTooSmall
from gkplab.fock import (
    GkpFockParams,
    displacement_op,
    exact_displacement,
    expectation,
    gkp_state,
    hermite_basis,
    logical_y_state,
    operators,
    stabilizer_ops,
    twirl_noise,
    wigner,
)
from gkplab.fock.paulis import generalized_pauli

D = 110
DELTA = 0.3


@pytest.fixture(scope="module")
def ops():
    return operators(D)


@pytest.fixture(scope="module")
def zero_state():
    return gkp_state(GkpFockParams(DELTA, "zero", D))


@pytest.fixture(scope="module")
def one_state():
    return gkp_state(GkpFockParams(DELTA, "one", D))


def test_ladder_action(ops):
    a = ops["a"]
    for n in (1, 5, 50, D - 1):
        vec = np.zeros(D)
        vec[n] = 1.0
        out = a @ vec
        assert np.isclose(out[n - 1], np.sqrt(n))


def test_commutator_on_low_block(ops):
    comm = ops["q"] @ ops["p"] - ops["p"] @ ops["q"]
    block = comm[: D - 1, : D - 1]
    assert np.max(np.abs(block - 1j * np.eye(D - 1))) < 1e-12


def test_vacuum_photon_number(ops):
    vac = np.zeros(D)
    vac[0] = 1.0
    assert expectation(ops["n"], vac) == 0


def test_displacement_identity():
    assert np.allclose(displacement_op(0.0, 40), np.eye(40))


def test_displacement_inverse():
    Dp = displacement_op(0.9 + 0.4j, 80)
    Dm = displacement_op(-0.9 - 0.4j, 80)
    block = (Dp @ Dm)[:40, :40]
    assert np.max(np.abs(block - np.eye(40))) < 1e-8


def test_displacement_coherent_overlap():
    alpha = 1.3
    Dp = displacement_op(alpha, 80)
    assert abs(Dp[0, 0] - np.exp(-abs(alpha) ** 2 / 2)) < 1e-8


def test_displacement_warns_when_large():
    with pytest.warns(UserWarning):
        displacement_op(5.0, 30)


def test_exact_displacement_matches_expm():
    for alpha in (0.4 - 0.3j, 1.2j):
        A = exact_displacement(alpha, 70)
        B = displacement_op(alpha, 70)
        assert np.max(np.abs((A - B)[:35, :35])) < 1e-10


def test_hermite_orthonormality():
    xs = np.linspace(-12, 12, 3001)
    vals = np.array([hermite_basis(6, x) for x in xs])
    gram = vals.T @ vals * (xs[1] - xs[0])
    assert np.max(np.abs(gram - np.eye(6))) < 1e-6


def test_gkp_state_norm(zero_state):
    assert np.isclose(np.linalg.norm(zero_state), 1.0)


def test_gkp_state_finite_stabilizer(zero_state):
    stab = stabilizer_ops(DELTA, D, "qubit", finite=True)
    for key in ("S_x", "S_z"):
        val = expectation(stab[key], zero_state)
        assert abs(val - 1.0) < 1e-4


def test_gkp_canonical_stabilizer():
    psi = gkp_state(GkpFockParams(DELTA, "canonical", D))
    stab = stabilizer_ops(DELTA, D, "canonical", finite=True)
    assert abs(expectation(stab["S_z"], psi) - 1.0) < 1e-4


def test_gkp_mean_photon_number(zero_state, ops):
    n_exp = expectation(ops["n"], zero_state).real
    target = 1.0 / (2 * DELTA ** 2) - 0.5
    assert abs(n_exp - target) / target < 0.15


def test_gkp_orthogonality(zero_state, one_state):
    assert abs(zero_state.conj() @ one_state) < 1e-3


def test_gkp_truncation_guard():
    with pytest.raises(TruncationTooSmall):
        gkp_state(GkpFockParams(0.2, "zero", 40))


def test_gkp_params_validation():
    with pytest.raises(InvalidParameter):
        GkpFockParams(-0.1)
    with pytest.raises(InvalidParameter):
        GkpFockParams(0.3, "plus")


def test_logical_y_norm():
    y = logical_y_state(DELTA, D)
    assert np.isclose(np.linalg.norm(y), 1.0)


def test_generalized_pauli_squares_to_identity():
    Z = generalized_pauli("Z", 80)
    assert np.max(np.abs(Z @ Z - np.eye(80))) < 1e-8


def test_generalized_pauli_on_code_states(zero_state, one_state):
    Z = generalized_pauli("Z", D)
    assert expectation(Z, zero_state).real > 0.9
    assert expectation(Z, one_state).real < -0.9


def test_twirl_noise_values():
    s2, db = twirl_noise(0.309)
    assert abs(s2 - 0.0477) < 5e-4
    assert abs(db - 10.2) < 0.05


def test_twirl_noise_small_delta():
    s2, _ = twirl_noise(0.01)
    assert np.isclose(s2, 0.01 ** 2 / 2, rtol=1e-3)


def test_twirl_noise_monotone():
    vals = [twirl_noise(d)[0] for d in (0.1, 0.2, 0.3, 0.5)]
    assert np.all(np.diff(vals) > 0)


# ---------------------------------------------------------------------------
# Wigner function
# ---------------------------------------------------------------------------

def test_wigner_vacuum():
    vac = np.zeros(60, complex)
    vac[0] = 1.0
    grid = np.linspace(-4, 4, 41)
    W = wigner(vac, grid, grid)
    assert abs(W[20, 20] - 1 / np.pi) < 1e-6
    # analytic gaussian everywhere
    Q, P = np.meshgrid(grid, grid, indexing="ij")
    assert np.max(np.abs(W - np.exp(-(Q ** 2 + P ** 2)) / np.pi)) < 1e-8


def test_wigner_fock1():
    one = np.zeros(60, complex)
    one[1] = 1.0
    grid = np.linspace(-4, 4, 41)
    W = wigner(one, grid, grid)
    r2 = grid[:, None] ** 2 + grid[None, :] ** 2
    expect = (2 * r2 - 1) * np.exp(-r2) / np.pi
    assert np.max(np.abs(W - expect)) < 1e-8


def test_wigner_normalization_and_negativity(zero_state):
    grid = np.linspace(-7.5, 7.5, 101)
    W = wigner(zero_state, grid, grid)
    dq = grid[1] - grid[0]
    assert abs(W.sum() * dq * dq - 1.0) < 0.02
    assert W.min() < -0.01


def test_wigner_marginal(zero_state):
    grid = np.linspace(-7.5, 7.5, 151)
    W = wigner(zero_state, grid, grid)
    dp = grid[1] - grid[0]
    marginal = W.sum(axis=1) * dp
    psi_q = np.array([hermite_basis(D, x) @ zero_state.real for x in grid])
    density = psi_q ** 2
    assert np.max(np.abs(marginal - density)) < 0.02 * density.max()
