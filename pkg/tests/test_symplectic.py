import numpy as np
import pytest

from gkplab.errors import InvalidDimension, InvalidGain, InvalidModes, NotPositiveDefinite
from gkplab.symplectic import (
    apply_to_covariance,
    beamsplitter,
    compose,
    direct_sum,
    embed,
    is_symplectic,
    omega,
    rotation,
    squeeze,
    standard_gate,
    sum_gate,
    two_mode_squeeze,
    williamson,
)

RNG = np.random.default_rng(1234)


def random_symplectic(n_modes, rng=RNG, depth=6):
    S = np.eye(2 * n_modes)
    for _ in range(depth):
        kind = rng.integers(0, 3 if n_modes > 1 else 2)
        if kind == 0:
            g = rotation(rng.uniform(0, 2 * np.pi))
            S = embed(g, [rng.integers(n_modes)], n_modes) @ S
        elif kind == 1:
            g = squeeze(rng.uniform(-1, 1))
            S = embed(g, [rng.integers(n_modes)], n_modes) @ S
        else:
            i, j = rng.choice(n_modes, 2, replace=False)
            g = beamsplitter(rng.uniform(0, np.pi)) if rng.random() < 0.5 \
                else two_mode_squeeze(rng.uniform(1, 3))
            S = embed(g, [i, j], n_modes) @ S
    return S


def test_omega_one_mode():
    assert np.array_equal(omega(1), [[0.0, 1.0], [-1.0, 0.0]])


def test_omega_block_structure():
    O = omega(2)
    assert O.shape == (4, 4)
    assert np.array_equal(O[:2, :2], omega(1))
    assert np.array_equal(O[2:, 2:], omega(1))
    assert np.all(O[:2, 2:] == 0)


def test_omega_identities():
    for n in (1, 2, 3):
        O = omega(n)
        assert np.allclose(O @ O, -np.eye(2 * n))
        assert np.allclose(O.T, -O)
        assert np.allclose(O @ O.T, np.eye(2 * n))


def test_omega_invalid():
    with pytest.raises(InvalidDimension):
        omega(0)


def test_is_symplectic_cases():
    assert is_symplectic(omega(2), 1e-12)
    assert not is_symplectic(np.diag([2.0, 1.0]), 1e-12)
    S = compose(squeeze(1.7), rotation(0.3))
    assert is_symplectic(S, 1e-12)


def test_is_symplectic_odd_dimension():
    with pytest.raises(InvalidDimension):
        is_symplectic(np.eye(3))


def test_standard_gates_are_symplectic():
    for gate in (rotation(0.7), squeeze(-0.4), beamsplitter(1.1),
                 two_mode_squeeze(3.5), sum_gate()):
        assert is_symplectic(gate, 1e-12)


def test_tms_unit_gain_is_identity():
    assert np.allclose(two_mode_squeeze(1.0), np.eye(4))


def test_beamsplitter_balanced():
    B = beamsplitter(np.pi / 4)
    c = 1 / np.sqrt(2)
    expect = np.block([[c * np.eye(2), c * np.eye(2)], [-c * np.eye(2), c * np.eye(2)]])
    assert np.allclose(B, expect)


@pytest.mark.parametrize("G", [1.0, 2.0, 10.0])
def test_tms_beamsplitter_decomposition(G):
    # S_G = B_half (Sq(e^-r) + Sq(e^r)) B_half^T with G = cosh^2 r; note the
    # squeezed arm order -- the (+r, -r) order flips the off-diagonal sign
    r = np.arccosh(np.sqrt(G))
    B = beamsplitter(np.pi / 4)
    mid = direct_sum(squeeze(-r), squeeze(r))
    assert np.max(np.abs(B @ mid @ B.T - two_mode_squeeze(G))) < 1e-10


def test_gate_errors():
    with pytest.raises(InvalidGain):
        two_mode_squeeze(0.5)
    with pytest.raises(InvalidModes):
        embed(beamsplitter(0.3), [1, 1], 3)
    with pytest.raises(InvalidModes):
        embed(beamsplitter(0.3), [0, 5], 3)


def test_standard_gate_dispatch():
    S = standard_gate("two_mode_squeeze", n_modes=3, targets=[0, 2], G=2.0)
    assert S.shape == (6, 6)
    assert is_symplectic(S, 1e-12)
    assert np.allclose(S[2:4, 2:4], np.eye(2))  # untouched middle mode


def test_group_closure():
    for _ in range(10):
        g1 = random_symplectic(2)
        g2 = random_symplectic(2)
        assert is_symplectic(g1 @ g2, 1e-9)


def test_symplectic_inner_product_invariance():
    for _ in range(10):
        n = int(RNG.integers(1, 4))
        S = random_symplectic(n)
        u = RNG.standard_normal(2 * n)
        v = RNG.standard_normal(2 * n)
        O = omega(n)
        assert abs(u @ O @ v - (S @ u) @ O @ (S @ v)) < 1e-9 * max(1, abs(u @ O @ v))


def test_direct_sum_omega():
    assert np.array_equal(direct_sum(omega(1), omega(1)), omega(2))


def test_apply_to_covariance():
    Y = RNG.standard_normal((4, 4))
    Y = Y @ Y.T
    assert np.allclose(apply_to_covariance(np.eye(4), Y), Y)
    r = 0.6
    out = apply_to_covariance(squeeze(r), np.eye(2) / 2)
    assert np.allclose(out, np.diag([np.exp(2 * r), np.exp(-2 * r)]) / 2)


def test_compose_dimension_mismatch():
    with pytest.raises(InvalidDimension):
        compose(np.eye(2), np.eye(4))


def test_williamson_diagonal_iso():
    S, nus = williamson(0.7 * np.eye(4))
    assert np.allclose(nus, [0.7, 0.7])
    assert np.allclose(S @ (0.7 * np.eye(4)) @ S.T, 0.7 * np.eye(4), atol=1e-10)


def test_williamson_tms_congruence():
    # Y = sigma^2 S_G S_G^T has all symplectic eigenvalues sigma^2
    for G in (1.5, 4.0):
        SG = two_mode_squeeze(G)
        Y = 0.3 * SG @ SG.T
        _, nus = williamson(Y)
        assert np.allclose(nus, [0.3, 0.3], rtol=1e-10)


def test_williamson_single_mode_value():
    S, nus = williamson(np.diag([4.0, 1.0]))
    assert np.allclose(nus, [2.0])
    # cross-check against eigenvalues of i Omega Y
    ev = np.abs(np.linalg.eigvals(1j * omega(1) @ np.diag([4.0, 1.0])))
    assert np.allclose(sorted(ev), [2.0, 2.0])


def test_williamson_roundtrip_and_symplectic():
    for _ in range(5):
        n = int(RNG.integers(1, 5))
        A = RNG.standard_normal((2 * n, 2 * n))
        Y = A @ A.T + 0.4 * np.eye(2 * n)
        S, nus = williamson(Y)
        assert is_symplectic(S, 1e-9)
        assert np.all(np.diff(nus) <= 1e-12)
        D = np.diag(np.repeat(nus, 2))
        Sinv = np.linalg.inv(S)
        recon = Sinv @ D @ Sinv.T
        assert np.max(np.abs(recon - Y)) < 1e-8 * max(1, np.max(np.abs(Y)))


def test_williamson_rejects_indefinite():
    with pytest.raises(NotPositiveDefinite):
        williamson(np.diag([1.0, -0.5]))
    with pytest.raises(NotPositiveDefinite):
        williamson(np.array([[1.0, 2.0], [0.0, 1.0]]))
