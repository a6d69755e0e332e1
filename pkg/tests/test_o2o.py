import numpy as np
import pytest
from scipy.integrate import quad

from gkplab.errors import InvalidParameter, NonCanonicalAncilla
from gkplab.lattices import ELL, standard_lattice
from gkplab.o2o import (
    convention_check,
    estimate,
    mc_output,
    mmse_converged,
    no_threshold_rhs,
    noise_blocks,
    optimize_gain,
    output_lower_bound,
    sq_rep_code,
    tms_code,
)
from gkplab.symplectic import is_symplectic, omega

RNG = np.random.default_rng(21)


# ---------------------------------------------------------------------------
# independent quadrature oracle for the square-ancilla TMS code (iid noise):
# rms = sigma^2/(2G-1) + mu^2 * E[(y - yhat(s))^2] with y ~ N(0, (2G-1) sigma^2)
# wrapped into the fundamental cell, evaluated by 1-d integration.
# ---------------------------------------------------------------------------

def _wrap_error(sg, kind, nmax=8):
    ks = np.arange(-nmax, nmax + 1)

    def integrand(s):
        ys = s + ks * ELL
        g = np.exp(-ys ** 2 / (2 * sg ** 2))
        if kind == "mmse":
            w = g / g.sum()
            ybar = (w * ys).sum()
            var = (w * (ys - ybar) ** 2).sum()
        else:
            var = (((ks * ELL) ** 2) * g / g.sum()).sum()
        return var * g.sum() / np.sqrt(2 * np.pi * sg ** 2)

    return quad(integrand, -ELL / 2, ELL / 2, limit=300, epsabs=1e-14)[0]


def exact_square_rms(G, sigma, kind):
    sg = np.sqrt((2 * G - 1) * sigma ** 2)
    mu = 2 * np.sqrt(G * (G - 1)) / (2 * G - 1)
    return sigma ** 2 / (2 * G - 1) + mu ** 2 * _wrap_error(sg, kind)


def square_code(G=3.0):
    return tms_code([G], standard_lattice("canonical_square"))


def test_tms_unit_gain_identity():
    code = tms_code([1.0, 1.0], standard_lattice("canonical_square", n_modes=2))
    assert np.allclose(code.S_enc, np.eye(8))


def test_tms_symplectic_random_gains():
    anc = standard_lattice("canonical_d4")
    for _ in range(5):
        gains = 1.0 + RNG.uniform(0, 4, size=2)
        code = tms_code(gains, anc)
        assert is_symplectic(code.S_enc, 1e-9)


def test_tms_rejects_qubit_ancilla():
    with pytest.raises(NonCanonicalAncilla):
        tms_code([2.0], standard_lattice("square_qubit"))


def test_tms_rejects_too_few_ancillas():
    with pytest.raises(InvalidParameter):
        tms_code([2.0, 2.0], standard_lattice("canonical_square", n_modes=1))


def test_linear_estimator_matches_mu_tilde():
    # GKP-TMS with square ancilla: f_linear = mu_tilde * antidiag(1,1) s
    G, s1, s2 = 3.0, 0.1, 0.15
    code = square_code(G)
    Y = np.diag([s1 ** 2, s1 ** 2, s2 ** 2, s2 ** 2])
    blocks = noise_blocks(code, Y)
    gain_mat = -np.linalg.solve(blocks.V_d, blocks.V_da)
    mu = np.sqrt(G * (G - 1)) * (s1 ** 2 + s2 ** 2) / ((G - 1) * s1 ** 2 + G * s2 ** 2)
    assert np.allclose(gain_mat, mu * np.array([[0.0, 1.0], [1.0, 0.0]]), atol=1e-12)


def test_sq_rep_code_matrix():
    code = sq_rep_code(1.3, 0.8)
    assert is_symplectic(code.S_enc, 1e-12)
    code1 = sq_rep_code(1.0, 1.0)
    expect = np.array([
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, -1.0],
        [1.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
    ])
    assert np.allclose(code1.S_enc, expect)
    with pytest.raises(InvalidParameter):
        sq_rep_code(-1.0, 1.0)


def test_noise_blocks_identity_encoder():
    code = tms_code([1.0], standard_lattice("canonical_square"))
    blocks = noise_blocks(code, 0.04 * np.eye(4))
    assert np.allclose(blocks.V_da, 0.0, atol=1e-12)


def test_noise_blocks_schur_psd():
    from gkplab.o2o import O2OCode
    from gkplab.symplectic import embed, rotation, squeeze, two_mode_squeeze
    anc = standard_lattice("canonical_square")
    for trial in range(100):
        S = np.eye(4)
        for _ in range(5):
            which = RNG.integers(3)
            if which == 0:
                S = embed(rotation(RNG.uniform(0, 2 * np.pi)), [RNG.integers(2)], 2) @ S
            elif which == 1:
                S = embed(squeeze(RNG.uniform(-0.8, 0.8)), [RNG.integers(2)], 2) @ S
            else:
                S = embed(two_mode_squeeze(RNG.uniform(1, 3)), [0, 1], 2) @ S
        code = O2OCode(1, 1, S, anc)
        blocks = noise_blocks(code, 0.02 * np.eye(4))
        assert np.min(np.linalg.eigvalsh(blocks.V_d_given_a)) > -1e-9
        assert np.min(np.linalg.eigvalsh(blocks.V_d)) > 0


def test_estimate_zero_syndrome():
    blocks = noise_blocks(square_code(), 0.01 * np.eye(4))
    assert np.allclose(estimate(blocks, np.zeros(2), "linear"), 0.0)
    assert np.allclose(estimate(blocks, np.zeros(2), "mmse"), 0.0, atol=1e-12)


def test_estimate_odd():
    blocks = noise_blocks(square_code(), 0.01 * np.eye(4))
    s = np.array([0.4, -0.9])
    for kind in ("linear", "mmse"):
        assert np.allclose(estimate(blocks, s, kind) + estimate(blocks, -s, kind), 0.0,
                           atol=1e-10)


def test_mmse_approaches_linear_small_noise():
    code = square_code(2.0)
    blocks = noise_blocks(code, 0.01 ** 2 * np.eye(4))
    s = RNG.uniform(-0.05, 0.05, size=(50, 2))
    a = estimate(blocks, s, "linear")
    b = estimate(blocks, s, "mmse")
    assert np.max(np.abs(a - b)) < 1e-6


def test_mmse_convergence_check():
    blocks = noise_blocks(square_code(4.0), 0.01 * np.eye(4))
    probe = RNG.uniform(-ELL / 2, ELL / 2, size=(64, 2))
    assert mmse_converged(blocks, 3, probe)


def test_mc_output_identity_encoder():
    code = tms_code([1.0], standard_lattice("canonical_square"))
    out = mc_output(code, 0.04 * np.eye(4), "linear", 50_000, 3)
    assert abs(out.rms_sq - 0.04) < 5 * max(out.stderr_rms_sq, 1e-4)


def test_mc_output_requires_min_trials():
    with pytest.raises(InvalidParameter):
        mc_output(square_code(), 0.01 * np.eye(4), "mmse", 10, 0)


def test_mc_output_rms_ge_gm():
    out = mc_output(square_code(4.0), 0.01 * np.eye(4), "mmse", 50_000, 5)
    assert out.rms_sq >= out.gm_sq - 1e-12


def test_mc_matches_quadrature_oracle():
    # dual-route check of the whole Monte Carlo pipeline
    for kind in ("linear", "mmse"):
        for G, sigma in ((3.0, 0.1), (2.0, 0.2)):
            out = mc_output(square_code(G), sigma ** 2 * np.eye(4), kind, 400_000, 17)
            want = exact_square_rms(G, sigma, kind)
            err = abs(out.rms_sq - want)
            assert err < 5 * max(out.stderr_rms_sq, 1e-6 * want), (kind, G, sigma, err)


def test_mc_deterministic_across_threads():
    out1 = mc_output(square_code(3.0), 0.01 * np.eye(4), "mmse", 60_000, 9, threads=1)
    out4 = mc_output(square_code(3.0), 0.01 * np.eye(4), "mmse", 60_000, 9, threads=4)
    assert out1.rms_sq == out4.rms_sq
    assert np.array_equal(out1.V_out, out4.V_out)


def test_output_lower_bound_value():
    lb, vac = output_lower_bound([0.1, 0.1], 1)
    assert not vac
    assert np.isclose(lb, 0.006126572320329631)
    lb2, vac2 = output_lower_bound([1.2, 0.1], 1)
    assert vac2 and lb2 == 0.0


def test_no_threshold_rhs():
    assert np.isclose(no_threshold_rhs([3.0], 0.1), 0.01 / 5)
    assert no_threshold_rhs([1e6, 1e6], 0.1) < 1e-8
    with pytest.raises(InvalidParameter):
        no_threshold_rhs([0.5], 0.1)


def test_breakeven_window_constants():
    assert 1 / np.sqrt(np.e) < 1 / np.sqrt(2)


def test_convention_check_passes():
    convention_check()


def test_optimize_gain_improves():
    anc = standard_lattice("canonical_square")
    opt = optimize_gain(anc, 0.1, "mmse", trials=60_000, seed=2, n_data=1, g_max=12.0)
    assert not opt.boundary
    assert 3.0 < opt.gain < 7.0
    assert opt.output.rms_sq < 0.1 ** 2


def test_sq_rep_matches_quadrature_oracle():
    # the SR blocks are diagonal with an antidiagonal estimator, so each
    # output component is an independent 1-d wrap problem
    sigma = 0.05
    code = sq_rep_code(4.8, 0.8)
    blocks = noise_blocks(code, sigma ** 2 * np.eye(4))
    gain = np.linalg.solve(blocks.V_d, blocks.V_da)
    Vdinv = np.linalg.inv(blocks.V_d)
    want = 0.5 * (Vdinv[0, 0] + Vdinv[1, 1])
    for out_comp, syn_comp in ((0, 1), (1, 0)):
        sg = 1.0 / np.sqrt(blocks.V_d_given_a[syn_comp, syn_comp])
        want += 0.5 * gain[out_comp, syn_comp] ** 2 * _wrap_error(sg, "mmse")
    mc = mc_output(code, sigma ** 2 * np.eye(4), "mmse", 400_000, 23,
                   check_truncation=False)
    assert abs(mc.rms_sq - want) < 5 * max(mc.stderr_rms_sq, 1e-6 * want)


def test_sq_rep_near_tms_asymptotic():
    # at equal input noises the SR and TMS codes share the same leading-order
    # output law; a near-optimal SR point sits within tens of percent of it
    sigma = 0.05
    asym = 4 * sigma ** 4 / np.pi * np.log(np.pi ** 1.5 / (2 * sigma ** 4))
    out = mc_output(sq_rep_code(4.8, 0.8), sigma ** 2 * np.eye(4), "mmse",
                    400_000, 29, check_truncation=False)
    assert 0.8 * asym < out.rms_sq < 1.8 * asym


def test_mmse_never_worse_than_linear():
    anc = standard_lattice("canonical_square")
    for sigma, G in ((0.1, 4.9), (0.3, 2.0), (0.5, 1.3)):
        code = tms_code([G], anc)
        Y = sigma ** 2 * np.eye(4)
        lin = mc_output(code, Y, "linear", 150_000, 31, check_truncation=False)
        mmse = mc_output(code, Y, "mmse", 150_000, 31, check_truncation=False)
        se = np.hypot(lin.stderr_rms_sq, mmse.stderr_rms_sq)
        assert mmse.rms_sq <= lin.rms_sq + 3 * se, (sigma, G)


def test_optimize_gain_boundary_flag():
    # far beyond break-even nothing helps: optimum pinned at G ~ 1
    anc = standard_lattice("canonical_square")
    opt = optimize_gain(anc, 0.75, "linear", trials=30_000, seed=4, n_data=1, g_max=6.0)
    assert opt.boundary
    assert opt.gain < 1.02
