import json

import numpy as np
import pytest

from gkplab.channels import (
    CapacityBounds,
    NoiseSpec,
    capacity_bounds,
    loss_to_agn,
    sample_agn,
    teleport_agn,
    thermal_entropy,
)
from gkplab.errors import InvalidParameter, InvalidTransmittance, NotPositiveDefinite
from gkplab.rng import stream


def test_sample_zero_noise():
    out = sample_agn(np.zeros((2, 2)), stream(0), size=100)
    assert np.all(out == 0)


def test_sample_determinism():
    a = sample_agn(0.3 * np.eye(4), stream(42), size=1000)
    b = sample_agn(0.3 * np.eye(4), stream(42), size=1000)
    assert np.array_equal(a, b)


def test_sample_covariance_converges():
    # law-of-large-numbers oracle: 1e6 draws, each entry within 1 percent
    Y = np.array([[0.5, 0.2], [0.2, 0.4]])
    out = sample_agn(Y, stream(7), size=1_000_000)
    emp = out.T @ out / out.shape[0]
    assert np.max(np.abs(emp - Y)) < 0.01 * np.max(Y)


def test_sample_rejects_asymmetric():
    with pytest.raises(NotPositiveDefinite):
        sample_agn(np.array([[1.0, 0.5], [0.0, 1.0]]), stream(0))


def test_sample_rejects_indefinite():
    with pytest.raises(NotPositiveDefinite):
        sample_agn(np.diag([1.0, -0.2]), stream(0))


def test_loss_to_agn_values():
    assert np.isclose(loss_to_agn(0.9, 0.0, "pre"), 0.1)
    assert np.isclose(loss_to_agn(0.9, 0.0, "post"), 0.1 / 0.9)
    assert loss_to_agn(1.0, 3.0, "pre") == 0.0
    assert loss_to_agn(1.0, 3.0, "post") == 0.0


def test_pre_amp_never_noisier():
    for eta in np.linspace(0.05, 1.0, 12):
        for nbar in (0.0, 0.5, 3.0):
            assert loss_to_agn(eta, nbar, "pre") <= loss_to_agn(eta, nbar, "post") + 1e-15


def test_loss_to_agn_range():
    with pytest.raises(InvalidTransmittance):
        loss_to_agn(0.0, 0.0)
    with pytest.raises(InvalidTransmittance):
        loss_to_agn(1.2, 0.0)


def test_teleport_agn():
    assert np.isclose(teleport_agn(1.0, 20.0), 0.0, atol=1e-12)
    assert np.isclose(teleport_agn(0.37, 0.0), 1.0)
    assert np.isclose(teleport_agn(0.81, 1.0), 0.22180175491295145)
    rs = np.linspace(0, 4, 40)
    vals = [teleport_agn(0.7, r) for r in rs]
    assert np.all(np.diff(vals) < 0)
    assert np.isclose(teleport_agn(0.7, 25.0), 1 - np.sqrt(0.7), atol=1e-12)


def test_thermal_entropy():
    assert thermal_entropy(0.0) == 0.0
    assert np.isclose(thermal_entropy(1.0), 2.0)  # 2 log2 2 - 0


def test_capacity_pure_loss():
    b = capacity_bounds(NoiseSpec("loss", eta=0.75, nbar=0.0))
    assert np.isclose(b.lower, np.log2(3))
    assert np.isclose(b.upper, np.log2(3))
    b = capacity_bounds(NoiseSpec("loss", eta=0.5, nbar=0.0))
    assert b.lower == 0.0 and b.upper == 0.0


def test_capacity_antidegradable_clamp():
    b = capacity_bounds(NoiseSpec("loss", eta=0.3, nbar=0.0))
    assert b.upper == 0.0 and b.lower == 0.0 and b.lower_vacuous


def test_capacity_agn():
    b = capacity_bounds(NoiseSpec("agn", sigma2=0.1))
    assert np.isclose(b.lower, 1.8792330539983988)
    assert np.isclose(b.upper, 3.169925001442312)
    assert not b.lower_vacuous


def test_capacity_agn_matrix_matches_scalar():
    Y = 0.1 * np.eye(2)
    bm = capacity_bounds(NoiseSpec("agn", Y=Y))
    bs = capacity_bounds(NoiseSpec("agn", sigma2=0.1))
    assert np.isclose(bm.lower, bs.lower) and np.isclose(bm.upper, bs.upper)


def test_capacity_order_invariant():
    rng = np.random.default_rng(3)
    for _ in range(30):
        if rng.random() < 0.5:
            spec = NoiseSpec("loss", eta=float(rng.uniform(0.05, 1.0)),
                             nbar=float(rng.uniform(0, 2)))
        else:
            spec = NoiseSpec("agn", sigma2=float(rng.uniform(0.01, 1.5)))
        b = capacity_bounds(spec)
        assert b.lower <= b.upper + 1e-12


def test_noisespec_validation():
    with pytest.raises(InvalidTransmittance):
        NoiseSpec("loss", eta=1.5, nbar=0.0)
    with pytest.raises(InvalidParameter):
        NoiseSpec("amp", G=0.5, nbar=0.0)
    with pytest.raises(InvalidParameter):
        NoiseSpec("bogus")


def test_noisespec_json_roundtrip():
    for spec in (NoiseSpec("loss", eta=0.9, nbar=0.1),
                 NoiseSpec("amp", G=2.0, nbar=0.0),
                 NoiseSpec("agn", sigma2=0.2)):
        again = NoiseSpec.from_json(json.loads(json.dumps(spec.to_json())))
        assert again.to_json() == spec.to_json()
