import math

import numpy as np
import pytest

import embamp


def test_error_probability_and_fidelity_cap():
    assert embamp.error_probability(0.0) == pytest.approx(0.5)
    assert embamp.error_probability(36.0) == pytest.approx(0.5 * math.erfc(6 / (2 * math.sqrt(2))))
    assert embamp.assignment_fidelity(math.inf, 0.3e-6, 50e-6) == pytest.approx(math.exp(-0.006), abs=1e-12)
    assert embamp.nines(0.999) == pytest.approx(3.0)


def test_fisher_discriminant_one_dimensional():
    v = np.array([[0.25]])
    d2 = embamp.fisher_discriminant(np.array([0.5]), np.array([-0.5]), v, v)
    assert d2 == pytest.approx(1.0 / 0.25)


def test_squeeze_propagator_is_symplectic_when_lossless():
    s = embamp.propagate_squeeze_analytic(6e6, 0.4, 3e6, 0.0, 2e-7)
    omega = np.array([[0.0, 1.0], [-1.0, 0.0]])
    assert np.allclose(s.T @ omega @ s, omega, atol=1e-9)


def test_conversion_transfer():
    g, chi = 2 * math.pi * 10e6, 2 * math.pi * 3e6
    c = embamp.conversion_transfer(g, chi)
    assert c["p_s"] == pytest.approx(100 / 109)
    assert c["p_a"] + c["p_s"] == pytest.approx(1.0)


def test_ea_simulation():
    dev = embamp.DeviceParams()
    out = embamp.simulate_ea(dev, squeeze_db=3.0, eta_mhz=2.0, gain=5.0)
    assert len(out["times"]) == out["photons_e"].shape[0]
    assert out["photons_e"].shape[1] == 3
    assert max(out["d2"]) > 0.0
    assert out["dead_time"] > 0.0


def test_readout_models():
    dev = embamp.DeviceParams()
    assert embamp.ea_d2(dev, 5.0, 0.1e-6) == 0.0
    assert embamp.ea_d2(dev, 5.0, 2e-6) > 0.0
    assert embamp.cdr_d2(dev, 5.0, 1e-6) > 0.0
    db, snr = embamp.optimal_squeezing(dev, 5.0)
    assert 0.0 < db < embamp.budget_squeeze_db(5.0)
    assert snr > 0.0


def test_freqplan():
    assert embamp.validate_plan([4.0, 6.0, 7.5]) == []
    kinds = {c["kind"] for c in embamp.validate_plan([4.0, 6.0, 10.0], band_hi=12.0)}
    assert "ModeHit" in kinds
    plan = embamp.search_plan(3, seed=1)
    assert len(plan) == 3 and embamp.validate_plan(plan) == []
    assert embamp.bandwidth_bound(3, 50.0) == pytest.approx(0.45)
    with pytest.raises(embamp.InfeasibleError):
        embamp.search_plan(3, 4.0, 4.1)


def test_config_errors():
    assert embamp.parse_config('{"schema_version": 1}')["protocol"] == "ea"
    with pytest.raises(embamp.ConfigError, match="device.khi"):
        embamp.parse_config('{"schema_version": 1, "device": {"khi": 3}}')
    with pytest.raises(ValueError, match="device.chi"):
        embamp.parse_config('{"schema_version": 1, "device": {"chi": -3}}')
