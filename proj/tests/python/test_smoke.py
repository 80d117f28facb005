import math

import numpy as np
import pytest

import decaylab


def test_neutron_closed_form():
    assert decaylab.neutron_survival_closed_form(1) == pytest.approx(0.0, abs=1e-15)
    assert decaylab.neutron_survival_closed_form(2) == pytest.approx(0.25, abs=1e-15)
    assert decaylab.neutron_survival_closed_form(10) == pytest.approx(math.cos(math.pi / 20) ** 20, rel=1e-14)


def test_two_level_survival_is_rabi():
    model = decaylab.two_level_model(0.0, 1.0)
    times = np.linspace(0.0, 3.0, 7)
    out = decaylab.survival_exact(model, times)
    assert out["amplitudes"].dtype == np.complex128
    np.testing.assert_allclose(np.abs(out["amplitudes"]) ** 2, np.cos(times) ** 2, atol=1e-12)


def test_finite_model_from_numpy():
    hp = np.array([[0.0, 0.3], [0.3, 0.0]], dtype=complex)
    model = decaylab.FiniteModel([0.0, 1.0], hp, 0)
    coeffs = decaylab.short_time_coefficients(model)
    assert coeffs["variance"] == pytest.approx(0.09, rel=1e-14)
    assert coeffs["tau_gaussian"] == pytest.approx(1.0 / 0.3, rel=1e-14)


def test_spectral_pole_matches_golden_rule():
    model = decaylab.SpectralModel(0.0, 1.0, 0.05, 1.0, 1.0)
    pole = decaylab.pole_solve(model)
    rate = decaylab.golden_rule_rate(model)
    assert pole["gamma"] == pytest.approx(rate, rel=0.02)
    assert pole["pole"].imag == pytest.approx(-pole["gamma"] / 2, rel=1e-12)


def test_agbr_delta_propagator():
    cfg = decaylab.AgBrConfig(n_spins=10, x1=1.0, spacing=1.0, coupling=0.3)
    assert cfg.q == pytest.approx(math.sin(0.3) ** 2, rel=1e-15)
    assert decaylab.exact_propagator_delta(cfg, 4.5) == pytest.approx(math.cos(0.3) ** 4, rel=1e-14)
    oracle = decaylab.brute_force_oracle(cfg, 4.5)
    assert abs(oracle - math.cos(0.3) ** 4) < 1e-10
    stats = decaylab.final_state(cfg)
    assert stats["visibility"] == pytest.approx((1 - cfg.q) ** 5, rel=1e-14)


def test_invalid_arguments_raise():
    with pytest.raises(decaylab.ArgumentError):
        decaylab.AgBrConfig(n_spins=0, x1=1.0, spacing=1.0, coupling=0.3)
    with pytest.raises(ValueError):
        decaylab.SpectralModel(0.0, 1.0, 0.1, -1.0, 1.0)


def test_run_and_verify(tmp_path):
    path = tmp_path / "z.csv"
    summary, written = decaylab.run({
        "kind": "zeno",
        "parameters": {"protocol": "neutron", "n": [1, 2, 4]},
        "output": {"path": str(path), "format": "csv"},
    })
    assert written == [str(path)]
    assert path.read_text().startswith("# config_hash=fnv1a64:")
    assert "zeno-bound" in decaylab.list_suites()
    report = decaylab.verify("zeno-closed-form")
    assert set(report) == {"passed", "criteria"}
    assert report["criteria"][0]["id"] == 1
