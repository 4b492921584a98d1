import math

import numpy as np
import pytest

import stokep


def test_config_defaults_and_overrides():
    cfg = stokep.Config()
    text = cfg.to_text()
    assert "sigma_r" in text and "[run]" in text
    cfg2 = cfg.replace(T=0.5, steps=["2^-3", "2^-4"], observables=["M"])
    assert "T = 5" in cfg2.to_text()
    assert stokep.Config.from_text(cfg.to_text()).to_text() == text
    assert "seed" in stokep.Config.keys()


def test_bad_config_raises_value_error():
    with pytest.raises(ValueError, match="sigma_x"):
        stokep.Config(sigma_x=1.0)
    with pytest.raises(ValueError):
        stokep.Config(h=-1.0).validate()


def test_simulate_shapes_and_determinism():
    cfg = stokep.Config(T=1.0, h=0.01, seed=3)
    a = stokep.simulate(cfg)
    b = stokep.simulate(cfg)
    assert a["states"].shape == (101, 4)
    assert a["t"][-1] == pytest.approx(1.0)
    assert a["failure"] is None
    np.testing.assert_array_equal(a["states"], b["states"])


def test_noiseless_invariants_hold():
    cfg = stokep.Config(T=2.0, h=0.01, sigma_r=0.0, sigma_phi=0.0)
    states = stokep.simulate(cfg)["states"]
    M0, H0 = stokep.invariants(states[0])
    M1, H1 = stokep.invariants(states[-1])
    assert abs(M1 - M0) < 1e-5 * abs(M0)
    assert abs(H1 - H0) < 1e-5 * abs(H0)


def test_ensemble_is_worker_independent():
    cfg = stokep.Config(T=0.5, h=0.01, n=300, seed=9, observables=["M", "H"])
    one = stokep.ensemble(cfg.replace(workers=1))
    four = stokep.ensemble(cfg.replace(workers=4))
    assert set(one["observables"]) == {"M", "H", "H_drift_residual"}
    for name, est in one["observables"].items():
        np.testing.assert_array_equal(est["mean"], four["observables"][name]["mean"])
    assert one["n_excluded"] == 0 and not one["tainted"]


def test_langevin_weak_order_two():
    cfg = stokep.Config(model="langevin", T=1.0, steps=["2^-3", "2^-4", "2^-5", "2^-6"])
    study = stokep.converge(cfg)
    assert study["reference"] == "exact"
    assert 1.7 < study["order"] < 2.3


def test_elements_round_trip():
    el = stokep.extract_elements([1.0, 1.0, 0.01, 1.1])
    assert el[0] == pytest.approx(1.26598, rel=1e-4)
    assert el[1] == pytest.approx(0.21029, rel=1e-4)
    back = stokep.reconstruct_polar(el)
    np.testing.assert_allclose(back[0], 1.0, rtol=1e-10)
    np.testing.assert_allclose(back[2:], [0.01, 1.1], rtol=1e-10)


def test_canonical_correction_vanishes():
    corr = stokep.canonical_wong_zakai([1.2, 0.3, 0.05, 0.9])
    assert max(abs(c) for c in corr) < 1e-8


def test_structure_verdicts():
    noisy = stokep.check_structure(stokep.Config(structure_points=20))
    clean = stokep.check_structure(stokep.Config(structure_points=20, sigma_phi=0.0))
    assert not noisy["hamiltonian"]
    assert noisy["violated_condition"] != "none"
    assert clean["hamiltonian"] and clean["violated_condition"] == "none"


def test_gauss_agrees_at_small_step():
    rep = stokep.gauss(stokep.Config(T=1.0, h=1e-3))
    assert not rep["truncated"]
    assert rep["sup_rel_a"] < 1e-2 and rep["sup_rel_e"] < 1e-2


def test_gauss_circular_start_raises():
    with pytest.raises(stokep.PericenterSingularityError):
        stokep.gauss(stokep.Config(T=0.1, h=0.01, v0=0.0, w0=1.0))


def test_run_cli_exit_codes():
    code, out, err = stokep.run_cli(["check-structure", "--sigma_phi", "0"])
    assert code == 0 and "hamiltonian=true" in out
    code, _, err = stokep.run_cli(["simulate", "--bogus", "1"])
    assert code == 1
    code, out, _ = stokep.run_cli(["simulate", "--T", "0.05", "--h", "0.01"])
    assert code == 0 and out.splitlines()[0].startswith("t,r,phi")
    assert math.isfinite(float(out.splitlines()[-1].split(",")[1]))
