import math

import numpy as np
import pytest

import railsim


def test_defaults_and_header():
    cfg = railsim.config()
    assert cfg["track"]["speed"] == 20.0
    assert cfg["time"]["step"] == 1e-3
    assert railsim.CSV_HEADER == "t,z1,z1dot,z2,z2dot,zk,zkdot,phi,phidot,eta1,eta2,eta3,eta4"


def test_unknown_key_rejected():
    with pytest.raises(railsim.RailsimError, match="track.speedd"):
        railsim.config({"track": {"speedd": 20}})
    with pytest.raises(railsim.RailsimError, match="track.speed"):
        railsim.config({"track": {"speed": -1}})


def test_excitation_frequency():
    w = railsim.excitation_frequency(railsim.TrackProfile())
    assert w == pytest.approx(2 * math.pi * 20 / 25)


def test_derivative_hand_value():
    bounce = [0, 0, 0, 0, 1.0, 0, 0, 0]
    dx = railsim.derivative(bounce, [0] * 4, [0] * 4)
    assert dx[5] == pytest.approx(-93.3333333, rel=1e-6)
    assert dx[1] == pytest.approx(295.5555556, rel=1e-6)
    assert railsim.mechanical_energy([0.01, 0, 0, 0, 0, 0, 0, 0]) == pytest.approx(0.437, rel=1e-9)


def test_simulate_engines_agree():
    cfg = {"time": {"end": 1.0}}
    seq = railsim.simulate(cfg)
    par = railsim.simulate(cfg, engine="par")
    assert seq["states"].shape == (1001, 8)
    assert seq["eta"].shape == (1001, 4)
    assert np.array_equal(seq["states"], par["states"])
    stats = par["stats"]
    assert len(stats["workers"]) == 4
    assert all(w["stage_rendezvous_count"] == 4 * w["steps"] for w in stats["workers"])


def test_adaptive_close_to_fixed():
    cfg = {"time": {"end": 2.0}}
    fixed = railsim.simulate(cfg)["states"][-1]
    adaptive = railsim.simulate_adaptive(cfg)["states"][-1]
    assert np.max(np.abs(fixed - adaptive)) < 1e-6


def test_steady_state_and_sweep():
    freqs, amps = railsim.steady_state_amplitudes()
    assert len(freqs) == 2 and amps.shape == (8, 2)
    rows = railsim.sweep({"validation": {"settle": 20, "window": 5}}, [72])
    assert rows[0]["status"] == "ok"
    assert rows[0]["omega"] == pytest.approx(5.0265, abs=1e-3)
    assert rows[0]["max_par_seq_diff"] == 0.0


def test_bench_report():
    report = railsim.bench({"time": {"end": 0.1}}, reps=2)
    assert report["repetitions"] == 2
    assert all(p["accounting_ok"] for p in report["plans"])
