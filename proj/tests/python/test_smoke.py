import math

import numpy as np
import pytest

import fibereq


def test_defaults_round_trip():
    cfg = fibereq.normalized_config({"band": "O", "n_spans": 3})
    assert cfg["band"] == 1310
    assert cfg["n_spans"] == 3
    assert fibereq.normalized_config(cfg) == cfg


def test_unknown_key_rejected():
    with pytest.raises(fibereq.ConfigError, match="bogus"):
        fibereq.normalized_config({"bogus": 1})


def test_delay_spread_and_complexity():
    assert fibereq.delay_spread_ps(0.82, 300.0, 0.05) == pytest.approx(2 * math.pi * 0.82 * 300 * 0.05)
    assert fibereq.c_pred(20, 50) == pytest.approx(16 * (400 + 1000 + 20) / 4)
    assert 800 <= fibereq.crossover_distance_km(1550, 20, 50) <= 1600


def test_constellation_unit_energy():
    pts = np.array(fibereq.qam16_constellation())
    assert pts.shape == (16,)
    assert np.mean(np.abs(pts) ** 2) == pytest.approx(1.0)


def test_linear_link_is_inverted():
    cfg = {"n_spans": 2, "noiseless": True, "fiber": {"gamma_per_w_km": 0.0}, "forward_steps_per_span": 1}
    out = fibereq.simulate(cfg, n_symbols=2000)
    assert out["tx"].shape == (2000, 4)
    assert out["fde_bit_errors"] == 0
    assert np.max(np.abs(out["fde"] - out["tx"])) < 1e-9


def test_experiment_and_sweep_are_deterministic():
    cfg = {"n_spans": 1, "forward_steps_per_span": 5, "equalizer": "fde", "launch_power_dbm": [0.0, 2.0],
           "split": {"test": 1000}, "seed": 5}
    a = fibereq.run_sweep(cfg)
    b = fibereq.run_sweep(cfg)
    assert [r["result"]["ber"] for r in a] == [r["result"]["ber"] for r in b]
    assert len(a) == 2 and all("error" not in r for r in a)


def test_train_then_evaluate():
    cfg = {"n_spans": 1, "forward_steps_per_span": 5, "equalizer": "fde+lstm", "launch_power_dbm": 0.0,
           "lstm": {"hidden_units": 4, "k": 1}, "split": {"train": 1000, "validation": 300, "test": 500},
           "training": {"max_epochs": 3}}
    trained = fibereq.train(cfg)
    assert trained["epochs_run"] == 3
    res = fibereq.evaluate(cfg, trained["model"])
    assert 0.0 <= res["ber"] <= 1.0
    assert res["n_bits"] == 8 * (500 - 2)
