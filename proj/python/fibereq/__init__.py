"""Fiber link simulation, classical equalizers and a bi-LSTM equalizer."""

import json

from . import _core
from ._core import (
    ConfigError,
    Error,
    c_pred,
    crossover_distance_km,
    delay_spread_ps,
    qam16_constellation,
)

__all__ = [
    "ConfigError",
    "Error",
    "c_pred",
    "crossover_distance_km",
    "delay_spread_ps",
    "evaluate",
    "normalized_config",
    "qam16_constellation",
    "run_experiment",
    "run_sweep",
    "simulate",
    "train",
]


def _dump(config):
    return json.dumps(config if config is not None else {})


def normalized_config(config=None):
    """Config dict with every default filled in (validated)."""
    return json.loads(_core.normalized_config(_dump(config)))


def run_experiment(config=None):
    """Simulate, train if needed and measure BER for one operating point."""
    return json.loads(_core.run_experiment(_dump(config)))


def run_sweep(config):
    """Cartesian sweep over list-valued axes; one dict per point."""
    return json.loads(_core.run_sweep(_dump(config)))


def simulate(config=None, n_symbols=1000, batch=0):
    """One test frame: transmitted and FDE-equalized symbols as (n, 4) arrays."""
    return _core.simulate(_dump(config), n_symbols, batch)


def train(config=None):
    """Train the bi-LSTM; returns the history and the checkpoint text under "model"."""
    return json.loads(_core.train(_dump(config)))


def evaluate(config, model_text):
    """BER of a trained checkpoint under the config's test condition."""
    return json.loads(_core.evaluate(_dump(config), model_text))
