"""Vertical dynamics of a two-bogie railway vehicle on a periodic track."""

import json

from . import _core
from ._core import (
    CSV_HEADER,
    STATE_SIZE,
    SWEEP_HEADER,
    RailsimError,
    TrackProfile,
    VehicleParams,
    derivative,
    excitation_frequency,
    mechanical_energy,
    steady_state_amplitudes,
    wheel_forcing,
)

__all__ = [
    "CSV_HEADER",
    "STATE_SIZE",
    "SWEEP_HEADER",
    "RailsimError",
    "TrackProfile",
    "VehicleParams",
    "bench",
    "config",
    "derivative",
    "excitation_frequency",
    "mechanical_energy",
    "simulate",
    "simulate_adaptive",
    "steady_state_amplitudes",
    "sweep",
    "validate",
    "wheel_forcing",
]


def _text(cfg):
    if cfg is None:
        return "{}"
    if isinstance(cfg, str):
        return cfg
    return json.dumps(cfg)


def config(cfg=None):
    """Full config as a dict, defaults filled in. Raises RailsimError on bad input."""
    return json.loads(_core.normalize_config(_text(cfg)))


def simulate(cfg=None, engine="seq"):
    """Fixed-step RK4 run. Returns t, states (N x 8), eta (N x 4) and, for engine="par", stats."""
    return _core.simulate(_text(cfg), engine)


def simulate_adaptive(cfg=None):
    return _core.simulate_adaptive(_text(cfg))


def sweep(cfg, speeds_kmh):
    return _core.sweep(_text(cfg), list(speeds_kmh))


def bench(cfg=None, reps=5):
    return json.loads(_core.bench(_text(cfg), reps))


def validate(cfg=None, scratch_dir="."):
    return _core.validate(_text(cfg), str(scratch_dir))
