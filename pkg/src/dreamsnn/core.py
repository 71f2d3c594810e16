"""Discrete-time LIF layer dynamics, surrogate derivative, and the
low-pass traces (spike filter, readout filter, eligibility) shared by the
agent and world-model networks."""

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels


class ConfigError(ValueError):
    """Invalid static configuration (dimensions, time constants, ...)."""


@dataclass
class NeuronConfig:
    """Static constants of one spiking module.

    Voltages are in arbitrary units with threshold 0 and rest -4; times in ms.
    """

    n_neurons: int = 500
    dt: float = 1.0
    tau_m: float = 20.0          # membrane leak
    tau_s: float = 5.0           # spike filter (s_hat)
    tau_star: float = 20.0       # readout filter (s_bar)
    v_th: float = 0.0
    v_rest: float = -4.0
    w_res_magnitude: float = 20.0  # post-spike decrement of the membrane
    delta_v: float = 0.3         # surrogate-derivative width

    def __post_init__(self):
        if self.n_neurons <= 0:
            raise ConfigError("n_neurons must be positive")
        if self.dt <= 0 or self.tau_m <= 0 or self.tau_s <= 0 \
                or self.tau_star <= 0:
            raise ConfigError("dt and all time constants must be positive")
        if self.delta_v <= 0:
            raise ConfigError("delta_v must be positive")
        if self.v_rest >= self.v_th:
            raise ConfigError("v_rest must lie below v_th")

    @property
    def alpha_m(self):
        return math.exp(-self.dt / self.tau_m)

    @property
    def alpha_s(self):
        return math.exp(-self.dt / self.tau_s)

    @property
    def alpha_star(self):
        return math.exp(-self.dt / self.tau_star)


@dataclass
class NeuronLayerState:
    """Dynamic per-neuron variables: membrane v, spikes s (0/1 floats),
    filtered spikes s_hat, readout trace s_bar."""

    v: np.ndarray
    s: np.ndarray
    s_hat: np.ndarray
    s_bar: np.ndarray

    def copy(self):
        return NeuronLayerState(self.v.copy(), self.s.copy(),
                                self.s_hat.copy(), self.s_bar.copy())


@dataclass
class NetworkParams:
    """Trainable recurrent weights plus the frozen input projections.

    input_weights maps stream name -> (N, D_stream) matrix. Only w_rec (and
    the readouts owned by the agent / world-model modules) are ever updated.
    """

    w_rec: np.ndarray
    input_weights: dict = field(default_factory=dict)

    @property
    def n_neurons(self):
        return self.w_rec.shape[0]

    def project(self, **streams):
        """Total external current: sum of input_weights[name] @ value."""
        current = None
        for name, value in streams.items():
            term = self.input_weights[name] @ value
            current = term if current is None else current + term
        return current


@dataclass
class EligibilityState:
    """Per-presynaptic-neuron trace e and per-neuron surrogate derivative p.

    e depends only on the presynaptic index, so a single length-N vector is
    kept and broadcast across postsynaptic rows when forming updates."""

    e: np.ndarray
    p: np.ndarray

    def copy(self):
        return EligibilityState(self.e.copy(), self.p.copy())


def init_network(config, rng_seed, input_dims, sigma_in, sigma_rec=1.0):
    """Draw the fixed Gaussian weights of one module.

    input_dims maps stream name -> dimension; sigma_in is a matching dict of
    per-stream standard deviations (or a single float used for all streams).
    Recurrent weights are N(0, (sigma_rec/sqrt(N))^2). Deterministic given
    rng_seed.
    """
    n = config.n_neurons
    if not isinstance(sigma_in, dict):
        sigma_in = {name: sigma_in for name in input_dims}
    for name, dim in input_dims.items():
        if dim <= 0:
            raise ConfigError(f"input stream {name!r} has dimension {dim}")
    rng = np.random.default_rng(rng_seed)
    input_weights = {
        name: rng.normal(0.0, sigma_in[name], size=(n, dim))
        for name, dim in input_dims.items()
    }
    w_rec = rng.normal(0.0, sigma_rec / math.sqrt(n), size=(n, n))
    return NetworkParams(w_rec=w_rec, input_weights=input_weights)


def pseudo_derivative(v, config):
    """Surrogate derivative of the threshold, peaked at v = 0.

    Evaluated through exp(-|v|/delta_v) so it saturates to 0 instead of
    overflowing for |v| >> delta_v.
    """
    dv = config.delta_v
    ez = np.exp(-np.abs(np.asarray(v, dtype=np.float64)) / dv)
    return ez / (dv * (1.0 + ez) ** 2)


def step_layer(state, params, external_current, config):
    """Advance one layer by one time step; returns the new state.

    Order: s_hat filters the current spikes; the membrane leaks toward
    (recurrent drive + external current + v_rest) and drops by
    w_res_magnitude where a spike just occurred; new spikes threshold the
    membrane; s_bar filters the new spikes.
    """
    current = np.ascontiguousarray(external_current, dtype=np.float64)
    if current.shape != (config.n_neurons,):
        raise ConfigError(
            f"external current has shape {current.shape}, "
            f"expected ({config.n_neurons},)")
    if not np.all(np.isfinite(current)):
        raise FloatingPointError("non-finite external current")
    new = state.copy()
    kernels.active_backend().lif_step(
        new.v, new.s, new.s_hat, new.s_bar, params.w_rec, current,
        config.alpha_s, config.alpha_m, config.alpha_star,
        config.v_rest, config.v_th, config.w_res_magnitude)
    return new


def update_eligibility(elig, s_hat, config):
    """Filter the presynaptic trace toward s_hat; returns the new state
    (p is carried over unchanged)."""
    new = elig.copy()
    kernels.active_backend().eligibility_step(new.e, np.ascontiguousarray(
        s_hat, dtype=np.float64), config.alpha_m)
    return new


def reset_episode_state(config):
    """Fresh start-of-episode state: membrane at rest, all traces zero."""
    n = config.n_neurons
    layer = NeuronLayerState(
        v=np.full(n, config.v_rest, dtype=np.float64),
        s=np.zeros(n), s_hat=np.zeros(n), s_bar=np.zeros(n))
    elig = EligibilityState(
        e=np.zeros(n),
        p=pseudo_derivative(layer.v, config))
    return layer, elig
