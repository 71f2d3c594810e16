"""World-model network: linear readouts of the filtered spike activity
predict the next world state and reward, trained online by an
error-times-trace rule local in space and time."""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .core import pseudo_derivative, reset_episode_state
from .optim import adam_init, adam_step


@dataclass
class WorldObservation:
    """World-variable vector plus the scalar reward attached to it."""

    xi: np.ndarray
    reward: float = 0.0


@dataclass
class ModelReadouts:
    """Linear readouts: r_xi (D, N) for the state, r_r (N,) for the reward."""

    r_xi: np.ndarray
    r_r: np.ndarray


@dataclass
class ModelLossConfig:
    c_xi: float = 1.0
    c_r: float = 0.1

    def __post_init__(self):
        if self.c_xi < 0 or self.c_r < 0:
            raise ValueError("loss weights must be nonnegative")


@dataclass
class ModelGradients:
    """Per-episode accumulation buffers (improvement direction)."""

    w: np.ndarray
    r_xi: np.ndarray
    r_r: np.ndarray

    @classmethod
    def zeros(cls, n, d):
        return cls(np.zeros((n, n)), np.zeros((d, n)), np.zeros(n))

    def clear(self):
        self.w[:] = 0.0
        self.r_xi[:] = 0.0
        self.r_r[:] = 0.0


def init_readouts(n_neurons, obs_dim):
    # Zero init: predictions start at 0, which bounds early errors.
    return ModelReadouts(r_xi=np.zeros((obs_dim, n_neurons)),
                         r_r=np.zeros(n_neurons))


def model_predict(s_bar, readouts):
    """Linear readoff of the filtered spikes."""
    return WorldObservation(xi=readouts.r_xi @ s_bar,
                            reward=float(readouts.r_r @ s_bar))


def model_loss(predictions, targets, cfg):
    """Weighted squared prediction error summed over time and components."""
    if len(predictions) != len(targets):
        raise ValueError("predictions and targets differ in length")
    total = 0.0
    for pred, tgt in zip(predictions, targets):
        diff = tgt.xi - pred.xi
        total += cfg.c_xi * float(diff @ diff)
        total += cfg.c_r * (tgt.reward - pred.reward) ** 2
    return total


def accumulate_model_gradients(error_xi, error_r, s_bar, p, e, readouts,
                               cfg, grads):
    """Add one step's contributions to the gradient buffers, in place.

    Recurrent rule: per-neuron learning signal (readout-weighted errors)
    times the post p_i and pre e_j traces. Readout rules: error times s_bar.
    The buffers point toward decreasing loss (they equal -1/2 dE/dparam for
    the readouts).
    """
    backend = kernels.active_backend()
    signal = cfg.c_xi * (error_xi @ readouts.r_xi) \
        + cfg.c_r * error_r * readouts.r_r
    backend.add_outer(grads.w, signal * p, e)
    backend.add_outer(grads.r_xi, cfg.c_xi * error_xi, s_bar)
    grads.r_r += cfg.c_r * error_r * s_bar
    return grads


class ModelModule:
    """The model network with its readouts, traces and optimizers.

    Drives the LIF layer with (one-hot action, world variables), exposes the
    next-state/reward prediction, and accumulates the online learning rule.
    One Adam step per tensor is applied at episode end; during dreams and
    planning rollouts nothing here is updated.
    """

    def __init__(self, config, params, n_actions, obs_dim,
                 loss_cfg=None, lr=1e-3):
        self.config = config
        self.params = params
        self.n_actions = n_actions
        self.obs_dim = obs_dim
        self.loss_cfg = loss_cfg or ModelLossConfig()
        self.readouts = init_readouts(config.n_neurons, obs_dim)
        self.opt_w = adam_init(params.w_rec.shape, lr)
        self.opt_r_xi = adam_init(self.readouts.r_xi.shape, lr)
        self.opt_r_r = adam_init(self.readouts.r_r.shape, lr)
        self.grads = ModelGradients.zeros(config.n_neurons, obs_dim)
        self.layer, self.elig = reset_episode_state(config)
        self.loss_xi = 0.0
        self.loss_r = 0.0
        self._onehot = np.zeros(n_actions)

    def begin_episode(self):
        self.layer, self.elig = reset_episode_state(self.config)
        self.loss_xi = 0.0
        self.loss_r = 0.0

    def step(self, action, xi):
        """Advance one step driven by (action, xi); returns the prediction
        read off the updated activity."""
        self._onehot[:] = 0.0
        self._onehot[action] = 1.0
        current = self.params.project(action=self._onehot,
                                      xi=np.asarray(xi, dtype=np.float64))
        layer = self.layer
        kernels.active_backend().lif_step(
            layer.v, layer.s, layer.s_hat, layer.s_bar,
            self.params.w_rec, np.ascontiguousarray(current),
            self.config.alpha_s, self.config.alpha_m, self.config.alpha_star,
            self.config.v_rest, self.config.v_th,
            self.config.w_res_magnitude)
        kernels.active_backend().eligibility_step(
            self.elig.e, layer.s_hat, self.config.alpha_m)
        self.elig.p = pseudo_derivative(layer.v, self.config)
        return model_predict(layer.s_bar, self.readouts)

    def accumulate(self, prediction, target):
        """Record one prediction error against the environment's next
        observation and add its learning-rule contributions."""
        error_xi = target.xi - prediction.xi
        error_r = target.reward - prediction.reward
        self.loss_xi += self.loss_cfg.c_xi * float(error_xi @ error_xi)
        self.loss_r += self.loss_cfg.c_r * error_r ** 2
        accumulate_model_gradients(error_xi, error_r, self.layer.s_bar,
                                   self.elig.p, self.elig.e, self.readouts,
                                   self.loss_cfg, self.grads)

    def apply_updates(self):
        """One Adam step per tensor from the accumulated buffers."""
        self.opt_w, self.params.w_rec = adam_step(
            self.opt_w, self.params.w_rec, -self.grads.w)
        self.opt_r_xi, self.readouts.r_xi = adam_step(
            self.opt_r_xi, self.readouts.r_xi, -self.grads.r_xi)
        self.opt_r_r, self.readouts.r_r = adam_step(
            self.opt_r_r, self.readouts.r_r, -self.grads.r_r)
        self.grads.clear()

    def discard_gradients(self):
        self.grads.clear()

    def snapshot(self):
        return (self.layer.copy(), self.elig.copy())

    def restore(self, snap):
        self.layer, self.elig = snap[0].copy(), snap[1].copy()
