"""Agent network: softmax policy read off the filtered spikes, and the
reward-modulated policy-gradient rule kept online through discounted
action-gated traces."""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .core import pseudo_derivative, reset_episode_state
from .optim import adam_init, adam_step


@dataclass
class PolicyReadout:
    """Linear policy readout r_pi (K, N): logits y_k = sum_i r_pi[k,i] s_bar_i."""

    r_pi: np.ndarray


@dataclass
class PolicyState:
    """Discounted traces of the action-gated pre/post products.

    z_w (K, N, N) pairs with the recurrent weights, z_r (K, N) with the
    policy readout; both decay by gamma each step before accumulation.
    """

    z_w: np.ndarray
    z_r: np.ndarray
    gamma: float = 0.99

    @classmethod
    def zeros(cls, n_actions, n_neurons, gamma=0.99):
        return cls(np.zeros((n_actions, n_neurons, n_neurons)),
                   np.zeros((n_actions, n_neurons)), gamma)

    def clear(self):
        self.z_w[:] = 0.0
        self.z_r[:] = 0.0

    def copy(self):
        return PolicyState(self.z_w.copy(), self.z_r.copy(), self.gamma)


@dataclass
class PolicyGradients:
    """Per-episode accumulation buffers (ascent direction for the return)."""

    w: np.ndarray
    r_pi: np.ndarray

    @classmethod
    def zeros(cls, n_actions, n_neurons):
        return cls(np.zeros((n_neurons, n_neurons)),
                   np.zeros((n_actions, n_neurons)))

    def clear(self):
        self.w[:] = 0.0
        self.r_pi[:] = 0.0


def policy_probs(s_bar, readout):
    """Softmax of the linear readout, max-subtracted for stability."""
    y = readout.r_pi @ s_bar
    y = y - np.max(y)
    ey = np.exp(y)
    return ey / ey.sum()


def sample_action(pi, rng):
    """Categorical draw from pi; raises on a non-normalized distribution."""
    pi = np.asarray(pi, dtype=np.float64)
    if abs(pi.sum() - 1.0) > 1e-9 or np.any(pi < 0):
        raise ValueError("action probabilities must be nonnegative and "
                         "sum to 1")
    u = rng.random()
    return int(min(np.searchsorted(np.cumsum(pi), u, side="right"),
                   len(pi) - 1))


def compute_return(rewards, gamma):
    """Discounted future sums R[t] = sum_{t'>=t} gamma^(t'-t) r[t']."""
    rewards = np.asarray(rewards, dtype=np.float64)
    out = np.empty_like(rewards)
    acc = 0.0
    for t in range(len(rewards) - 1, -1, -1):
        acc = rewards[t] + gamma * acc
        out[t] = acc
    return out


def accumulate_policy_gradients(action, pi, p, e, s_bar, reward,
                                state, readout, grads):
    """One online step of the reward-modulated policy-gradient rule.

    The traces first decay by gamma and absorb the new
    (1[a=k] - pi_k)-gated products; the reward then gates their readoff
    into the gradient buffers. Summed over an episode this equals the
    offline return-weighted (REINFORCE) double sum.
    """
    backend = kernels.active_backend()
    g = -np.asarray(pi, dtype=np.float64).copy()
    g[action] += 1.0
    backend.policy_trace_step(state.z_w, state.z_r, g, p, e,
                              np.ascontiguousarray(s_bar, dtype=np.float64),
                              state.gamma)
    if reward != 0.0:
        backend.policy_buffer_add(grads.w, grads.r_pi, state.z_w, state.z_r,
                                  readout.r_pi, reward)
    return state, grads


class AgentModule:
    """The agent network with its policy readout, traces and optimizers.

    The same step/accumulate pair runs in awake episodes, dreams and
    planning rollouts; only the reward source differs.
    """

    def __init__(self, config, params, n_actions, gamma=0.99, lr=1e-3):
        self.config = config
        self.params = params
        self.n_actions = n_actions
        self.readout = PolicyReadout(np.zeros((n_actions, config.n_neurons)))
        self.opt_w = adam_init(params.w_rec.shape, lr)
        self.opt_r = adam_init(self.readout.r_pi.shape, lr)
        self.policy_state = PolicyState.zeros(n_actions, config.n_neurons,
                                              gamma)
        self.grads = PolicyGradients.zeros(n_actions, config.n_neurons)
        self.layer, self.elig = reset_episode_state(config)

    def begin_episode(self):
        self.layer, self.elig = reset_episode_state(self.config)
        self.policy_state.clear()

    def step(self, xi):
        """Advance one step driven by the world variables; returns the
        action distribution read off the updated activity."""
        current = self.params.project(xi=np.asarray(xi, dtype=np.float64))
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
        return policy_probs(layer.s_bar, self.readout)

    def accumulate(self, action, pi, reward):
        accumulate_policy_gradients(
            action, pi, self.elig.p, self.elig.e, self.layer.s_bar, reward,
            self.policy_state, self.readout, self.grads)

    def apply_updates(self):
        """One Adam step per tensor; buffers hold ascent directions."""
        self.opt_w, self.params.w_rec = adam_step(
            self.opt_w, self.params.w_rec, -self.grads.w)
        self.opt_r, self.readout.r_pi = adam_step(
            self.opt_r, self.readout.r_pi, -self.grads.r_pi)
        self.grads.clear()

    def discard_gradients(self):
        self.grads.clear()

    def snapshot(self):
        return (self.layer.copy(), self.elig.copy(), self.policy_state.copy())

    def restore(self, snap):
        self.layer = snap[0].copy()
        self.elig = snap[1].copy()
        self.policy_state = snap[2].copy()
