"""Shared fixtures: small network configurations and slow but obviously
correct reference implementations used as oracles by the unit tests."""

import numpy as np
import pytest

from dreamsnn.core import NeuronConfig, init_network


@pytest.fixture
def small_config():
    return NeuronConfig(n_neurons=8)


@pytest.fixture
def small_network(small_config):
    return init_network(small_config, rng_seed=7, input_dims={"xi": 3},
                        sigma_in=5.0)


def reference_lif_step(v, s, s_hat, s_bar, w_rec, current, cfg):
    """Scalar-loop LIF step; returns new (v, s, s_hat, s_bar)."""
    n = len(v)
    a_s, a_m, a_star = cfg.alpha_s, cfg.alpha_m, cfg.alpha_star
    s_hat_new = np.empty(n)
    for i in range(n):
        s_hat_new[i] = a_s * s_hat[i] + (1.0 - a_s) * s[i]
    v_new = np.empty(n)
    for i in range(n):
        drive = 0.0
        for j in range(n):
            drive += w_rec[i, j] * s_hat_new[j]
        v_new[i] = a_m * v[i] + (1.0 - a_m) * (drive + current[i]
                                               + cfg.v_rest)
        v_new[i] -= cfg.w_res_magnitude * s[i]
    s_new = np.array([1.0 if v_new[i] >= cfg.v_th else 0.0
                      for i in range(n)])
    s_bar_new = np.empty(n)
    for i in range(n):
        s_bar_new[i] = a_star * s_bar[i] + (1.0 - a_star) * s_new[i]
    return v_new, s_new, s_hat_new, s_bar_new


def random_layer_state(n, rng):
    """A plausible mid-episode state: arbitrary voltages, binary spikes,
    traces in [0, 1]."""
    from dreamsnn.core import NeuronLayerState
    return NeuronLayerState(
        v=rng.normal(-2.0, 2.0, n),
        s=(rng.random(n) < 0.3).astype(np.float64),
        s_hat=rng.random(n),
        s_bar=rng.random(n))
