"""Hand-rolled Adam, applied once per episode to each trainable tensor.

Gradient buffers accumulated by the learning rules point in the improvement
direction (loss decreases / expected return increases), so callers pass
grad = -buffer to descend. See the trainer for the per-episode cadence.
"""

from dataclasses import dataclass, field

import numpy as np


@dataclass
class AdamState:
    """First/second moment estimates plus hyperparameters for one tensor."""

    m: np.ndarray
    v: np.ndarray
    step_count: int = 0
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8


def adam_init(shape, lr=1e-3, beta1=0.9, beta2=0.999, epsilon=1e-8):
    return AdamState(m=np.zeros(shape), v=np.zeros(shape), lr=lr,
                     beta1=beta1, beta2=beta2, epsilon=epsilon)


def adam_step(state, params, grad):
    """One bias-corrected Adam update; pure (returns new state and params)."""
    params = np.asarray(params, dtype=np.float64)
    grad = np.asarray(grad, dtype=np.float64)
    if grad.shape != params.shape or state.m.shape != params.shape:
        raise ValueError(
            f"shape mismatch: params {params.shape}, grad {grad.shape}, "
            f"moments {state.m.shape}")
    t = state.step_count + 1
    m = state.beta1 * state.m + (1.0 - state.beta1) * grad
    v = state.beta2 * state.v + (1.0 - state.beta2) * grad ** 2
    m_hat = m / (1.0 - state.beta1 ** t)
    v_hat = v / (1.0 - state.beta2 ** t)
    new_params = params - state.lr * m_hat / (np.sqrt(v_hat) + state.epsilon)
    new_state = AdamState(m=m, v=v, step_count=t, lr=state.lr,
                          beta1=state.beta1, beta2=state.beta2,
                          epsilon=state.epsilon)
    return new_state, new_params
