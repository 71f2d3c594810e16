"""Pure-numpy implementations of the per-step hot kernels.

Same signatures as the compiled module; everything mutates its first
argument(s) in place. Arrays are float64 and C-contiguous.
"""

import numpy as np

NAME = "numpy"


def lif_step(v, s, s_hat, s_bar, w_rec, current,
             alpha_s, alpha_m, alpha_star, v_rest, v_th, w_res):
    """One discrete-time step of a leaky integrate-and-fire layer.

    Update order: spike filter, membrane (leak toward recurrent + external
    drive + rest, minus the post-spike decrement), threshold, readout trace.
    """
    s_hat *= alpha_s
    s_hat += (1.0 - alpha_s) * s
    drive = w_rec @ s_hat
    drive += current
    drive += v_rest
    v *= alpha_m
    v += (1.0 - alpha_m) * drive
    v -= w_res * s
    s[:] = (v >= v_th).astype(np.float64)
    s_bar *= alpha_star
    s_bar += (1.0 - alpha_star) * s


def eligibility_step(e, s_hat, alpha_m):
    """Low-pass filter of the presynaptic filtered spikes, in place."""
    e *= alpha_m
    e += (1.0 - alpha_m) * s_hat


def add_outer(buf, a, b, scale=1.0):
    """buf += scale * outer(a, b)."""
    buf += scale * np.outer(a, b)


def policy_trace_step(z_w, z_r, g, p, e, s_bar, gamma):
    """Discounted accumulation of the action-gated pre/post products.

    z_w[k] <- gamma * z_w[k] + g[k] * outer(p, e)
    z_r[k] <- gamma * z_r[k] + g[k] * s_bar
    """
    pe = np.outer(p, e)
    z_w *= gamma
    z_w += g[:, None, None] * pe[None, :, :]
    z_r *= gamma
    z_r += g[:, None] * s_bar[None, :]


def policy_buffer_add(buf_w, buf_r, z_w, z_r, r_pi, reward):
    """Reward-gated readoff of the discounted traces into gradient buffers.

    buf_w[i, j] += reward * sum_k r_pi[k, i] * z_w[k, i, j]
    buf_r[k, i] += reward * z_r[k, i]
    """
    buf_w += reward * np.einsum("ki,kij->ij", r_pi, z_w)
    buf_r += reward * z_r
