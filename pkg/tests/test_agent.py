"""Policy side: softmax readout, action sampling statistics, discounted
returns, and the equivalence of the online reward-gated rule with the
offline return-weighted gradient."""

import numpy as np
import pytest

from dreamsnn.agent import (AgentModule, PolicyGradients, PolicyReadout,
                            PolicyState, accumulate_policy_gradients,
                            compute_return, policy_probs, sample_action)
from dreamsnn.core import NeuronConfig, init_network

K, N, T = 2, 3, 12
GAMMA = 0.9


class TestPolicyProbs:
    def test_normalized_and_ordered(self):
        readout = PolicyReadout(np.array([[2.0, 0.0], [0.0, 1.0],
                                          [-1.0, -1.0]]))
        pi = policy_probs(np.array([1.0, 0.5]), readout)
        assert pi.sum() == pytest.approx(1.0, abs=1e-12)
        assert pi[0] > pi[1] > pi[2]

    def test_stable_for_huge_logits(self):
        readout = PolicyReadout(np.array([[1e4], [-1e4]]))
        pi = policy_probs(np.array([1.0]), readout)
        assert np.all(np.isfinite(pi))
        assert pi[0] == pytest.approx(1.0)

    def test_zero_readout_is_uniform(self):
        readout = PolicyReadout(np.zeros((3, 5)))
        pi = policy_probs(np.random.default_rng(0).random(5), readout)
        assert np.allclose(pi, 1.0 / 3.0, atol=1e-12)


class TestSampleAction:
    def test_uniform_frequencies(self):
        # 1e5 draws from uniform over 3: each within 3 sigma of 1/3.
        rng = np.random.default_rng(123)
        pi = np.full(3, 1.0 / 3.0)
        n = 100_000
        counts = np.bincount([sample_action(pi, rng) for _ in range(n)],
                             minlength=3)
        sigma = np.sqrt((1 / 3) * (2 / 3) / n)
        assert np.all(np.abs(counts / n - 1 / 3) < 3 * sigma)

    def test_degenerate_distribution(self):
        rng = np.random.default_rng(0)
        pi = np.array([0.0, 1.0, 0.0])
        assert all(sample_action(pi, rng) == 1 for _ in range(20))

    def test_rejects_unnormalized(self):
        rng = np.random.default_rng(0)
        with pytest.raises(ValueError):
            sample_action(np.array([0.5, 0.2]), rng)
        with pytest.raises(ValueError):
            sample_action(np.array([1.5, -0.5]), rng)


class TestComputeReturn:
    def test_literal_double_sum(self):
        rewards = [1.0, 0.0, -2.0, 0.5]
        out = compute_return(rewards, 0.5)
        for t in range(4):
            expect = sum(0.5 ** (k - t) * rewards[k] for k in range(t, 4))
            assert out[t] == pytest.approx(expect, abs=1e-12)

    def test_gamma_one_is_suffix_sum(self):
        rewards = np.array([1.0, 2.0, 3.0])
        assert np.allclose(compute_return(rewards, 1.0),
                           [6.0, 5.0, 3.0])


def random_episode(seed):
    """Fixed random spike-history stub: per-step action distribution,
    sampled action, traces, and a sparse reward sequence."""
    rng = np.random.default_rng(seed)
    logits = rng.normal(size=(T, K))
    pis = np.exp(logits) / np.exp(logits).sum(axis=1, keepdims=True)
    actions = [int(rng.integers(K)) for _ in range(T)]
    ps = rng.random((T, N))
    es = rng.random((T, N))
    s_bars = rng.random((T, N))
    rewards = np.zeros(T)
    rewards[rng.choice(T, size=3, replace=False)] = rng.normal(size=3)
    readout = PolicyReadout(rng.normal(size=(K, N)))
    return pis, actions, ps, es, s_bars, rewards, readout


def run_online(pis, actions, ps, es, s_bars, rewards, readout):
    state = PolicyState.zeros(K, N, gamma=GAMMA)
    grads = PolicyGradients.zeros(K, N)
    for t in range(T):
        accumulate_policy_gradients(actions[t], pis[t], ps[t], es[t],
                                    s_bars[t], rewards[t], state, readout,
                                    grads)
    return grads


class TestOnlineOfflineEquivalence:
    """The reward-gated trace readoff summed over an episode equals the
    offline return-weighted gradient, to 1e-10."""

    @pytest.mark.parametrize("seed", [0, 1, 2, 3, 4])
    def test_readout_buffer_equals_reinforce(self, seed):
        pis, actions, ps, es, s_bars, rewards, readout = \
            random_episode(seed)
        grads = run_online(pis, actions, ps, es, s_bars, rewards, readout)
        returns = compute_return(rewards, GAMMA)
        offline = np.zeros((K, N))
        for t in range(T):
            g = -pis[t].copy()
            g[actions[t]] += 1.0
            offline += returns[t] * np.outer(g, s_bars[t])
        assert np.abs(grads.r_pi - offline).max() < 1e-10

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_recurrent_buffer_equals_double_sum(self, seed):
        # Brute-force: sum_t r_t sum_k R[k,i] sum_{t'<=t} gamma^(t-t')
        #              g_k(t') p_i(t') e_j(t')
        pis, actions, ps, es, s_bars, rewards, readout = \
            random_episode(seed)
        grads = run_online(pis, actions, ps, es, s_bars, rewards, readout)
        brute = np.zeros((N, N))
        for t in range(T):
            if rewards[t] == 0.0:
                continue
            for i in range(N):
                for j in range(N):
                    acc = 0.0
                    for tp in range(t + 1):
                        for k in range(K):
                            g = (1.0 if actions[tp] == k else 0.0) \
                                - pis[tp][k]
                            acc += readout.r_pi[k, i] \
                                * GAMMA ** (t - tp) * g * ps[tp][i] \
                                * es[tp][j]
                    brute[i, j] += rewards[t] * acc
        assert np.abs(grads.w - brute).max() < 1e-10

    def test_zero_reward_episode_accumulates_nothing(self):
        pis, actions, ps, es, s_bars, _, readout = random_episode(7)
        grads = run_online(pis, actions, ps, es, s_bars, np.zeros(T),
                           readout)
        assert np.all(grads.w == 0.0)
        assert np.all(grads.r_pi == 0.0)


class TestAgentModule:
    def make_agent(self, seed=0):
        # Short time constants keep this tiny network active.
        cfg = NeuronConfig(n_neurons=8, tau_m=2.0, tau_star=5.0,
                           w_res_magnitude=1.0)
        params = init_network(cfg, seed, {"xi": 3}, 5.0)
        return AgentModule(cfg, params, n_actions=3)

    def test_step_returns_distribution(self):
        agent = self.make_agent()
        agent.begin_episode()
        rng = np.random.default_rng(1)
        for _ in range(10):
            pi = agent.step(rng.random(3))
            assert pi.shape == (3,)
            assert pi.sum() == pytest.approx(1.0, abs=1e-12)
            assert np.all(pi >= 0.0)

    def test_snapshot_restore_bit_exact(self):
        agent = self.make_agent()
        agent.begin_episode()
        rng = np.random.default_rng(2)
        for _ in range(5):
            pi = agent.step(rng.random(3))
            agent.accumulate(sample_action(pi, rng), pi, 1.0)
        snap = agent.snapshot()
        ref = (agent.layer.v.copy(), agent.elig.e.copy(),
               agent.policy_state.z_w.copy(),
               agent.policy_state.z_r.copy())
        for _ in range(4):
            pi = agent.step(rng.random(3))
            agent.accumulate(sample_action(pi, rng), pi, -1.0)
        agent.restore(snap)
        assert np.array_equal(agent.layer.v, ref[0])
        assert np.array_equal(agent.elig.e, ref[1])
        assert np.array_equal(agent.policy_state.z_w, ref[2])
        assert np.array_equal(agent.policy_state.z_r, ref[3])

    def test_updates_only_on_apply(self):
        agent = self.make_agent()
        rng = np.random.default_rng(3)

        def episode():
            # Long enough for the membrane to charge and spikes to appear.
            agent.begin_episode()
            for _ in range(15):
                pi = agent.step(rng.random(3))
                agent.accumulate(sample_action(pi, rng), pi, 1.0)

        r0 = agent.readout.r_pi.copy()
        episode()
        assert np.array_equal(agent.readout.r_pi, r0)  # not yet applied
        agent.apply_updates()
        assert not np.array_equal(agent.readout.r_pi, r0)
        # The recurrent gradient is read through the policy readout, which
        # was zero during the first episode; it moves from the second on.
        w0 = agent.params.w_rec.copy()
        episode()
        agent.apply_updates()
        assert not np.array_equal(agent.params.w_rec, w0)

    def test_begin_episode_clears_traces(self):
        agent = self.make_agent()
        agent.begin_episode()
        rng = np.random.default_rng(4)
        for _ in range(5):
            pi = agent.step(rng.random(3))
            agent.accumulate(sample_action(pi, rng), pi, 0.5)
        agent.begin_episode()
        assert np.all(agent.policy_state.z_w == 0.0)
        assert np.all(agent.policy_state.z_r == 0.0)
        assert np.all(agent.layer.s_bar == 0.0)
