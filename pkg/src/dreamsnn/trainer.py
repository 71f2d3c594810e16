"""Training orchestration: awake episodes against the real environment,
dream episodes inside the learned model, short planning rollouts branched
from the live state, and the mode ablations. Real environment interactions
are counted exclusively here."""

import os
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .agent import AgentModule, sample_action
from .core import ConfigError, NeuronConfig, init_network
from .minipong import (N_ACTIONS, CoordObserver, MiniPong, PixelObserver,
                       PongConfig, make_pixel_projection)
from .world_model import ModelLossConfig, ModelModule, WorldObservation

MODES = ("baseline", "dream", "plan", "sleep-only", "freeze-model")

# Experiment defaults for the neuron constants. A short membrane constant
# and a mild post-spike decrement keep the filtered activity dense enough
# for the per-episode Adam steps to move the policy within a few thousand
# episodes; the short readout filter keeps the filtered activity current,
# which sharpens both state prediction and action selection. All remain
# fully configurable per run.
DEFAULT_NEURON = NeuronConfig(tau_m=2.0, tau_star=3.0, w_res_magnitude=1.0)


@dataclass
class TrainerConfig:
    mode: str = "baseline"
    n_iter: int = 2000
    awake_T: int = 100
    dream_T: int = 50
    n_fut: int = 1
    dt_pred: int | None = None     # plan mode: must equal 2 * n_fut
    freeze_at: int = 0             # freeze-model mode: stop model updates here
    dream_start: int = 0           # first iteration using the model
                                   # (dreams, planning rollouts)
    dream_warmup: int = 0          # state warm-up steps before a dream
    dream_box: tuple | None = None  # per-coord [lo, hi] dream start bounds
    gamma: float = 0.99
    lr: float = 1e-3
    n_neurons: int = 500
    sigma_in: float = 5.0
    sigma_rec: float = 1.0
    obs: str = "coords"            # coords | pixels
    clip_dream_reward: bool = False
    dream_reward_threshold: float = 0.0  # zero out |predicted r| below this
    c_xi: float = 1.0
    c_r: float = 0.1
    seeds: tuple = (0,)
    neuron: NeuronConfig | None = None
    pong: PongConfig | None = None
    dump_frames_dir: str | None = None  # PGM dump of the final awake episode

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode {self.mode!r}; one of {MODES}")
        if self.obs not in ("coords", "pixels"):
            raise ConfigError(f"unknown observation mode {self.obs!r}")
        if self.n_iter < 0 or self.awake_T <= 0 or self.dream_T <= 0:
            raise ConfigError("n_iter, awake_T and dream_T must be positive")
        if self.n_fut < 0:
            raise ConfigError("n_fut must be nonnegative")
        if self.dream_start < 0:
            raise ConfigError("dream_start must be nonnegative")
        if self.dream_warmup < 0:
            raise ConfigError("dream_warmup must be nonnegative")
        if self.dt_pred is None:
            self.dt_pred = 2 * self.n_fut
        if self.mode == "plan" and self.n_fut > 0:
            # Matched data budget with dreaming requires this schedule.
            if self.dt_pred != 2 * self.n_fut:
                raise ConfigError("plan mode requires dt_pred == 2 * n_fut")
        if not self.seeds:
            raise ConfigError("seed list must be non-empty")
        if isinstance(self.seeds, list):
            self.seeds = tuple(self.seeds)
        if isinstance(self.neuron, dict):
            self.neuron = NeuronConfig(**self.neuron)
        if isinstance(self.pong, dict):
            self.pong = PongConfig(**self.pong)

    def neuron_config(self):
        base = self.neuron if self.neuron is not None else DEFAULT_NEURON
        return replace(base, n_neurons=self.n_neurons)

    def pong_config(self):
        return self.pong if self.pong is not None else PongConfig(
            horizon=self.awake_T)


@dataclass
class TrainRecord:
    iteration: int
    env_interactions: int
    episode_reward: float
    dream_reward: float
    model_loss_xi: float
    model_loss_r: float
    wall_ms: float


@dataclass
class SeedRun:
    """Everything one seed needs: networks, environment, rng streams."""

    config: TrainerConfig
    seed: int
    agent: AgentModule = field(init=False)
    model: ModelModule = field(init=False)
    env: MiniPong = field(init=False)
    observer: object = field(init=False)
    rng: np.random.Generator = field(init=False)
    env_interactions: int = 0

    def __post_init__(self):
        cfg = self.config
        neuron = cfg.neuron_config()
        pong = cfg.pong_config()
        ss = np.random.SeedSequence(self.seed)
        agent_seed, model_seed, run_seed, proj_seed = ss.spawn(4)
        self.rng = np.random.default_rng(run_seed)
        self.env = MiniPong(pong, rng=self.rng)
        if cfg.obs == "pixels":
            projection = make_pixel_projection(
                np.random.default_rng(proj_seed))
            self.observer = PixelObserver(pong, projection)
        else:
            self.observer = CoordObserver(box=cfg.dream_box)
        obs_dim = self.observer.dim
        agent_params = init_network(
            neuron, agent_seed, {"xi": obs_dim}, cfg.sigma_in, cfg.sigma_rec)
        model_params = init_network(
            neuron, model_seed, {"action": N_ACTIONS, "xi": obs_dim},
            cfg.sigma_in, cfg.sigma_rec)
        self.agent = AgentModule(neuron, agent_params, N_ACTIONS,
                                 gamma=cfg.gamma, lr=cfg.lr)
        self.model = ModelModule(neuron, model_params, N_ACTIONS, obs_dim,
                                 ModelLossConfig(cfg.c_xi, cfg.c_r),
                                 lr=cfg.lr)


def run_awake_episode(run, learn_policy=True, learn_model=True, plan=False,
                      frame_dir=None):
    """One full episode against the real environment.

    Both networks run and accumulate their rules each step; one Adam step
    per trainable tensor is applied at the end (gated by the learn_* flags).
    With plan=True, short model rollouts branch from the live state every
    dt_pred steps and add policy-gradient contributions to the same buffers.
    """
    cfg = run.config
    run.agent.begin_episode()
    run.model.begin_episode()
    obs = run.env.reset()
    xi = run.observer.observe(run.env.state, obs)
    total_reward = 0.0
    for t in range(cfg.awake_T):
        pi = run.agent.step(xi)
        action = sample_action(pi, run.rng)
        pred = run.model.step(action, xi)
        obs, reward = run.env.step(action)
        run.env_interactions += 1
        xi_next = run.observer.observe(run.env.state, obs)
        run.model.accumulate(pred, WorldObservation(xi=xi_next,
                                                    reward=reward))
        if learn_policy:
            run.agent.accumulate(action, pi, reward)
        total_reward += reward
        if plan and cfg.n_fut > 0 and t % cfg.dt_pred == 0:
            run_planning_rollout(run, xi_next, cfg.n_fut)
        if frame_dir is not None:
            from .minipong import render_frame, write_pgm
            frame = render_frame(run.env.state, run.env.config)
            write_pgm(frame, os.path.join(
                frame_dir, f"seed{run.seed}_step{t:03d}.pgm"))
        xi = xi_next
    if learn_policy:
        run.agent.apply_updates()
    else:
        run.agent.discard_gradients()
    if learn_model:
        run.model.apply_updates()
    else:
        run.model.discard_gradients()
    return total_reward, run.model.loss_xi, run.model.loss_r


def _simulated_reward(pred, cfg):
    r = pred.reward
    if abs(r) < cfg.dream_reward_threshold:
        # Optional sparsification: the readout emits small nonzero values
        # every step, which act as dense baseline-free reward noise on the
        # policy buffers; keeping only confident values restores the
        # sparse-reward structure of the real task.
        r = 0.0
    if cfg.clip_dream_reward:
        r = min(max(r, -1.0), 1.0)
    return r


def run_dream_episode(run):
    """One closed-loop episode inside the model, from a random start.

    Only the agent learns; the model provides the dynamics and the rewards
    and none of its tensors change. No real environment interaction.
    """
    cfg = run.config
    run.agent.begin_episode()
    run.model.begin_episode()
    xi = run.observer.sample_xi(run.rng)
    # Warm the freshly-reset network states on the initial xi before
    # closing the loop: the first closed-loop predictions from an all-zero
    # activity state are wild and would poison the whole dream. No
    # gradients accumulate during warm-up.
    for _ in range(cfg.dream_warmup):
        pi = run.agent.step(xi)
        run.model.step(sample_action(pi, run.rng), xi)
    dream_reward = 0.0
    for _ in range(cfg.dream_T):
        pi = run.agent.step(xi)
        action = sample_action(pi, run.rng)
        pred = run.model.step(action, xi)
        reward = _simulated_reward(pred, cfg)
        run.agent.accumulate(action, pi, reward)
        dream_reward += reward
        xi = pred.xi
    run.agent.apply_updates()
    return dream_reward


def run_planning_rollout(run, xi0, n_fut):
    """n_fut closed-loop simulated steps branched from the live state.

    Network states (including the discounted policy traces) are cloned and
    restored bit-exactly; only the policy-gradient buffers keep the
    contributions, merged into the episode's Adam step.
    """
    cfg = run.config
    agent_snap = run.agent.snapshot()
    model_snap = run.model.snapshot()
    xi = xi0
    for _ in range(n_fut):
        pi = run.agent.step(xi)
        action = sample_action(pi, run.rng)
        pred = run.model.step(action, xi)
        run.agent.accumulate(action, pi, _simulated_reward(pred, cfg))
        xi = pred.xi
    run.agent.restore(agent_snap)
    run.model.restore(model_snap)


def train_seed(config, seed):
    """Run all iterations for one seed; returns the list of TrainRecords."""
    run = SeedRun(config, seed)
    records = []
    for it in range(config.n_iter):
        t0 = time.perf_counter()
        learn_policy = config.mode != "sleep-only"
        learn_model = not (config.mode == "freeze-model"
                           and it >= config.freeze_at)
        plan = config.mode == "plan" and it >= config.dream_start
        frame_dir = None
        if config.dump_frames_dir and it == config.n_iter - 1:
            frame_dir = config.dump_frames_dir
            os.makedirs(frame_dir, exist_ok=True)
        reward, loss_xi, loss_r = run_awake_episode(
            run, learn_policy=learn_policy, learn_model=learn_model,
            plan=plan, frame_dir=frame_dir)
        dream_reward = 0.0
        if config.mode in ("dream", "sleep-only", "freeze-model") \
                and it >= config.dream_start:
            dream_reward = run_dream_episode(run)
        wall_ms = (time.perf_counter() - t0) * 1e3
        records.append(TrainRecord(
            iteration=it, env_interactions=run.env_interactions,
            episode_reward=reward, dream_reward=dream_reward,
            model_loss_xi=loss_xi, model_loss_r=loss_r, wall_ms=wall_ms))
    return records


def train(config):
    """Run every seed in the config; returns {seed: [TrainRecord, ...]}."""
    return {seed: train_seed(config, seed) for seed in config.seeds}
