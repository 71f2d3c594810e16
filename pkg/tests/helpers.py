"""Long-run experiment cache for the acceptance suite.

The learning-curve criteria need 2000-iteration multi-seed runs that take
minutes each; results are cached on disk keyed by a hash of the exact
trainer configuration, so repeated pytest invocations reuse them. Delete
tests/_cache to force regeneration.
"""

import dataclasses
import hashlib
import json
import os
from pathlib import Path

import numpy as np

from dreamsnn.minipong import MiniPong
from dreamsnn.trainer import TrainerConfig, train_seed

CACHE_DIR = Path(__file__).parent / "_cache"

EXPERIMENT_SEEDS = tuple(range(10))
N_NEURONS = 200
N_ITER = 2000
DREAM_START = 250  # dreams begin once the model carries information

RECORD_FIELDS = ("episode_reward", "dream_reward", "env_interactions",
                 "model_loss_xi", "model_loss_r")


def experiment_config(mode, **overrides):
    """The canonical configuration used by the acceptance experiments."""
    kw = dict(mode=mode, n_iter=N_ITER, n_neurons=N_NEURONS)
    if mode in ("dream", "plan", "sleep-only", "freeze-model"):
        kw["dream_start"] = DREAM_START
    if mode == "plan":
        kw["n_fut"] = 1
    kw.update(overrides)
    return TrainerConfig(**kw)


def _config_hash(config):
    blob = json.dumps(dataclasses.asdict(config), sort_keys=True,
                      default=str)
    return hashlib.sha1(blob.encode()).hexdigest()[:10]


def load_run(name, config, seed):
    """Arrays of one seed's training records, from cache or by running."""
    CACHE_DIR.mkdir(exist_ok=True)
    path = CACHE_DIR / f"{name}_s{seed}_{_config_hash(config)}.npz"
    if path.exists():
        with np.load(path) as data:
            return {k: data[k] for k in RECORD_FIELDS}
    records = train_seed(config, seed)
    arrays = {field: np.array([getattr(r, field) for r in records])
              for field in RECORD_FIELDS}
    tmp = path.with_suffix(".tmp.npz")
    np.savez_compressed(tmp, **arrays)
    os.replace(tmp, path)
    return arrays


def load_experiment(name, config, seeds=EXPERIMENT_SEEDS):
    return {seed: load_run(name, config, seed) for seed in seeds}


def random_policy_totals(pong_config, n_episodes=1000):
    """Monte-Carlo oracle: per-episode total rewards of a uniform-random
    policy on the given geometry."""
    totals = np.empty(n_episodes)
    for seed in range(n_episodes):
        env = MiniPong(pong_config, rng=np.random.default_rng(seed))
        env.reset()
        rng = np.random.default_rng(1_000_000 + seed)
        total = 0.0
        while not env.done:
            _, r = env.step(int(rng.integers(3)))
            total += r
        totals[seed] = total
    return totals


def trailing_mean(values, window=250):
    """Per-iteration trailing average (shorter prefix at the start)."""
    out = np.empty(len(values))
    csum = np.concatenate([[0.0], np.cumsum(values)])
    for i in range(len(values)):
        lo = max(0, i + 1 - window)
        out[i] = (csum[i + 1] - csum[lo]) / (i + 1 - lo)
    return out


def across_seed_mean_curve(runs, field="episode_reward", window=250):
    """Across-seed mean of per-seed trailing-smoothed curves."""
    curves = [trailing_mean(run[field], window) for run in runs.values()]
    return np.mean(curves, axis=0)


def first_budget_reaching(curve, env_interactions, level, start=0):
    """Smallest env-interaction budget at which the curve reaches level
    (NaN if never). `start` skips the initial iterations where the
    trailing window is not yet full and the curve is dominated by
    single-episode noise."""
    idx = np.nonzero(curve[start:] >= level)[0]
    if len(idx) == 0:
        return float("nan")
    return float(env_interactions[start + idx[0]])
