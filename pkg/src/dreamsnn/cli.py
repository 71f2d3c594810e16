"""Command-line entry point: configure a multi-seed experiment, run it,
and write per-seed metric CSVs plus an across-seed summary."""

import argparse
import csv
import json
import math
import os
import sys
from dataclasses import dataclass, fields

from .core import ConfigError
from .trainer import MODES, TrainerConfig, train_seed

METRIC_COLUMNS = ("iteration", "env_interactions", "episode_reward",
                  "dream_reward", "model_loss_xi", "model_loss_r", "wall_ms")
SUMMARY_COLUMNS = ("iteration", "env_interactions", "reward_mean",
                   "reward_se", "reward_p80", "model_loss_xi_mean",
                   "model_loss_r_mean")


@dataclass
class RunConfig:
    trainer: TrainerConfig
    out_dir: str
    dump_frames: bool = False


def _parse_seeds(text):
    """'3' -> seeds 0..2; '5,7,9' -> exactly those."""
    parts = [p for p in text.split(",") if p.strip()]
    if not parts:
        raise ValueError("empty seed list")
    values = [int(p) for p in parts]
    if len(values) == 1 and "," not in text:
        if values[0] <= 0:
            raise ValueError("seed count must be positive")
        return tuple(range(values[0]))
    return tuple(values)


def _load_config_file(path):
    """JSON object, or flat key=value lines (values parsed as JSON when
    possible, else kept as strings)."""
    with open(path) as f:
        text = f.read()
    stripped = text.strip()
    if stripped.startswith("{"):
        return json.loads(stripped)
    values = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"bad config line (want key=value): {line!r}")
        key, _, raw = line.partition("=")
        raw = raw.strip()
        try:
            values[key.strip()] = json.loads(raw)
        except json.JSONDecodeError:
            values[key.strip()] = raw
    return values


def build_parser():
    parser = argparse.ArgumentParser(
        prog="dreamsnn",
        description="Train the spiking agent/world-model pair on MiniPong.")
    parser.add_argument("--mode", required=True, choices=MODES)
    parser.add_argument("--iters", type=int, help="training iterations")
    parser.add_argument("--seeds", type=_parse_seeds, default=None,
                        help="seed count, or comma-separated seed list")
    parser.add_argument("--out", default="runs", help="output directory")
    parser.add_argument("--config", help="JSON or key=value config file; "
                        "flags override file values")
    parser.add_argument("--n-fut", type=int, dest="n_fut")
    parser.add_argument("--freeze-at", type=int, dest="freeze_at")
    parser.add_argument("--dream-start", type=int, dest="dream_start",
                        help="first iteration that runs a dream")
    parser.add_argument("--obs", choices=("coords", "pixels"))
    parser.add_argument("--neurons", type=int, dest="n_neurons",
                        help="neurons per module")
    parser.add_argument("--dump-frames", action="store_true",
                        help="write PGM frames of the final awake episode")
    return parser


def parse_args(argv):
    """Build the RunConfig from argv (no program name). Exits with a usage
    error on unknown flags or invalid values."""
    args = build_parser().parse_args(argv)
    values = {}
    if args.config:
        values.update(_load_config_file(args.config))
    if "seeds" in values and isinstance(values["seeds"], str):
        values["seeds"] = _parse_seeds(values["seeds"])
    if "seeds" in values and isinstance(values["seeds"], list):
        values["seeds"] = tuple(values["seeds"])
    out_dir = values.pop("out", "runs")
    flag_values = {
        "mode": args.mode,
        "n_iter": args.iters,
        "seeds": args.seeds,
        "n_fut": args.n_fut,
        "freeze_at": args.freeze_at,
        "dream_start": args.dream_start,
        "obs": args.obs,
        "n_neurons": args.n_neurons,
    }
    values.update({k: v for k, v in flag_values.items() if v is not None})
    if args.out != "runs" or "out" not in values:
        out_dir = args.out
    known = {f.name for f in fields(TrainerConfig)}
    unknown = set(values) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    trainer = TrainerConfig(**values)
    if args.dump_frames:
        trainer.dump_frames_dir = os.path.join(out_dir, "frames")
    return RunConfig(trainer=trainer, out_dir=out_dir,
                     dump_frames=args.dump_frames)


def _fmt(value):
    # repr keeps full float precision and makes reruns byte-comparable.
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_metrics(path, records):
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(METRIC_COLUMNS)
        for rec in records:
            writer.writerow([_fmt(getattr(rec, col))
                             for col in METRIC_COLUMNS])


def _percentile_nearest_rank(values, q):
    ordered = sorted(values)
    rank = max(1, math.ceil(q / 100.0 * len(ordered)))
    return ordered[rank - 1]


def write_summary(path, per_seed_records):
    """Across-seed mean, standard error, and nearest-rank 80th percentile
    of the episode reward, per iteration."""
    runs = list(per_seed_records.values())
    n_iter = min(len(r) for r in runs)
    n = len(runs)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(SUMMARY_COLUMNS)
        for it in range(n_iter):
            rewards = [r[it].episode_reward for r in runs]
            loss_xi = [r[it].model_loss_xi for r in runs]
            loss_r = [r[it].model_loss_r for r in runs]
            mean = sum(rewards) / n
            if n > 1:
                var = sum((x - mean) ** 2 for x in rewards) / (n - 1)
                se = math.sqrt(var / n)
            else:
                se = 0.0
            writer.writerow([
                it, runs[0][it].env_interactions, _fmt(mean), _fmt(se),
                _fmt(_percentile_nearest_rank(rewards, 80)),
                _fmt(sum(loss_xi) / n), _fmt(sum(loss_r) / n)])


def run_experiment(config):
    """Run every seed, write metrics_seed<k>.csv and summary.csv; returns
    the process exit code."""
    try:
        os.makedirs(config.out_dir, exist_ok=True)
        per_seed = {}
        for seed in config.trainer.seeds:
            records = train_seed(config.trainer, seed)
            per_seed[seed] = records
            write_metrics(os.path.join(config.out_dir,
                                       f"metrics_seed{seed}.csv"), records)
        write_summary(os.path.join(config.out_dir, "summary.csv"), per_seed)
    except OSError as exc:
        print(f"dreamsnn: I/O error: {exc}", file=sys.stderr)
        return 1
    return 0


def main(argv=None):
    if argv is None:
        argv = sys.argv[1:]
    try:
        config = parse_args(argv)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"dreamsnn: {exc}", file=sys.stderr)
        return 2
    return run_experiment(config)


if __name__ == "__main__":
    sys.exit(main())
