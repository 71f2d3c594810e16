"""Deterministic desk-scale Pong: two paddles on a unit square, an elastic
ball, a speed-capped tracking opponent, and score-based rewards. Also
provides the binary frame renderer and the random pixel projection used by
the pixel observation mode."""

import math
from dataclasses import dataclass, field

import numpy as np

from .core import ConfigError
from .world_model import WorldObservation

N_ACTIONS = 3  # up, stay, down
OBS_DIM = 4    # ball x, ball y, agent paddle y, opponent paddle y


class EpisodeFinished(RuntimeError):
    """Raised when stepping an episode past its horizon."""


@dataclass
class PongConfig:
    horizon: int = 100
    agent_x: float = 0.05
    opponent_x: float = 0.95
    paddle_half_height: float = 0.15
    ball_speed: float = 0.025
    agent_speed: float = 0.08
    opponent_speed: float = 0.012  # tracking cap; must be beatable
    # Serve angles are steep enough that one field crossing takes > T/4
    # steps, which caps scores at agent<=1 / opponent<=2 per episode.
    serve_angle_min: float = math.radians(40.0)  # from horizontal
    serve_angle_max: float = math.radians(75.0)

    def __post_init__(self):
        if not (0.0 < self.agent_x < self.opponent_x < 1.0):
            raise ConfigError("paddle planes must satisfy 0 < agent < "
                              "opponent < 1")
        if self.opponent_speed >= self.ball_speed:
            raise ConfigError("opponent speed cap must stay below the ball "
                              "speed so the opponent can be beaten")
        if not (0.0 < self.paddle_half_height < 0.5):
            raise ConfigError("paddle half-height out of range")
        if self.horizon <= 0:
            raise ConfigError("horizon must be positive")


@dataclass
class PongState:
    ball_x: float
    ball_y: float
    vx: float
    vy: float
    agent_y: float
    opponent_y: float
    step_count: int = 0
    agent_score: int = 0
    opponent_score: int = 0


def _serve(config, rng, direction):
    """Velocity of a fresh serve toward `direction` (+1 right, -1 left);
    the launch angle avoids near-vertical and near-horizontal extremes."""
    angle = rng.uniform(config.serve_angle_min, config.serve_angle_max)
    sign = 1.0 if rng.random() < 0.5 else -1.0
    vx = direction * config.ball_speed * math.cos(angle)
    vy = sign * config.ball_speed * math.sin(angle)
    return vx, vy


def _observe(state):
    return WorldObservation(
        xi=np.array([state.ball_x, state.ball_y,
                     state.agent_y, state.opponent_y]),
        reward=0.0)


def env_reset(config, rng):
    """Centered start; the first serve goes toward the agent."""
    vx, vy = _serve(config, rng, direction=-1.0)
    state = PongState(ball_x=0.5, ball_y=0.5, vx=vx, vy=vy,
                      agent_y=0.5, opponent_y=0.5)
    return state, _observe(state)


def env_step(state, action, config, rng):
    """Advance one step; returns (new state, observation, reward).

    The agent paddle moves per the action, the opponent tracks the ball at
    its capped speed, the ball reflects elastically off walls and paddles.
    A ball leaving the field scores (+1 for the agent on the right, -1 on
    the left), re-centers, and is served toward the scorer.
    """
    if state.step_count >= config.horizon:
        raise EpisodeFinished(
            f"episode is over after {config.horizon} steps")
    if action not in (0, 1, 2):
        raise ValueError(f"action must be 0, 1 or 2, got {action!r}")

    agent_y = state.agent_y + (1 - action) * config.agent_speed
    agent_y = min(max(agent_y, 0.0), 1.0)
    delta = state.ball_y - state.opponent_y
    opponent_y = state.opponent_y + min(max(delta, -config.opponent_speed),
                                        config.opponent_speed)
    opponent_y = min(max(opponent_y, 0.0), 1.0)

    x = state.ball_x + state.vx
    y = state.ball_y + state.vy
    vx, vy = state.vx, state.vy
    if y > 1.0:
        y = 2.0 - y
        vy = -vy
    elif y < 0.0:
        y = -y
        vy = -vy

    # Paddle planes: reflect on hit, otherwise let the ball run out.
    if vx < 0.0 and state.ball_x >= config.agent_x > x:
        if abs(y - agent_y) <= config.paddle_half_height:
            x = 2.0 * config.agent_x - x
            vx = -vx
    elif vx > 0.0 and state.ball_x <= config.opponent_x < x:
        if abs(y - opponent_y) <= config.paddle_half_height:
            x = 2.0 * config.opponent_x - x
            vx = -vx

    reward = 0.0
    agent_score = state.agent_score
    opponent_score = state.opponent_score
    if x < 0.0:
        reward = -1.0
        opponent_score += 1
        x, y = 0.5, 0.5
        vx, vy = _serve(config, rng, direction=1.0)
    elif x > 1.0:
        reward = 1.0
        agent_score += 1
        x, y = 0.5, 0.5
        vx, vy = _serve(config, rng, direction=-1.0)

    new_state = PongState(ball_x=x, ball_y=y, vx=vx, vy=vy,
                          agent_y=agent_y, opponent_y=opponent_y,
                          step_count=state.step_count + 1,
                          agent_score=agent_score,
                          opponent_score=opponent_score)
    return new_state, _observe(new_state), reward


class MiniPong:
    """Stateful convenience wrapper around env_reset/env_step."""

    def __init__(self, config=None, rng=None):
        self.config = config or PongConfig()
        self.rng = rng if rng is not None else np.random.default_rng()
        self.state = None

    def reset(self):
        self.state, obs = env_reset(self.config, self.rng)
        return obs

    def step(self, action):
        self.state, obs, reward = env_step(self.state, action, self.config,
                                           self.rng)
        return obs, reward

    @property
    def done(self):
        return self.state is None or \
            self.state.step_count >= self.config.horizon


# --- pixel observation mode ------------------------------------------------

FRAME_WIDTH = 80
FRAME_HEIGHT = 105
BALL_STAMP = 5    # square ball blob, pixels per side
PADDLE_WIDTH = 2  # pixels


def render_frame(state, config, width=FRAME_WIDTH, height=FRAME_HEIGHT):
    """Rasterize paddles and ball onto a binary (height, width) frame."""
    frame = np.zeros((height, width), dtype=np.uint8)

    def stamp_rect(cx_lo, cx_hi, cy_lo, cy_hi):
        frame[max(cy_lo, 0):min(cy_hi, height),
              max(cx_lo, 0):min(cx_hi, width)] = 1

    bx = round(state.ball_x * (width - 1))
    by = round(state.ball_y * (height - 1))
    half = BALL_STAMP // 2
    stamp_rect(bx - half, bx + half + 1, by - half, by + half + 1)

    half_h = round(config.paddle_half_height * (height - 1))
    for plane_x, paddle_y in ((config.agent_x, state.agent_y),
                              (config.opponent_x, state.opponent_y)):
        px = round(plane_x * (width - 1))
        py = round(paddle_y * (height - 1))
        stamp_rect(px, px + PADDLE_WIDTH, py - half_h, py + half_h + 1)
    return frame


def write_pgm(frame, path):
    """Dump a binary frame as a P5 grayscale PGM (0 -> black, 1 -> white)."""
    data = np.asarray(frame, dtype=np.uint8) * 255
    with open(path, "wb") as f:
        f.write(b"P5\n%d %d\n255\n" % (data.shape[1], data.shape[0]))
        f.write(data.tobytes())


def make_pixel_projection(rng, obs_dim=OBS_DIM,
                          n_pixels=FRAME_WIDTH * FRAME_HEIGHT, sigma=0.1):
    """Fixed Gaussian projection from flattened frames to obs_dim values."""
    return rng.normal(0.0, sigma, size=(obs_dim, n_pixels))


def pixel_project(frame, projection):
    """Project a binary frame through the fixed random matrix."""
    flat = np.asarray(frame, dtype=np.float64).ravel()
    if projection.shape[1] != flat.size:
        raise ValueError(
            f"projection expects {projection.shape[1]} pixels, frame has "
            f"{flat.size}")
    return projection @ flat


# --- observers: map environment state to the world-variable vector ---------

class CoordObserver:
    """World variables = the raw coordinates, already in [0,1]^4.

    `box` optionally restricts where dreams start: a (dim, 2) array of
    per-coordinate [lo, hi] sampling bounds, default the full unit box.
    """

    dim = OBS_DIM

    def __init__(self, box=None):
        self.box = np.array(box if box is not None
                            else [(0.0, 1.0)] * self.dim, dtype=np.float64)
        if self.box.shape != (self.dim, 2):
            raise ConfigError(
                f"dream start box must be {self.dim} [lo, hi] pairs")
        if np.any(self.box[:, 0] > self.box[:, 1]):
            raise ConfigError("dream start box has lo > hi")

    def observe(self, state, obs):
        return obs.xi

    def sample_xi(self, rng):
        # Dream starts: uniform over the configured coordinate box.
        return rng.uniform(self.box[:, 0], self.box[:, 1])


@dataclass
class PixelObserver:
    """World variables = random projection of the rendered binary frame."""

    config: PongConfig
    projection: np.ndarray
    width: int = FRAME_WIDTH
    height: int = FRAME_HEIGHT
    dim: int = field(init=False)

    def __post_init__(self):
        self.dim = self.projection.shape[0]

    def observe(self, state, obs):
        frame = render_frame(state, self.config, self.width, self.height)
        return pixel_project(frame, self.projection)

    def sample_xi(self, rng):
        # Dream starts: project a frame rendered from a random valid state.
        state = PongState(ball_x=rng.uniform(), ball_y=rng.uniform(),
                          vx=0.0, vy=0.0, agent_y=rng.uniform(),
                          opponent_y=rng.uniform())
        frame = render_frame(state, self.config, self.width, self.height)
        return pixel_project(frame, self.projection)
