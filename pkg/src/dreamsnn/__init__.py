"""Two-module recurrent spiking network that learns a policy and a world
model online, and uses the model for dreaming and planning on a built-in
deterministic Pong-like task."""

from . import kernels
from .agent import (AgentModule, PolicyGradients, PolicyReadout, PolicyState,
                    accumulate_policy_gradients, compute_return,
                    policy_probs, sample_action)
from .core import (ConfigError, EligibilityState, NetworkParams,
                   NeuronConfig, NeuronLayerState, init_network,
                   pseudo_derivative, reset_episode_state, step_layer,
                   update_eligibility)
from .minipong import (MiniPong, PongConfig, PongState, env_reset, env_step,
                       make_pixel_projection, pixel_project, render_frame)
from .optim import AdamState, adam_init, adam_step
from .trainer import (TrainerConfig, TrainRecord, run_awake_episode,
                      run_dream_episode, run_planning_rollout, train,
                      train_seed)
from .world_model import (ModelLossConfig, ModelModule, ModelReadouts,
                          WorldObservation, accumulate_model_gradients,
                          model_loss, model_predict)

__version__ = "0.1.0"
