"""swarmgrid: many-agent gridworld RL platform.

Deterministic grid engine, reward description language, parameter-sharing
DQN baselines, and replay recording / websocket serving.
"""

from .core import (
    EMPTY,
    WALL,
    Agent,
    AgentTypeSpec,
    Direction,
    Position,
    World,
    border_walls,
    create_world,
)
from .engine import Action, EventLog, action_space, rotate_offset, step
from .env import Environment, StepResult, load_scenario
from .observe import (
    Observation,
    ObservationBatch,
    global_minimap,
    id_embedding,
    observe_agent,
    observe_group,
)
from .scenarios import builtin_scenario

__version__ = "0.1.0"

__all__ = [
    "EMPTY", "WALL", "Agent", "AgentTypeSpec", "Direction", "Position",
    "World", "border_walls", "create_world", "Action", "EventLog",
    "action_space", "rotate_offset", "step", "Environment", "StepResult",
    "load_scenario", "Observation", "ObservationBatch", "global_minimap",
    "id_embedding", "observe_agent", "observe_group", "builtin_scenario",
]
