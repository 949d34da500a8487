"""Parameter-sharing DQN on a one-hidden-layer numpy network.

One Q-function is shared by every agent of a group: each agent's flattened
view plus feature vector (which carries its id embedding) goes through the
same weights, and all agents' transitions pool into one replay buffer.
Gradients are hand-derived and checked against finite differences in the
test suite.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

import numpy as np

from .engine import ATTACK, MOVE, action_space, rotate_offset
from .errors import (
    ContractError,
    InvalidConfigError,
    TrainingDivergenceError,
    UnknownIdError,
)

CHECKPOINT_VERSION = 1


@dataclass
class QNetworkParams:
    w1: np.ndarray  # [in, hidden]
    b1: np.ndarray  # [hidden]
    w2: np.ndarray  # [hidden, out]
    b2: np.ndarray  # [out]

    def copy(self) -> "QNetworkParams":
        return QNetworkParams(
            self.w1.copy(), self.b1.copy(), self.w2.copy(), self.b2.copy()
        )


@dataclass
class TrainConfig:
    gamma: float = 0.95
    lr: float = 0.01
    batch_size: int = 32
    buffer_capacity: int = 50_000
    epsilon_start: float = 1.0
    epsilon_end: float = 0.05
    epsilon_decay_steps: int = 30_000
    target_sync: int = 500
    hidden: int = 64
    total_steps: int = 100_000
    eval_episodes: int = 20
    eval_interval: int = 10_000
    learn_start: int = 500
    seed: int = 0

    def validate(self) -> None:
        if not 0 <= self.gamma < 1:
            raise InvalidConfigError("gamma must be in [0, 1)")
        if not 0 <= self.epsilon_end <= self.epsilon_start <= 1:
            raise InvalidConfigError("need epsilon_end <= epsilon_start <= 1")
        for name in ("lr", "batch_size", "buffer_capacity", "hidden",
                     "target_sync", "eval_episodes", "eval_interval"):
            if getattr(self, name) <= 0:
                raise InvalidConfigError(f"{name} must be positive")
        if self.total_steps < 0:
            raise InvalidConfigError("total_steps must be >= 0")


def init_network(in_dim: int, n_actions: int, hidden: int, seed: int) -> QNetworkParams:
    if in_dim <= 0 or n_actions <= 0 or hidden <= 0:
        raise InvalidConfigError(
            f"network dims must be positive, got in={in_dim} act={n_actions} "
            f"hidden={hidden}"
        )
    rng = np.random.default_rng(seed)
    return QNetworkParams(
        w1=rng.standard_normal((in_dim, hidden)) / np.sqrt(in_dim),
        b1=np.zeros(hidden),
        w2=rng.standard_normal((hidden, n_actions)) / np.sqrt(hidden),
        b2=np.zeros(n_actions),
    )


def q_forward(params: QNetworkParams, obs_batch: np.ndarray) -> np.ndarray:
    obs_batch = np.asarray(obs_batch, dtype=np.float64)
    if obs_batch.ndim != 2 or obs_batch.shape[1] != params.w1.shape[0]:
        raise ContractError(
            f"obs batch shape {obs_batch.shape} does not match input dim "
            f"{params.w1.shape[0]}"
        )
    h = np.maximum(0.0, obs_batch @ params.w1 + params.b1)
    return h @ params.w2 + params.b2


@dataclass
class TransitionBatch:
    obs: np.ndarray  # [B, in]
    actions: np.ndarray  # [B]
    rewards: np.ndarray  # [B]
    next_obs: np.ndarray  # [B, in]; rows ignored where done
    done: np.ndarray  # [B] float 0/1


def td_loss(
    params: QNetworkParams,
    target_params: QNetworkParams,
    batch: TransitionBatch,
    gamma: float,
) -> float:
    q_next = q_forward(target_params, batch.next_obs)
    target = batch.rewards + gamma * q_next.max(axis=1) * (1.0 - batch.done)
    q = q_forward(params, batch.obs)
    qa = q[np.arange(len(batch.actions)), batch.actions]
    return float(np.mean((qa - target) ** 2))


def td_update(
    params: QNetworkParams,
    target_params: QNetworkParams,
    batch: TransitionBatch,
    gamma: float,
    lr: float,
) -> tuple[QNetworkParams, float]:
    """One SGD step on the mean squared TD error; bootstrap is zeroed on
    done transitions."""
    if len(batch.actions) == 0:
        raise ContractError("empty transition batch")
    b = len(batch.actions)
    q_next = q_forward(target_params, batch.next_obs)
    target = batch.rewards + gamma * q_next.max(axis=1) * (1.0 - batch.done)

    x = np.asarray(batch.obs, dtype=np.float64)
    z1 = x @ params.w1 + params.b1
    h = np.maximum(0.0, z1)
    q = h @ params.w2 + params.b2
    rows = np.arange(b)
    qa = q[rows, batch.actions]
    err = qa - target
    loss = float(np.mean(err**2))
    if not np.isfinite(loss):
        raise TrainingDivergenceError(f"non-finite TD loss {loss}")

    dq = np.zeros_like(q)
    dq[rows, batch.actions] = 2.0 * err / b
    dw2 = h.T @ dq
    db2 = dq.sum(axis=0)
    dh = dq @ params.w2.T
    dz1 = dh * (z1 > 0)
    dw1 = x.T @ dz1
    db1 = dz1.sum(axis=0)

    new = QNetworkParams(
        w1=params.w1 - lr * dw1,
        b1=params.b1 - lr * db1,
        w2=params.w2 - lr * dw2,
        b2=params.b2 - lr * db2,
    )
    return new, loss


def act_epsilon_greedy(
    params: QNetworkParams,
    obs_batch: np.ndarray,
    epsilon: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """Per row: uniform action with probability epsilon, else the argmax of
    the Q row (lowest index wins ties)."""
    if not 0 <= epsilon <= 1:
        raise InvalidConfigError("epsilon must be in [0, 1]")
    n = len(obs_batch)
    n_actions = params.w2.shape[1]
    explore = rng.random(n) < epsilon
    random_actions = rng.integers(0, n_actions, size=n)
    greedy = np.argmax(q_forward(params, obs_batch), axis=1) if n else np.empty(0, int)
    return np.where(explore, random_actions, greedy).astype(np.int64)


class ReplayBuffer:
    """Circular transition store shared by every agent of the group."""

    def __init__(self, capacity: int, in_dim: int):
        self.capacity = capacity
        self.obs = np.zeros((capacity, in_dim), dtype=np.float32)
        self.actions = np.zeros(capacity, dtype=np.int64)
        self.rewards = np.zeros(capacity, dtype=np.float64)
        self.next_obs = np.zeros((capacity, in_dim), dtype=np.float32)
        self.done = np.zeros(capacity, dtype=np.float64)
        self.size = 0
        self._head = 0

    def push(self, obs, action, reward, next_obs, done):
        i = self._head
        self.obs[i] = obs
        self.actions[i] = action
        self.rewards[i] = reward
        if next_obs is not None:
            self.next_obs[i] = next_obs
        else:
            self.next_obs[i] = 0.0
        self.done[i] = float(done)
        self._head = (i + 1) % self.capacity
        self.size = min(self.size + 1, self.capacity)

    def sample(self, batch_size: int, rng: np.random.Generator) -> TransitionBatch:
        idx = rng.integers(0, self.size, size=batch_size)
        return TransitionBatch(
            obs=self.obs[idx].astype(np.float64),
            actions=self.actions[idx],
            rewards=self.rewards[idx],
            next_obs=self.next_obs[idx].astype(np.float64),
            done=self.done[idx],
        )


def flatten_batch(batch) -> np.ndarray:
    """ObservationBatch -> [N, C*H*W + F] float array."""
    n = len(batch.ids)
    view_dim = int(np.prod(batch.views.shape[1:]))  # reshape(n, -1) breaks at n=0
    return np.concatenate(
        [batch.views.reshape(n, view_dim), batch.features], axis=1
    ).astype(np.float64)


def obs_dim(env, group: str) -> int:
    obs = env.observe() if env.world is not None else None
    if obs is None:
        raise ContractError("environment must be reset to size the network")
    b = obs[group]
    return int(np.prod(b.views.shape[1:]) + b.features.shape[1])


# -- scripted reference policies ---------------------------------------------

def scripted_policy(name: str, world, group: int) -> np.ndarray:
    """Reference opponents: stand still, uniform-random, or greedy chase."""
    members = world.group_members(group)
    spec = world.group_spec(group)
    acts = action_space(spec)
    if name == "stay":
        return np.zeros(len(members), dtype=np.int64)
    if name == "random":
        return world.rng.integers(0, len(acts), size=len(members))
    if name != "chase_nearest":
        raise UnknownIdError(f"unknown scripted policy {name!r}")

    enemies = [
        int(i)
        for g in range(len(world.groups))
        if g != group
        for i in world.group_members(g)
    ]
    out = np.zeros(len(members), dtype=np.int64)
    for k, aid in enumerate(members):
        ax, ay = int(world.a_x[aid]), int(world.a_y[aid])
        d = int(world.a_dir[aid])
        best_t, best_d = None, None
        for e in enemies:
            dist = max(abs(int(world.a_x[e]) - ax), abs(int(world.a_y[e]) - ay))
            if best_d is None or dist < best_d:
                best_t, best_d = e, dist
        if best_t is None:
            out[k] = 0
            continue
        tx, ty = int(world.a_x[best_t]), int(world.a_y[best_t])
        if best_d <= spec.attack_range and spec.attack_range > 0:
            # first attack action in canonical order hitting the target anchor
            delta = (tx - ax, ty - ay)
            ego = rotate_offset(delta, (4 - d) % 4)
            for i, a in enumerate(acts):
                if a.kind == ATTACK and (a.dx, a.dy) == ego:
                    out[k] = i
                    break
            continue
        best_i, best_dist = 0, best_d  # index 0 = stay put
        for i, a in enumerate(acts):
            if a.kind != MOVE:
                continue
            wdx, wdy = rotate_offset((a.dx, a.dy), d)
            dist = max(abs(tx - (ax + wdx)), abs(ty - (ay + wdy)))
            if dist < best_dist:
                best_i, best_dist = i, dist
        out[k] = best_i
    return out


# -- training loop -----------------------------------------------------------

@dataclass
class TrainResult:
    params: QNetworkParams
    curve: list = field(default_factory=list)  # dicts: step, epsilon, mean_eval_reward


def _epsilon_at(cfg: TrainConfig, step: int) -> float:
    frac = min(1.0, step / max(1, cfg.epsilon_decay_steps))
    return cfg.epsilon_start + frac * (cfg.epsilon_end - cfg.epsilon_start)


def evaluate_policy(
    env, group: str, params: QNetworkParams | None, episodes: int,
    seed: int, opponents: str = "random",
) -> float:
    """Mean total group reward per greedy episode (random if params None)."""
    totals = []
    rng = np.random.default_rng(seed)
    for _ in range(episodes):
        obs = env.reset(int(rng.integers(2**31)))
        total = 0.0
        while True:
            actions = {}
            for g in env.group_names:
                if g == group and params is not None:
                    actions[g] = act_epsilon_greedy(
                        params, flatten_batch(obs[g]), 0.0, rng
                    )
                else:
                    actions[g] = scripted_policy(
                        opponents, env.world, env._group_ids[g]
                    )
            res = env.step(actions)
            obs = res.obs
            total += float(res.rewards[group].sum())
            total += sum(r for _, r in res.dead[group])
            if res.done:
                break
        totals.append(total)
    return float(np.mean(totals))


def train(env, group: str, cfg: TrainConfig) -> TrainResult:
    """Epsilon-greedy rollouts with pooled replay; seed-deterministic."""
    cfg.validate()
    rng = np.random.default_rng(cfg.seed)
    obs = env.reset(int(rng.integers(2**31)))
    spec = env.type_spec(group)
    n_actions = len(action_space(spec))
    in_dim = obs_dim(env, group)
    params = init_network(in_dim, n_actions, cfg.hidden, cfg.seed)
    target = params.copy()
    buffer = ReplayBuffer(cfg.buffer_capacity, in_dim)
    curve: list = []
    from .env import Environment

    eval_env = Environment(config=env.config)

    prev = {}  # agent id -> (flat obs, action)
    flat = flatten_batch(obs[group])
    updates = 0
    step = 0
    try:
        while step < cfg.total_steps:
            eps = _epsilon_at(cfg, step)
            ids = obs[group].ids
            actions = {
                g: scripted_policy("random", env.world, env._group_ids[g])
                for g in env.group_names
                if g != group
            }
            learn_acts = act_epsilon_greedy(params, flat, eps, rng)
            actions[group] = learn_acts
            res = env.step(actions)
            step += 1

            next_ids = res.obs[group].ids
            next_flat = flatten_batch(res.obs[group])
            row_of = {int(a): i for i, a in enumerate(next_ids)}
            reward_of = dict(zip((int(i) for i in next_ids),
                                 res.rewards[group]))
            dead = dict(res.dead[group])
            for i, aid in enumerate(ids):
                aid = int(aid)
                if aid in row_of:
                    r = float(reward_of[aid])
                    terminal = res.done
                    nxt = next_flat[row_of[aid]]
                else:
                    r = float(dead.get(aid, 0.0))
                    terminal = True
                    nxt = None
                buffer.push(flat[i], learn_acts[i], r, nxt, terminal)

            if buffer.size >= max(cfg.batch_size, cfg.learn_start):
                batch = buffer.sample(cfg.batch_size, rng)
                params, _ = td_update(params, target, batch, cfg.gamma, cfg.lr)
                updates += 1
                if updates % cfg.target_sync == 0:
                    target = params.copy()

            if res.done:
                obs = env.reset(int(rng.integers(2**31)))
            else:
                obs = res.obs
            flat = flatten_batch(obs[group])

            if step % cfg.eval_interval == 0 or step == cfg.total_steps:
                mean_r = evaluate_policy(
                    eval_env, group, params, cfg.eval_episodes,
                    seed=cfg.seed + 977_711,
                )
                curve.append(
                    {"step": step, "epsilon": round(eps, 6),
                     "mean_eval_reward": mean_r}
                )
    except TrainingDivergenceError as e:
        raise TrainingDivergenceError(str(e), curve=curve) from e
    return TrainResult(params=params, curve=curve)


# -- checkpoints -------------------------------------------------------------

def save_checkpoint(path, params: QNetworkParams, meta: dict) -> None:
    """Versioned npz container: weight arrays + a JSON metadata blob holding
    dims and hyperparameters."""
    meta = dict(meta)
    meta["in_dim"] = int(params.w1.shape[0])
    meta["hidden"] = int(params.w1.shape[1])
    meta["n_actions"] = int(params.w2.shape[1])
    np.savez(
        path,
        version=np.int64(CHECKPOINT_VERSION),
        w1=params.w1, b1=params.b1, w2=params.w2, b2=params.b2,
        meta=np.frombuffer(json.dumps(meta, sort_keys=True).encode(), dtype=np.uint8),
    )


def load_checkpoint(path) -> tuple[QNetworkParams, dict]:
    with np.load(path) as z:
        version = int(z["version"])
        if version != CHECKPOINT_VERSION:
            raise ContractError(
                f"unsupported checkpoint version {version} "
                f"(expected {CHECKPOINT_VERSION})"
            )
        params = QNetworkParams(
            w1=z["w1"].copy(), b1=z["b1"].copy(),
            w2=z["w2"].copy(), b2=z["b2"].copy(),
        )
        meta = json.loads(bytes(z["meta"]).decode())
    return params, meta
