"""
REINFORCE training of the grid-world agent and finite-difference gradient checks.

The policy is Gaussian over output coordinates, centred at the decoder output:
a ~ N(y, sigma^2 I), reward -||a - gold||. The surrogate loss
-mean(advantage * log pi(a | y)) has dL/dy = -sum(advantage * (a - y)) / (sigma^2 N).
"""

from __future__ import annotations

from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field

from schemas.gridworld import AgentSpec, TrainConfig, TrainLog, WorldSpec
from semantics.errors import DivergedTraining
from utils.logger import logger
from utils.rng import StreamFactory

from .grid_agent import PARAM_GROUPS, GridAgent


class Adam:
    def __init__(self, params: Dict[str, np.ndarray], lr: float, beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8) -> None:
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.m = {k: np.zeros_like(v) for k, v in params.items()}
        self.v = {k: np.zeros_like(v) for k, v in params.items()}
        self.t = 0

    def step(self, params: Dict[str, np.ndarray], grads: Dict[str, np.ndarray], lr: Optional[float] = None) -> None:
        lr = self.lr if lr is None else lr
        self.t += 1
        c1 = 1.0 - self.beta1 ** self.t
        c2 = 1.0 - self.beta2 ** self.t
        for name, g in grads.items():
            self.m[name] = self.beta1 * self.m[name] + (1.0 - self.beta1) * g
            self.v[name] = self.beta2 * self.v[name] + (1.0 - self.beta2) * g * g
            params[name] -= lr * (self.m[name] / c1) / (np.sqrt(self.v[name] / c2) + self.eps)


def clip_by_global_norm(grads: Dict[str, np.ndarray], max_norm: float) -> float:
    norm = float(np.sqrt(sum(float(np.sum(g * g)) for g in grads.values())))
    if norm > max_norm:
        scale = max_norm / (norm + 1e-12)
        for g in grads.values():
            g *= scale
    return norm


def training_commands(world: WorldSpec, config: TrainConfig) -> List[Tuple[str, ...]]:
    """Non-held-out colour-direction pairs, plus every atom when configured."""
    heldout = {tuple(c.split()) for c in config.heldout}
    commands: List[Tuple[str, ...]] = []
    if config.train_atoms:
        commands.extend((tok,) for tok in world.vocab)
    for colour in world.landmarks:
        for direction in world.directions:
            if (colour, direction) not in heldout:
                commands.append((colour, direction))
    return commands


def gold_targets(world: WorldSpec, commands: Sequence[Sequence[str]]) -> np.ndarray:
    # imported lazily: environments depends on models
    from environments.gridworld import gold_coordinate
    return np.stack([gold_coordinate(world, cmd) for cmd in commands])


def distance_loss(y: np.ndarray, gold: np.ndarray) -> Tuple[float, np.ndarray]:
    """Mean Euclidean distance and its gradient w.r.t. y."""
    diff = y - gold
    norms = np.linalg.norm(diff, axis=1)
    safe = np.where(norms > 0, norms, 1.0)
    grad = diff / safe[:, None] / len(y)
    return float(norms.mean()), grad


def surrogate_loss(y: np.ndarray, actions: np.ndarray, advantages: np.ndarray, sigma: float) -> Tuple[float, np.ndarray]:
    """-mean(A * log pi(a | y)) over (command, sample) pairs, with its gradient w.r.t. y."""
    N = advantages.size
    diff = actions - y[:, None, :]
    log_pi = -0.5 * np.sum(diff ** 2, axis=-1) / sigma ** 2 - np.log(2.0 * np.pi * sigma ** 2)
    loss = -float(np.sum(advantages * log_pi)) / N
    grad = -np.sum(advantages[..., None] * diff, axis=1) / (sigma ** 2 * N)
    return loss, grad


def _draw_noise(rng: np.random.Generator, B: int, S: int, antithetic: bool) -> np.ndarray:
    if antithetic:
        half = rng.standard_normal((B, (S + 1) // 2, 2))
        return np.concatenate([half, -half], axis=1)[:, :S, :]
    return rng.standard_normal((B, S, 2))


def train(
    world: WorldSpec,
    agent_spec: AgentSpec,
    config: TrainConfig,
    agent: Optional[GridAgent] = None,
) -> Tuple[GridAgent, TrainLog]:
    """REINFORCE with per-command running baselines and Adam.

    Deterministic given (agent_spec.seed, config.seed). With zero episodes the
    initial agent is returned unchanged.
    """
    agent = agent.copy() if agent is not None else GridAgent.initialize(world.vocab, agent_spec)
    commands = training_commands(world, config)
    gold = gold_targets(world, commands)
    ids, mask = agent.batch(commands)
    rng = StreamFactory(config.seed).stream("reinforce", "policy-noise")
    optimizer = Adam(agent.params, config.learning_rate)
    baseline: Optional[np.ndarray] = None
    log = TrainLog()

    logger.info(
        f"[Trainer] {len(commands)} training commands, held out {config.heldout}, "
        f"{config.episodes} episodes, sigma={config.sigma}"
    )
    for episode in range(config.episodes):
        h, cache = agent.encode_batch(ids, mask)
        y = agent.decode(h)
        loss, _ = distance_loss(y, gold)
        if not np.isfinite(loss) or loss > config.divergence_loss:
            logger.error(f"[Trainer] divergence at episode {episode}: loss={loss}")
            raise DivergedTraining(episode, loss)

        noise = _draw_noise(rng, len(commands), config.samples_per_command, config.antithetic)
        actions = y[:, None, :] + config.sigma * noise
        rewards = -np.linalg.norm(actions - gold[:, None, :], axis=-1)
        mean_reward = rewards.mean(axis=1)
        if baseline is None:
            baseline = mean_reward.copy()
        advantages = rewards - baseline[:, None]
        baseline = config.baseline_decay * baseline + (1.0 - config.baseline_decay) * mean_reward

        _, d_y = surrogate_loss(y, actions, advantages, config.sigma)
        grads = agent.backward(cache, d_y)
        clip_by_global_norm(grads, config.grad_clip)
        progress = episode / max(config.episodes - 1, 1)
        lr = config.learning_rate * (1.0 - (1.0 - config.lr_final_fraction) * progress)
        optimizer.step(agent.params, grads, lr=lr)

        if episode % config.log_every == 0:
            log.append(episode, loss)
            logger.info(f"[Trainer] episode {episode} loss={loss:.4f}")

    if config.episodes > 0:
        y, _ = agent.predict_batch(commands)
        final, _ = distance_loss(y, gold)
        log.append(config.episodes, final)
        logger.info(f"[Trainer] finished {config.episodes} episodes, loss={final:.4f}")
    return agent, log


# gradient checks

class GroupCheck(BaseModel):
    group: str
    analytic_norm: float
    numeric_norm: float
    relative_error: float = Field(..., description="||a - n|| / max(||a|| + ||n||, 1e-12)")


class GradientReport(BaseModel):
    loss: str
    groups: List[GroupCheck]

    @property
    def max_relative_error(self) -> float:
        return max(g.relative_error for g in self.groups)


def numeric_gradient(agent: GridAgent, loss_fn: Callable[[GridAgent], float], step: float = 1e-5) -> Dict[str, np.ndarray]:
    """Central finite differences over every parameter entry."""
    out: Dict[str, np.ndarray] = {}
    for name, arr in agent.params.items():
        grad = np.zeros_like(arr)
        flat = arr.reshape(-1)
        gflat = grad.reshape(-1)
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + step
            plus = loss_fn(agent)
            flat[i] = orig - step
            minus = loss_fn(agent)
            flat[i] = orig
            gflat[i] = (plus - minus) / (2.0 * step)
        out[name] = grad
    return out


def _compare(name: str, analytic: Dict[str, np.ndarray], numeric: Dict[str, np.ndarray]) -> GradientReport:
    groups = []
    for group, members in PARAM_GROUPS.items():
        a = np.concatenate([analytic[m].ravel() for m in members])
        n = np.concatenate([numeric[m].ravel() for m in members])
        na, nn = float(np.linalg.norm(a)), float(np.linalg.norm(n))
        rel = float(np.linalg.norm(a - n)) / max(na + nn, 1e-12)
        groups.append(GroupCheck(group=group, analytic_norm=na, numeric_norm=nn, relative_error=rel))
    return GradientReport(loss=name, groups=groups)


def gradient_check(
    agent: GridAgent,
    world: WorldSpec,
    config: Optional[TrainConfig] = None,
    seed: int = 0,
    step: float = 1e-5,
) -> List[GradientReport]:
    """Analytic vs numeric gradients for the distance loss and the REINFORCE surrogate."""
    config = config or TrainConfig()
    agent = agent.copy()
    commands = training_commands(world, config)
    gold = gold_targets(world, commands)
    ids, mask = agent.batch(commands)
    rng = StreamFactory(seed).stream("gradient-check")

    y, _ = agent.predict_batch(commands)
    noise = _draw_noise(rng, len(commands), config.samples_per_command, config.antithetic)
    actions = y[:, None, :] + config.sigma * noise
    rewards = -np.linalg.norm(actions - gold[:, None, :], axis=-1)
    advantages = rewards - rewards.mean(axis=1, keepdims=True)

    def dist(a: GridAgent) -> float:
        h, _ = a.encode_batch(ids, mask)
        return distance_loss(a.decode(h), gold)[0]

    def surrogate(a: GridAgent) -> float:
        h, _ = a.encode_batch(ids, mask)
        return surrogate_loss(a.decode(h), actions, advantages, config.sigma)[0]

    reports = []
    for name, fn, grad_y in (
        ("distance", dist, lambda yy: distance_loss(yy, gold)[1]),
        ("surrogate", surrogate, lambda yy: surrogate_loss(yy, actions, advantages, config.sigma)[1]),
    ):
        h, cache = agent.encode_batch(ids, mask)
        analytic = agent.backward(cache, grad_y(agent.decode(h)))
        numeric = numeric_gradient(agent, fn, step)
        report = _compare(name, analytic, numeric)
        for g in report.groups:
            logger.info(f"[GradCheck] {name}/{g.group}: relative error {g.relative_error:.3e}")
        reports.append(report)
    return reports
