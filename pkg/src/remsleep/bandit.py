"""
Rewards and exploration policies for learning REM entries.

Each REM entry is a separate bandit over the 2^N pico on/off actions. Exploration policies are draccus choices so
they can be picked from config (``exploration: {type: ucb, c: 2.0}``).
"""
import abc
import math
from dataclasses import dataclass
from typing import Optional

import draccus
import numpy as np

from remsleep.errors import ConfigError
from remsleep.rem import Action, RemEntry, greedy_action


@dataclass(frozen=True)
class RewardObservation:
    ee: float
    served_under_action: int
    served_under_all_on: int

    def __post_init__(self):
        if self.served_under_action < 0 or self.served_under_all_on < 0:
            raise ValueError("served counts must be non-negative")
        if not self.ee >= 0:
            raise ValueError(f"ee must be non-negative, got {self.ee}")


def reward(obs: RewardObservation) -> float:
    """The EE of the action, or 0 if it serves fewer UEs than the all-on configuration."""
    if obs.served_under_action == obs.served_under_all_on:
        return obs.ee
    return 0.0


@dataclass
class ExplorationPolicy(draccus.ChoiceRegistry, abc.ABC):
    @classmethod
    def default_choice_name(cls) -> Optional[str]:
        return "sweep"

    def validate(self, prefix: str = "exploration"):
        pass

    @abc.abstractmethod
    def select(self, entry: RemEntry, step: int, rng: np.random.Generator) -> Action:
        raise NotImplementedError


def _greedy_over_table(entry: RemEntry) -> Action:
    return greedy_action(entry, list(Action.space(entry.pbs_count)))


def _first_unvisited(entry: RemEntry) -> Optional[Action]:
    unvisited = np.flatnonzero(entry.n == 0)
    if unvisited.size == 0:
        return None
    return Action(int(unvisited[0]), entry.pbs_count)


@ExplorationPolicy.register_subclass("sweep")
@dataclass
class ExhaustiveSweep(ExplorationPolicy):
    """Visits actions in index order until each has been tried once, then acts greedily."""

    def select(self, entry: RemEntry, step: int, rng: np.random.Generator) -> Action:
        nxt = _first_unvisited(entry)
        if nxt is not None:
            return nxt
        return _greedy_over_table(entry)


@ExplorationPolicy.register_subclass("epsilon_greedy")
@dataclass
class EpsilonGreedy(ExplorationPolicy):
    epsilon: float = 0.1
    """probability of picking a uniformly random action instead of the greedy one"""

    def validate(self, prefix: str = "exploration"):
        if not 0.0 <= self.epsilon <= 1.0:
            raise ConfigError(f"{prefix}.epsilon", f"must be in [0, 1], got {self.epsilon}")

    def select(self, entry: RemEntry, step: int, rng: np.random.Generator) -> Action:
        if rng.random() < self.epsilon:
            return Action(int(rng.integers(entry.n_actions)), entry.pbs_count)
        return _greedy_over_table(entry)


@ExplorationPolicy.register_subclass("ucb")
@dataclass
class Ucb(ExplorationPolicy):
    c: float = 2.0
    """exploration bonus scale"""

    def validate(self, prefix: str = "exploration"):
        if not (self.c >= 0 and math.isfinite(self.c)):
            raise ConfigError(f"{prefix}.c", f"must be a finite, non-negative number, got {self.c}")

    def select(self, entry: RemEntry, step: int, rng: np.random.Generator) -> Action:
        # unvisited actions have infinite priority; the lowest index goes first
        nxt = _first_unvisited(entry)
        if nxt is not None:
            return nxt
        log_t = math.log(max(step, 1))
        scores = entry.q + self.c * np.sqrt(log_t / entry.n)
        best = np.flatnonzero(scores == scores.max())
        if best.size == 1:
            return Action(int(best[0]), entry.pbs_count)
        candidates = [Action(int(b), entry.pbs_count) for b in best]
        return min(candidates, key=lambda a: (a.active_count, a.bits))


def select_learning_action(
    entry: RemEntry, policy: ExplorationPolicy, step: int, rng: np.random.Generator
) -> Action:
    if step < 0:
        raise ValueError(f"step must be non-negative, got {step}")
    return policy.select(entry, step, rng)
