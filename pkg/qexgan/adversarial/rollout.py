"""Monte Carlo rollouts of partial expansions and their discriminator rewards."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
import torch

from qexgan.conditions.strategies import ConditionVector
from qexgan.corpus import TokenSequence, Vocabulary
from qexgan.models.discriminator import RealnessScorer
from qexgan.models.generator import GeneratorModel, sample_continuations
from qexgan.types import DecodeMode, RewardMode


# p is clipped below 1 so the disc_loss reward stays finite
_MAX_PROBABILITY = 1.0 - 1e-12


@dataclass(frozen=True)
class RolloutSet:
    prefix: tuple[int, ...]
    sequences: tuple[tuple[int, ...], ...]
    finished: tuple[bool, ...]

    def __len__(self) -> int:
        return len(self.sequences)


@dataclass(frozen=True)
class RewardBatch:
    rewards: tuple[float, ...]
    mean: float
    step: int = 0


def rollout(
    generator: GeneratorModel,
    query: TokenSequence,
    condition: ConditionVector,
    prefix: Sequence[int],
    count: int,
    seed: int | torch.Generator,
    max_len: int | None = None,
) -> RolloutSet:
    """`count` sampled completions of `prefix`, each ending at EOS or the cap."""
    cap = max_len or generator.config.max_expansion_len
    if len(prefix) >= cap:
        raise ValueError(f"prefix length {len(prefix)} must be below the cap {cap}")
    if count < 1:
        raise ValueError("at least one rollout is required")
    stream = (
        seed
        if isinstance(seed, torch.Generator)
        else torch.Generator().manual_seed(seed)
    )
    completions = sample_continuations(
        generator, query, condition, prefix, count, DecodeMode.SAMPLE, stream, cap
    )
    return RolloutSet(
        prefix=tuple(prefix),
        sequences=tuple(tuple(ids) for ids, _, _ in completions),
        finished=tuple(done for _, _, done in completions),
    )


def rewards_from_probabilities(
    probabilities: np.ndarray, mode: RewardMode
) -> np.ndarray:
    """prob_real: p itself. disc_loss: the BCE of labelling the sequence synthetic."""
    p = np.asarray(probabilities, dtype=np.float64)
    if mode is RewardMode.PROB_REAL:
        return p
    return -np.log1p(-np.minimum(p, _MAX_PROBABILITY))


def batch_reward(
    scorer: RealnessScorer,
    rollouts: RolloutSet,
    query: TokenSequence,
    vocabulary: Vocabulary,
    mode: RewardMode = RewardMode.PROB_REAL,
    step: int = 0,
) -> RewardBatch:
    """Score every query ⊕ completion and average."""
    if not len(rollouts):
        raise ValueError("cannot reward an empty rollout set")
    expanded = [query + vocabulary.decode(ids) for ids in rollouts.sequences]
    rewards = rewards_from_probabilities(scorer.real_probabilities(expanded), mode)
    return RewardBatch(
        rewards=tuple(float(r) for r in rewards),
        mean=float(np.mean(rewards)),
        step=step,
    )
