"""Adversarial fine-tuning of the generator with policy gradients.

Each sampled expansion is rewarded per generation step: the partial sequence
is completed by Monte Carlo rollouts that the discriminator scores, and the
final step scores the sequence itself. The per-sequence reward is the mean of
its step rewards. The generator is updated after every batch.
"""

from __future__ import annotations

import copy
import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

import numpy as np
import torch
from pydantic import BaseModel

from qexgan.adversarial.rollout import (
    RewardBatch,
    batch_reward,
    rewards_from_probabilities,
    rollout,
)
from qexgan.conditions.strategies import ConditionVector
from qexgan.config import AdversarialConfig
from qexgan.corpus import EOS_ID, QueryDocumentPair, TokenSequence, Vocabulary
from qexgan.errors import EmptyInputError
from qexgan.models.discriminator import RealnessScorer
from qexgan.models.generator import (
    ConditionLookup,
    GeneratorModel,
    conditions_for,
    evaluate_cross_entropy,
    sample_continuations,
    sequence_log_probs,
)
from qexgan.models.seeding import seeded
from qexgan.types import BaselineMode, DecodeMode, RewardMode


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SampledExpansion:
    query: TokenSequence
    condition: ConditionVector
    expansion: tuple[int, ...]
    finished: bool

    @property
    def actions(self) -> tuple[int, ...]:
        """The generated steps, EOS included when it was emitted."""
        return self.expansion + ((EOS_ID,) if self.finished else ())


@dataclass
class MovingAverageBaseline:
    momentum: float = 0.9
    value: float = 0.0

    def update(self, mean_reward: float) -> float:
        self.value = self.momentum * self.value + (1.0 - self.momentum) * mean_reward
        return self.value


class AdversarialEpoch(BaseModel):
    epoch: int
    mean_reward: float
    policy_loss: float
    valid_ce: float
    valid_ppl: float


@dataclass
class AdversarialResult:
    history: list[AdversarialEpoch]
    initial_valid_ce: float
    best_valid_ce: float
    best_state: dict[str, torch.Tensor]
    stopped_early: bool = False
    constant_rewards: bool = False
    baseline_trace: list[float] = field(default_factory=list)


def policy_surrogate(
    generator: GeneratorModel,
    samples: Sequence[SampledExpansion],
    rewards: Sequence[float],
    baseline: float = 0.0,
) -> torch.Tensor:
    """−mean over sequences of (reward − baseline) × Σ log p(sequence)."""
    if len(samples) != len(rewards):
        raise ValueError(
            f"{len(rewards)} rewards for {len(samples)} sampled sequences"
        )
    if not samples:
        raise EmptyInputError("no sampled sequences to update on")
    log_probs = sequence_log_probs(
        generator,
        [s.query for s in samples],
        [s.condition for s in samples],
        [s.expansion for s in samples],
        [s.finished for s in samples],
    )
    advantages = torch.as_tensor(
        np.asarray(rewards, dtype=np.float64) - baseline,
        dtype=log_probs.dtype,
        device=log_probs.device,
    )
    return -(advantages * log_probs).mean()


def policy_gradient_update(
    generator: GeneratorModel,
    samples: Sequence[SampledExpansion],
    rewards: Sequence[float],
    baseline: float,
    optimizer: torch.optim.Optimizer,
) -> float:
    """One optimizer step on the REINFORCE surrogate; returns the loss.

    The surrogate is evaluated in eval mode so the gradient belongs to the
    same policy that sampled the sequences. Zero advantages skip the step.
    """
    if len(samples) != len(rewards):
        raise ValueError(
            f"{len(rewards)} rewards for {len(samples)} sampled sequences"
        )
    if all(r - baseline == 0 for r in rewards):
        return 0.0
    was_training = generator.training
    generator.eval()
    try:
        loss = policy_surrogate(generator, samples, rewards, baseline)
        optimizer.zero_grad()
        loss.backward()
        optimizer.step()
    finally:
        generator.train(was_training)
    return float(loss)


def sequence_reward(
    generator: GeneratorModel,
    scorer: RealnessScorer,
    sample: SampledExpansion,
    vocabulary: Vocabulary,
    config: AdversarialConfig,
    stream: torch.Generator,
) -> tuple[float, list[RewardBatch]]:
    """Mean over generation steps of the rollout-averaged reward."""
    actions = sample.actions
    steps: list[RewardBatch] = []
    for t in range(1, len(actions) + 1):
        if t == len(actions):
            full = sample.query + vocabulary.decode(sample.expansion)
            rewards = rewards_from_probabilities(
                scorer.real_probabilities([full]), config.reward_mode
            )
            steps.append(RewardBatch((float(rewards[0]),), float(rewards[0]), t))
            continue
        rollouts = rollout(
            generator,
            sample.query,
            sample.condition,
            actions[:t],
            config.rollout_count,
            stream,
            config.max_expansion_len,
        )
        steps.append(
            batch_reward(
                scorer, rollouts, sample.query, vocabulary, config.reward_mode, t
            )
        )
    return float(np.mean([s.mean for s in steps])), steps


def sample_expansions(
    generator: GeneratorModel,
    pairs: Sequence[QueryDocumentPair],
    conditions: Sequence[ConditionVector],
    stream: torch.Generator,
    max_len: int,
) -> list[SampledExpansion]:
    samples = []
    for pair, condition in zip(pairs, conditions, strict=True):
        ids, _, finished = sample_continuations(
            generator,
            pair.query,
            condition,
            [],
            1,
            DecodeMode.SAMPLE,
            stream,
            max_len,
        )[0]
        samples.append(SampledExpansion(pair.query, condition, tuple(ids), finished))
    return samples


def adversarial_train(
    generator: GeneratorModel,
    scorer: RealnessScorer,
    train_pairs: Sequence[QueryDocumentPair],
    valid_pairs: Sequence[QueryDocumentPair],
    lookup: ConditionLookup,
    vocabulary: Vocabulary,
    config: AdversarialConfig,
    on_epoch: Callable[[AdversarialEpoch], None] | None = None,
    refresh_discriminator: Callable[[GeneratorModel, int], None] | None = None,
) -> AdversarialResult:
    """Fine-tune `generator` against a frozen (or alternately refreshed) scorer.

    Stops after `config.epochs` or when validation CE has not improved on the
    best seen (starting from the pre-adversarial value) for `config.patience`
    consecutive epochs. The generator ends in its final state; the best
    state is returned alongside.
    """
    if not train_pairs:
        raise EmptyInputError("no training pairs for adversarial training")
    train_conditions = conditions_for(train_pairs, lookup)
    monitor = valid_pairs or train_pairs

    best_ce = initial_ce = evaluate_cross_entropy(generator, monitor, lookup)
    best_state = copy.deepcopy(generator.state_dict())
    logger.info("pre-adversarial valid CE %.4f", initial_ce)

    optimizer = torch.optim.Adam(generator.parameters(), lr=config.learning_rate)
    baseline = MovingAverageBaseline(config.baseline_momentum)
    stream = torch.Generator().manual_seed(config.seed)
    shuffler = np.random.default_rng(config.seed)

    history: list[AdversarialEpoch] = []
    trace: list[float] = []
    stalled = 0
    stopped_early = False
    constant_rewards = True
    with seeded(config.seed):
        for epoch in range(1, config.epochs + 1):
            order = shuffler.permutation(len(train_pairs))
            batch_means: list[float] = []
            losses: list[float] = []
            for start in range(0, len(order), config.batch_size):
                index = order[start : start + config.batch_size]
                samples = sample_expansions(
                    generator,
                    [train_pairs[i] for i in index],
                    [train_conditions[i] for i in index],
                    stream,
                    config.max_expansion_len,
                )
                rewards = []
                for sample in samples:
                    reward, steps = sequence_reward(
                        generator, scorer, sample, vocabulary, config, stream
                    )
                    rewards.append(reward)
                    if config.reward_mode is RewardMode.PROB_REAL:
                        constant_rewards &= all(
                            r == 0.5 for s in steps for r in s.rewards
                        )
                    else:
                        constant_rewards = False
                mean_reward = float(np.mean(rewards))
                b = (
                    baseline.value
                    if config.baseline_mode is BaselineMode.MOVING_AVERAGE
                    else 0.0
                )
                losses.append(
                    policy_gradient_update(generator, samples, rewards, b, optimizer)
                )
                if config.baseline_mode is BaselineMode.MOVING_AVERAGE:
                    trace.append(baseline.update(mean_reward))
                batch_means.append(mean_reward)

            if refresh_discriminator is not None:
                refresh_discriminator(generator, epoch)

            valid_ce = evaluate_cross_entropy(generator, monitor, lookup)
            record = AdversarialEpoch(
                epoch=epoch,
                mean_reward=float(np.mean(batch_means)),
                policy_loss=float(np.mean(losses)),
                valid_ce=valid_ce,
                valid_ppl=math.exp(valid_ce),
            )
            logger.info(
                "adversarial epoch %d: mean reward %.4f, policy loss %.4f, "
                "valid CE %.4f",
                epoch,
                record.mean_reward,
                record.policy_loss,
                valid_ce,
            )
            history.append(record)
            if on_epoch is not None:
                on_epoch(record)

            if valid_ce < best_ce:
                best_ce = valid_ce
                best_state = copy.deepcopy(generator.state_dict())
                stalled = 0
            else:
                stalled += 1
                if stalled >= config.patience:
                    stopped_early = epoch < config.epochs
                    break

    if constant_rewards:
        logger.warning(
            "every discriminator reward was 0.5; the discriminator looks untrained"
        )
    return AdversarialResult(
        history=history,
        initial_valid_ce=initial_ce,
        best_valid_ce=best_ce,
        best_state=best_state,
        stopped_early=stopped_early,
        constant_rewards=constant_rewards,
        baseline_trace=trace,
    )
