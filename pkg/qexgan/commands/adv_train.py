"""adv-train: policy-gradient fine-tuning of the pre-trained generator."""

from __future__ import annotations

import logging
from collections.abc import Callable

from qexgan.adversarial.trainer import adversarial_train
from qexgan.commands.artifacts import (
    Phase,
    PreparedArtifacts,
    discriminator_artifact,
    generator_artifact,
    history_artifact,
    load_prepared,
)
from qexgan.commands.pretrain import TrainingResult, prepared_names
from qexgan.config import RunConfig
from qexgan.models.checkpoint import (
    CheckpointMeta,
    load_discriminator,
    load_generator,
    save_checkpoint,
)
from qexgan.models.discriminator import (
    DiscriminatorModel,
    DiscriminatorScorer,
    pretrain_discriminator,
)
from qexgan.models.generator import GeneratorModel
from qexgan.models.synthetic import generate_synthetic
from qexgan.store import ArtifactStore
from qexgan.types import DecodeMode, DiscriminatorProtocol, Split


logger = logging.getLogger(__name__)


def cmd_adv_train(
    config: RunConfig, store: ArtifactStore, epochs: int | None = None
) -> TrainingResult:
    strategy = config.strategy
    prepared = load_prepared(store, config, strategy)
    generator_name = generator_artifact(strategy, Phase.PRETRAINED)
    discriminator_name = discriminator_artifact(strategy)
    store.verify(generator_name)
    store.verify(discriminator_name)
    generator, _ = load_generator(
        store.path(generator_name), prepared.upstream
    )
    discriminator, discriminator_meta = load_discriminator(
        store.path(discriminator_name), prepared.upstream
    )

    adv_config = config.adversarial
    if epochs is not None:
        adv_config = adv_config.model_copy(update={"epochs": epochs})

    refresh = (
        _alternating_refresh(config, prepared, discriminator, discriminator_meta)
        if adv_config.alternate_discriminator
        else None
    )

    result = adversarial_train(
        generator,
        DiscriminatorScorer(discriminator, prepared.table),
        prepared.corpus.select(Split.TRAIN),
        prepared.corpus.select(Split.VALID),
        prepared.condition,
        prepared.vocabulary,
        adv_config,
        refresh_discriminator=refresh,
    )
    if result.constant_rewards:
        logger.warning("adversarial rewards never moved from 0.5")

    upstream = {
        **prepared.upstream,
        generator_name: store.current_hash(generator_name),
        discriminator_name: store.current_hash(discriminator_name),
    }
    upstream_names = [*prepared_names(strategy), generator_name, discriminator_name]
    extra = {
        "strategy": strategy.value,
        "reward_mode": adv_config.reward_mode.value,
        "epochs": len(result.history),
        "stopped_early": result.stopped_early,
    }

    final_name = generator_artifact(strategy, Phase.ADVERSARIAL)
    save_checkpoint(
        store.path(final_name),
        generator,
        "generator",
        generator.config,
        upstream,
        extra=extra,
    )
    store.record(final_name, upstream_names)

    generator.load_state_dict(result.best_state)
    best_name = generator_artifact(strategy, Phase.ADVERSARIAL_BEST)
    save_checkpoint(
        store.path(best_name),
        generator,
        "generator",
        generator.config,
        upstream,
        extra={**extra, "valid_ce": result.best_valid_ce},
    )
    store.record(best_name, upstream_names)

    history_path = store.write_jsonl(
        history_artifact("adv-train", strategy), result.history, [final_name]
    )
    logger.info("adversarial training ran %d epochs", len(result.history))
    return TrainingResult(
        store.path(best_name),
        history_path,
        list(result.history),
        (store.path(final_name),),
    )


def _alternating_refresh(
    config: RunConfig,
    prepared: PreparedArtifacts,
    discriminator: DiscriminatorModel,
    discriminator_meta: CheckpointMeta,
) -> Callable[[GeneratorModel, int], None]:
    """One discriminator epoch on fresh synthetic data after each adversarial epoch.

    The refreshed discriminator only lives for this run; its checkpoint is
    left as pre-trained.
    """
    protocol = DiscriminatorProtocol(
        discriminator_meta.extra.get("protocol", config.discriminator.protocol.value)
    )
    split = Split.TEST if protocol is DiscriminatorProtocol.TEST_SPLIT else Split.TRAIN
    pairs = prepared.corpus.select(split)
    real = [p.document for p in pairs]

    def refresh(current: GeneratorModel, epoch: int) -> None:
        synthetic = generate_synthetic(
            current,
            pairs,
            prepared.condition,
            prepared.vocabulary,
            DecodeMode.SAMPLE,
            config.adversarial.seed + epoch,
        )
        pretrain_discriminator(
            discriminator,
            real,
            synthetic,
            prepared.table,
            discriminator.config,
            epochs=1,
        )

    return refresh
