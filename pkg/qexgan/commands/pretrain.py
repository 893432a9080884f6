"""pretrain-gen and pretrain-disc."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path

from pydantic import BaseModel

from qexgan.commands.artifacts import (
    CORPUS_ARTIFACT,
    EMBEDDINGS_ARTIFACT,
    VOCABULARY_ARTIFACT,
    Phase,
    conditions_artifact,
    discriminator_artifact,
    discriminator_config,
    generator_artifact,
    generator_config,
    history_artifact,
    load_prepared,
)
from qexgan.config import RunConfig
from qexgan.errors import EmptyInputError
from qexgan.locations import REPORTS_DIR
from qexgan.models.checkpoint import load_generator, save_checkpoint
from qexgan.models.discriminator import (
    grid_search_discriminator,
    init_discriminator,
    pretrain_discriminator,
)
from qexgan.models.generator import init_generator, pretrain_generator
from qexgan.models.synthetic import generate_synthetic
from qexgan.store import ArtifactStore, artifact_name
from qexgan.types import DecodeMode, DiscriminatorProtocol, Split, Strategy


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrainingResult:
    checkpoint: Path
    history_path: Path
    history: list[BaseModel]
    extra_reports: tuple[Path, ...] = field(default_factory=tuple)


def prepared_names(strategy: Strategy) -> list[str]:
    return [
        CORPUS_ARTIFACT,
        VOCABULARY_ARTIFACT,
        EMBEDDINGS_ARTIFACT,
        conditions_artifact(strategy),
    ]


def cmd_pretrain_gen(
    config: RunConfig, store: ArtifactStore, epochs: int | None = None
) -> TrainingResult:
    strategy = config.strategy
    prepared = load_prepared(store, config, strategy)
    gen_config = generator_config(config, prepared)
    model = init_generator(
        gen_config, prepared.table.vocabulary_matrix(prepared.vocabulary)
    )
    history = pretrain_generator(
        model,
        prepared.corpus.select(Split.TRAIN),
        prepared.corpus.select(Split.VALID),
        prepared.condition,
        gen_config,
        epochs,
    )

    name = generator_artifact(strategy)
    save_checkpoint(
        store.path(name),
        model,
        "generator",
        gen_config,
        prepared.upstream,
        extra={"strategy": strategy.value, "epochs": len(history)},
    )
    store.record(name, prepared_names(strategy))
    history_path = store.write_jsonl(
        history_artifact("pretrain-gen", strategy), history, [name]
    )
    return TrainingResult(store.path(name), history_path, list(history))


def cmd_pretrain_disc(
    config: RunConfig,
    store: ArtifactStore,
    epochs: int | None = None,
    grid_search: bool = False,
) -> TrainingResult:
    """Pre-train D on real documents against pre-trained G's expanded queries.

    The split that supplies both classes follows the discriminator protocol.
    """
    strategy = config.strategy
    prepared = load_prepared(store, config, strategy)
    generator_name = generator_artifact(strategy, Phase.PRETRAINED)
    store.verify(generator_name)
    generator, _ = load_generator(store.path(generator_name), prepared.upstream)

    protocol = config.discriminator.protocol
    split = Split.TEST if protocol is DiscriminatorProtocol.TEST_SPLIT else Split.TRAIN
    pairs = prepared.corpus.select(split)
    if not pairs:
        raise EmptyInputError(f"the {split.value} split is empty")
    real = [p.document for p in pairs]
    synthetic = generate_synthetic(
        generator,
        pairs,
        prepared.condition,
        prepared.vocabulary,
        DecodeMode.SAMPLE,
        config.seed,
    )

    disc_config = discriminator_config(config, prepared)
    reports: list[Path] = []
    if grid_search:
        search = grid_search_discriminator(
            real, synthetic, prepared.table, config.discriminator_grid, disc_config
        )
        disc_config = search.best
        reports.append(
            store.write_model(
                artifact_name(REPORTS_DIR, f"disc-grid-{strategy.value}.json"),
                search,
                [generator_name],
            )
        )
        logger.info(
            "grid search picked lr=%g dropout=%g epochs=%d batch=%d",
            disc_config.learning_rate,
            disc_config.dropout,
            disc_config.epochs,
            disc_config.batch_size,
        )

    model = init_discriminator(disc_config)
    history = pretrain_discriminator(
        model, real, synthetic, prepared.table, disc_config, epochs
    )

    name = discriminator_artifact(strategy)
    save_checkpoint(
        store.path(name),
        model,
        "discriminator",
        disc_config,
        {**prepared.upstream, generator_name: store.current_hash(generator_name)},
        extra={
            "strategy": strategy.value,
            "protocol": protocol.value,
            "epochs": len(history),
        },
    )
    store.record(name, [*prepared_names(strategy), generator_name])
    history_path = store.write_jsonl(
        history_artifact("pretrain-disc", strategy), history, [name]
    )
    return TrainingResult(store.path(name), history_path, list(history), tuple(reports))
