"""evaluate: the metric suite over the test split, one row per strategy."""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path

from qexgan.commands.artifacts import (
    Phase,
    discriminator_artifact,
    evaluation_artifact,
    generator_artifact,
    load_phase_generator,
    load_prepared,
)
from qexgan.commands.pretrain import prepared_names
from qexgan.config import RunConfig
from qexgan.metrics import EvaluationMetadata, EvaluationReport, evaluate_run
from qexgan.models.checkpoint import load_discriminator
from qexgan.models.discriminator import DiscriminatorScorer
from qexgan.store import ArtifactStore
from qexgan.types import Split, Strategy


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EvaluateResult:
    rows: list[tuple[str, EvaluationReport]]
    reports: list[Path]


def _evaluate_strategy(
    config: RunConfig, store: ArtifactStore, strategy: Strategy, phase: Phase
) -> tuple[EvaluationReport, Path]:
    prepared = load_prepared(store, config, strategy)
    generator, resolved, generator_meta = load_phase_generator(store, prepared, phase)
    discriminator_name = discriminator_artifact(strategy)
    store.verify(discriminator_name)
    discriminator, discriminator_meta = load_discriminator(
        store.path(discriminator_name), prepared.upstream
    )

    metadata = EvaluationMetadata(
        strategy=strategy.value,
        dataset=Path(config.corpus_path).name if config.corpus_path else "",
        seed=config.seed,
        reward_mode=str(generator_meta.extra.get("reward_mode", "")),
        phase=resolved.value,
        discriminator_protocol=str(discriminator_meta.extra.get("protocol", "")),
    )
    report = evaluate_run(
        generator,
        DiscriminatorScorer(discriminator, prepared.table),
        prepared.corpus.select(Split.TEST),
        prepared.condition,
        prepared.vocabulary,
        prepared.table,
        metadata,
        config.evaluation.expansion_only_similarity,
    )
    path = store.write_model(
        evaluation_artifact(strategy, resolved),
        report,
        [
            *prepared_names(strategy),
            generator_artifact(strategy, resolved),
            discriminator_name,
        ],
    )
    return report, path


def cmd_evaluate(
    config: RunConfig,
    store: ArtifactStore,
    strategies: Sequence[Strategy] | None = None,
    phase: Phase = Phase.AUTO,
) -> EvaluateResult:
    """Evaluate each strategy's generator; several strategies give a comparison."""
    selected = list(dict.fromkeys(strategies or [config.strategy]))
    rows: list[tuple[str, EvaluationReport]] = []
    reports: list[Path] = []
    for strategy in selected:
        report, path = _evaluate_strategy(config, store, strategy, phase)
        logger.info("%s: %s", strategy.value, report.table_row())
        rows.append((strategy.display_name, report))
        reports.append(path)
    return EvaluateResult(rows, reports)
