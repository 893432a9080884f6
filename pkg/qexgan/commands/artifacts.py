"""Loading prepared workdir artifacts and deriving model configs from them."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from qexgan.conditions.strategies import (
    ConditionContext,
    ConditionTable,
    ConditionVector,
    build_condition_context,
    read_condition_table,
)
from qexgan.config import (
    DiscriminatorConfig,
    GeneratorConfig,
    RunConfig,
    build_config,
)
from qexgan.corpus import PairCorpus, TokenSequence, Vocabulary, read_corpus
from qexgan.embeddings import EmbeddingTable, load_embedding_table
from qexgan.errors import ConfigError, MissingConditionArtifact
from qexgan.locations import (
    ARTIFACTS_DIR,
    CHECKPOINTS_DIR,
    CORPUS_FILE,
    EMBEDDINGS_FILE,
    REPORTS_DIR,
    STATS_FILE,
    VOCABULARY_FILE,
    condition_table_file,
    discriminator_checkpoint_file,
    evaluation_file,
    generator_checkpoint_file,
    history_file,
)
from qexgan.models.checkpoint import CheckpointMeta, load_generator
from qexgan.models.generator import GeneratorModel
from qexgan.store import ArtifactStore, artifact_name
from qexgan.types import Strategy


CORPUS_ARTIFACT = artifact_name(ARTIFACTS_DIR, CORPUS_FILE)
VOCABULARY_ARTIFACT = artifact_name(ARTIFACTS_DIR, VOCABULARY_FILE)
EMBEDDINGS_ARTIFACT = artifact_name(ARTIFACTS_DIR, EMBEDDINGS_FILE)
STATS_ARTIFACT = artifact_name(ARTIFACTS_DIR, STATS_FILE)


class Phase(Enum):
    """Which generator checkpoint a command reads."""

    AUTO = "auto"
    PRETRAINED = "pretrained"
    ADVERSARIAL = "adversarial"
    ADVERSARIAL_BEST = "adversarial-best"


def conditions_artifact(strategy: Strategy) -> str:
    return artifact_name(ARTIFACTS_DIR, condition_table_file(strategy.value))


def generator_artifact(strategy: Strategy, phase: Phase = Phase.PRETRAINED) -> str:
    suffix = "" if phase is Phase.PRETRAINED else phase.value
    return artifact_name(
        CHECKPOINTS_DIR, generator_checkpoint_file(strategy.value, suffix)
    )


def discriminator_artifact(strategy: Strategy) -> str:
    return artifact_name(CHECKPOINTS_DIR, discriminator_checkpoint_file(strategy.value))


def history_artifact(command: str, strategy: Strategy) -> str:
    return artifact_name(REPORTS_DIR, history_file(command, strategy.value))


def evaluation_artifact(strategy: Strategy, phase: Phase) -> str:
    return artifact_name(REPORTS_DIR, evaluation_file(strategy.value, phase.value))


def resolve_phase(store: ArtifactStore, strategy: Strategy, phase: Phase) -> Phase:
    """AUTO picks the best adversarial checkpoint when one exists."""
    if phase is not Phase.AUTO:
        return phase
    best = generator_artifact(strategy, Phase.ADVERSARIAL_BEST)
    return Phase.ADVERSARIAL_BEST if store.path(best).exists() else Phase.PRETRAINED


@dataclass(frozen=True, eq=False)
class PreparedArtifacts:
    strategy: Strategy
    corpus: PairCorpus
    vocabulary: Vocabulary
    table: EmbeddingTable
    conditions: ConditionTable
    context: ConditionContext
    upstream: dict[str, str]

    def condition(self, query: TokenSequence) -> ConditionVector:
        """Cached condition, or one computed on the fly for unseen queries."""
        return self.conditions.resolve(query, self.context)


def load_prepared(
    store: ArtifactStore, config: RunConfig, strategy: Strategy
) -> PreparedArtifacts:
    condition_name = conditions_artifact(strategy)
    if not store.path(condition_name).exists():
        raise MissingConditionArtifact(
            f"no {strategy.value} condition table in {store.root}; run "
            f"'qexgan prepare --strategy {strategy.cli_name}' first"
        )
    names = [CORPUS_ARTIFACT, VOCABULARY_ARTIFACT, EMBEDDINGS_ARTIFACT, condition_name]
    upstream = store.upstream_hashes(names)

    vocabulary = Vocabulary.from_json(
        store.path(VOCABULARY_ARTIFACT).read_text(encoding="utf-8")
    )
    corpus = read_corpus(store.path(CORPUS_ARTIFACT), vocabulary)
    table = load_embedding_table(
        store.path(EMBEDDINGS_ARTIFACT), config.embeddings.oov_policy
    )
    conditions = read_condition_table(
        store.path(condition_name),
        {
            "corpus": upstream[CORPUS_ARTIFACT],
            "embeddings": upstream[EMBEDDINGS_ARTIFACT],
        },
    )
    if conditions.strategy is not strategy:
        raise MissingConditionArtifact(
            f"{condition_name} holds {conditions.strategy.value} conditions"
        )
    context = build_condition_context(
        corpus,
        table,
        [strategy],
        config.conditions.k_documents,
        config.conditions.k_words,
        config.conditions.leaf_size,
    )
    return PreparedArtifacts(
        strategy=strategy,
        corpus=corpus,
        vocabulary=vocabulary,
        table=table,
        conditions=conditions,
        context=context,
        upstream=upstream,
    )


def generator_config(config: RunConfig, prepared: PreparedArtifacts) -> GeneratorConfig:
    """The run's generator config sized to the prepared vocabulary and table."""
    dimension = prepared.table.dimension
    base = config.generator
    if base.token_dim != dimension or base.condition_dim != dimension:
        raise ConfigError(
            f"generator token_dim {base.token_dim} and condition_dim "
            f"{base.condition_dim} must match the prepared embedding dimension "
            f"{dimension}"
        )
    values = base.model_dump()
    values["vocab_size"] = prepared.vocabulary.size
    return build_config(GeneratorConfig, **values)  # type: ignore[return-value]


def discriminator_config(
    config: RunConfig, prepared: PreparedArtifacts
) -> DiscriminatorConfig:
    values = config.discriminator.model_dump()
    values["token_dim"] = prepared.table.dimension
    return build_config(DiscriminatorConfig, **values)  # type: ignore[return-value]


def load_phase_generator(
    store: ArtifactStore, prepared: PreparedArtifacts, phase: Phase
) -> tuple[GeneratorModel, Phase, CheckpointMeta]:
    """The generator checkpoint for `phase`, after checking its upstream hashes."""
    resolved = resolve_phase(store, prepared.strategy, phase)
    name = generator_artifact(prepared.strategy, resolved)
    store.verify(name)
    model, meta = load_generator(store.path(name), prepared.upstream)
    return model, resolved, meta
