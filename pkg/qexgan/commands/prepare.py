"""prepare: corpus, vocabulary, reduced embeddings, condition tables and stats."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

from qexgan.commands.artifacts import (
    CORPUS_ARTIFACT,
    EMBEDDINGS_ARTIFACT,
    STATS_ARTIFACT,
    VOCABULARY_ARTIFACT,
    conditions_artifact,
)
from qexgan.conditions.strategies import (
    build_condition_context,
    precompute_condition_table,
    write_condition_table,
)
from qexgan.config import RunConfig
from qexgan.corpus import (
    CorpusStats,
    build_vocabulary,
    corpus_stats,
    load_pairs,
    split_corpus,
    write_corpus,
)
from qexgan.embeddings import (
    EmbeddingTable,
    load_embedding_table,
    reduce_dimensions,
    write_embedding_table,
)
from qexgan.errors import ConfigError, MissingInputError
from qexgan.store import ArtifactStore
from qexgan.types import Strategy


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PrepareResult:
    artifacts: tuple[str, ...]
    stats: CorpusStats
    dropped: int
    strategies: tuple[Strategy, ...]


def _working_table(table: EmbeddingTable, target_dim: int) -> EmbeddingTable:
    if table.dimension < target_dim:
        raise ConfigError(
            f"embedding dimension {table.dimension} is below the generator "
            f"token_dim {target_dim}"
        )
    if table.dimension == target_dim:
        return table
    return reduce_dimensions(table, target_dim)


def cmd_prepare(
    config: RunConfig, store: ArtifactStore, all_strategies: bool = False
) -> PrepareResult:
    if not config.corpus_path:
        raise ConfigError("prepare needs a corpus path (--corpus or corpus_path)")
    if not config.embeddings_path:
        raise ConfigError(
            "prepare needs an embedding file (--embeddings or embeddings_path)"
        )
    corpus_path = Path(config.corpus_path)
    embeddings_path = Path(config.embeddings_path)
    if not embeddings_path.exists():
        raise MissingInputError(embeddings_path, "embedding file")

    raw = load_pairs(corpus_path, config.corpus_format, config.corpus.turkish_casing)
    split = split_corpus(raw, config.corpus.split_ratios, config.seed)
    vocabulary = build_vocabulary(split, config.corpus.min_count)
    corpus = split.encode(vocabulary)

    table = load_embedding_table(embeddings_path, config.embeddings.oov_policy)
    if config.embeddings.restrict_to_vocabulary:
        table = table.restricted_to(vocabulary.id_to_token)
    table = _working_table(table, config.generator.token_dim)

    store.ensure_layout()
    write_corpus(corpus, store.path(CORPUS_ARTIFACT))
    store.record(CORPUS_ARTIFACT)
    store.write_text(
        VOCABULARY_ARTIFACT, vocabulary.to_json() + "\n", [CORPUS_ARTIFACT]
    )
    write_embedding_table(table, store.path(EMBEDDINGS_ARTIFACT))
    store.record(EMBEDDINGS_ARTIFACT, [VOCABULARY_ARTIFACT])
    # conditions are built from the persisted text values, as later loads see them
    table = load_embedding_table(
        store.path(EMBEDDINGS_ARTIFACT), config.embeddings.oov_policy
    )
    stats = corpus_stats(corpus)
    store.write_model(STATS_ARTIFACT, stats, [CORPUS_ARTIFACT])

    strategies = tuple(Strategy) if all_strategies else (config.strategy,)
    context = build_condition_context(
        corpus,
        table,
        strategies,
        config.conditions.k_documents,
        config.conditions.k_words,
        config.conditions.leaf_size,
    )
    written = [
        CORPUS_ARTIFACT,
        VOCABULARY_ARTIFACT,
        EMBEDDINGS_ARTIFACT,
        STATS_ARTIFACT,
    ]
    for strategy in strategies:
        name = conditions_artifact(strategy)
        conditions = precompute_condition_table(
            corpus, strategy, context, config.conditions.workers
        )
        write_condition_table(conditions, store.path(name))
        store.record(name, [CORPUS_ARTIFACT, EMBEDDINGS_ARTIFACT])
        written.append(name)

    logger.info("prepared %d pairs into %s", len(corpus), store.root)
    return PrepareResult(
        artifacts=tuple(written),
        stats=stats,
        dropped=raw.dropped,
        strategies=strategies,
    )
