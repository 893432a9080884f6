"""Condition vectors for the generator and their precomputed lookup table."""

from __future__ import annotations

import json
import logging
from collections.abc import Iterator, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from qexgan.conditions.ball_tree import BallTree, build_ball_tree, nearest
from qexgan.conditions.tfidf import TfIdfModel, fit_tfidf
from qexgan.corpus import PairCorpus, TokenSequence
from qexgan.embeddings import EmbeddingTable, cbow
from qexgan.errors import (
    ConditionCoverageError,
    EmptyInputError,
    MalformedRecordError,
    MissingConditionArtifact,
)
from qexgan.types import Split, Strategy


logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ConditionVector:
    values: np.ndarray
    strategy: Strategy
    empty_query: bool = False

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 1:
            raise ValueError("a condition vector is one-dimensional")
        if not np.all(np.isfinite(values)):
            raise ValueError("condition vector entries must be finite")
        object.__setattr__(self, "values", values)

    @property
    def dimension(self) -> int:
        return int(self.values.shape[0])


@dataclass(frozen=True, eq=False)
class ConditionContext:
    """Read-only artifacts the strategies draw on."""

    table: EmbeddingTable
    tfidf: TfIdfModel | None = None
    document_tree: BallTree | None = None
    document_cbows: np.ndarray | None = None
    word_tree: BallTree | None = None
    words: tuple[str, ...] = ()
    k_documents: int = 1
    k_words: int = 5

    @property
    def dimension(self) -> int:
        return self.table.dimension


def build_condition_context(
    corpus: PairCorpus,
    table: EmbeddingTable,
    strategies: Sequence[Strategy],
    k_documents: int = 1,
    k_words: int = 5,
    leaf_size: int = 16,
) -> ConditionContext:
    """Fit only the artifacts `strategies` need, over the training documents."""
    documents = [p.document for p in corpus.select(Split.TRAIN, Split.VALID)]
    if not documents:
        raise EmptyInputError("no training or validation documents to index")

    tfidf = document_tree = document_cbows = word_tree = None
    words: tuple[str, ...] = ()
    if Strategy.TFIDF in strategies:
        tfidf = fit_tfidf(documents)
    if Strategy.DOC_SIM in strategies:
        document_cbows = np.stack([cbow(d, table) for d in documents])
        document_tree = build_ball_tree(document_cbows, leaf_size)
    if Strategy.WORD_SIM in strategies:
        seen = dict.fromkeys(t for d in documents for t in d.surface)
        words = tuple(t for t in seen if t in table)
        if not words:
            raise MissingConditionArtifact(
                "no document word has a vector in the embedding table"
            )
        word_tree = build_ball_tree(
            np.stack([table.lookup(w) for w in words]), leaf_size
        )
    return ConditionContext(
        table=table,
        tfidf=tfidf,
        document_tree=document_tree,
        document_cbows=document_cbows,
        word_tree=word_tree,
        words=words,
        k_documents=k_documents,
        k_words=k_words,
    )


def make_condition(
    query: TokenSequence, strategy: Strategy, context: ConditionContext
) -> ConditionVector:
    if not query.surface:
        return ConditionVector(np.zeros(context.dimension), strategy, empty_query=True)

    if strategy is Strategy.SELF:
        return ConditionVector(cbow(query, context.table), strategy)

    if strategy is Strategy.TFIDF:
        if context.tfidf is None:
            raise MissingConditionArtifact("tfidf strategy needs a fitted TF-IDF model")
        terms, weights = context.tfidf.query_weights(query)
        return ConditionVector(cbow(terms, context.table, weights), strategy)

    query_cbow = cbow(query, context.table)
    if strategy is Strategy.DOC_SIM:
        if context.document_tree is None or context.document_cbows is None:
            raise MissingConditionArtifact("doc_sim strategy needs a document tree")
        found = nearest(context.document_tree, query_cbow, context.k_documents)
        neighbours = context.document_cbows[list(found.indices)]
        return ConditionVector(neighbours.mean(axis=0), strategy)

    if strategy is Strategy.WORD_SIM:
        if context.word_tree is None:
            raise MissingConditionArtifact("word_sim strategy needs a word tree")
        found = nearest(context.word_tree, query_cbow, context.k_words)
        neighbours = context.word_tree.points[list(found.indices)]
        return ConditionVector(neighbours.mean(axis=0), strategy)

    raise ValueError(f"unknown strategy {strategy}")


@dataclass(frozen=True, eq=False)
class ConditionTable:
    """Query string → condition vector, one strategy per table.

    Lookups of unseen queries fall back to computing the condition, so the
    table acts as a cache rather than an oracle.
    """

    strategy: Strategy
    entries: dict[str, ConditionVector]
    metadata: dict[str, str] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, query: object) -> bool:
        key = query.text if isinstance(query, TokenSequence) else query
        return key in self.entries

    def __iter__(self) -> Iterator[str]:
        return iter(self.entries)

    def __getitem__(self, query: str | TokenSequence) -> ConditionVector:
        key = query.text if isinstance(query, TokenSequence) else query
        return self.entries[key]

    @property
    def dimension(self) -> int:
        first = next(iter(self.entries.values()), None)
        return first.dimension if first is not None else 0

    def resolve(
        self, query: TokenSequence, context: ConditionContext | None = None
    ) -> ConditionVector:
        cached = self.entries.get(query.text)
        if cached is not None:
            return cached
        if context is None:
            raise ConditionCoverageError(
                f"no {self.strategy.value} condition for query '{query.text}'"
            )
        logger.debug("condition cache miss for '%s'", query.text)
        return make_condition(query, self.strategy, context)


def precompute_condition_table(
    corpus: PairCorpus,
    strategy: Strategy,
    context: ConditionContext,
    workers: int = 1,
    metadata: dict[str, str] | None = None,
) -> ConditionTable:
    """One entry per distinct train/valid query string, in first-occurrence order."""
    queries = corpus.distinct_queries(Split.TRAIN, Split.VALID)

    def compute(query: TokenSequence) -> ConditionVector:
        return make_condition(query, strategy, context)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            vectors = list(pool.map(compute, queries))
    else:
        vectors = [compute(q) for q in queries]

    entries = {q.text: v for q, v in zip(queries, vectors, strict=True)}
    logger.info("precomputed %d %s conditions", len(entries), strategy.value)
    return ConditionTable(strategy, entries, dict(metadata or {}))


def write_condition_table(table: ConditionTable, path: str | Path) -> None:
    lines = [
        json.dumps(
            {
                "query": query,
                "strategy": table.strategy.value,
                "vector": [float(f"{v:.9g}") for v in vector.values],
            },
            ensure_ascii=False,
        )
        for query, vector in table.entries.items()
    ]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_condition_table(
    path: str | Path, metadata: dict[str, str] | None = None
) -> ConditionTable:
    entries: dict[str, ConditionVector] = {}
    strategy: Strategy | None = None
    with open(path, encoding="utf-8") as f:
        for line_number, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
                line_strategy = Strategy(record["strategy"])
                vector = ConditionVector(np.asarray(record["vector"]), line_strategy)
            except (json.JSONDecodeError, KeyError, ValueError) as e:
                raise MalformedRecordError(path, line_number, str(e)) from e
            if strategy is None:
                strategy = line_strategy
            elif strategy is not line_strategy:
                raise MalformedRecordError(
                    path, line_number, "a condition table holds a single strategy"
                )
            entries[record["query"]] = vector
    if strategy is None:
        raise EmptyInputError(f"condition table {path} is empty")
    return ConditionTable(strategy, entries, dict(metadata or {}))
