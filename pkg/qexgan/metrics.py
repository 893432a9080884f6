"""Generator evaluation: CE / perplexity, word coverage, semantic similarity,
and discriminator accuracy.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from pydantic import BaseModel, Field, model_validator

from qexgan.corpus import QueryDocumentPair, TokenSequence, Vocabulary
from qexgan.embeddings import EmbeddingTable, cbow
from qexgan.errors import EmptyInputError
from qexgan.models.discriminator import RealnessScorer
from qexgan.models.generator import (
    ConditionLookup,
    GeneratorModel,
    evaluate_cross_entropy,
    generate,
)
from qexgan.types import DecodeMode


logger = logging.getLogger(__name__)


def cross_entropy_and_perplexity(
    generator: GeneratorModel,
    pairs: Sequence[QueryDocumentPair],
    lookup: ConditionLookup,
    batch_size: int = 64,
) -> tuple[float, float]:
    ce = evaluate_cross_entropy(generator, pairs, lookup, batch_size)
    return ce, math.exp(ce)


def word_coverage(
    expansions: Sequence[TokenSequence], documents: Sequence[TokenSequence]
) -> float:
    """Distinct expansion words over distinct words of the document corpus.

    Values above 1 are legal: expansions may use words the documents lack.
    """
    reference = {token for d in documents for token in d.surface}
    if not reference:
        raise EmptyInputError("word coverage needs a non-empty document corpus")
    generated = {token for e in expansions for token in e.surface}
    return len(generated) / len(reference)


@dataclass(frozen=True)
class SimilarityResult:
    mean: float
    std: float
    skipped: int
    count: int


def semantic_similarity(
    expanded: Sequence[TokenSequence],
    references: Sequence[TokenSequence],
    table: EmbeddingTable,
) -> SimilarityResult:
    """Mean and population std of pairwise CBOW cosines; zero-norm pairs skipped."""
    if len(expanded) != len(references):
        raise ValueError(
            f"{len(expanded)} expanded queries for {len(references)} references"
        )
    cosines = []
    skipped = 0
    for generated, reference in zip(expanded, references, strict=True):
        u, v = cbow(generated, table), cbow(reference, table)
        norms = np.linalg.norm(u) * np.linalg.norm(v)
        if norms == 0:
            skipped += 1
            continue
        cosines.append(float(np.clip(u @ v / norms, -1.0, 1.0)))
    if not cosines:
        raise EmptyInputError("every similarity pair has a zero-norm CBOW vector")
    if skipped:
        logger.warning("skipped %d zero-norm similarity pairs", skipped)
    values = np.asarray(cosines)
    return SimilarityResult(
        mean=float(values.mean()),
        std=float(values.std()),
        skipped=skipped,
        count=len(cosines),
    )


def discriminator_accuracy(
    scorer: RealnessScorer,
    sequences: Sequence[TokenSequence],
    labels: Sequence[bool],
) -> float:
    """Share of correct calls; p > 0.5 means real, a tie counts as synthetic."""
    if not sequences:
        raise EmptyInputError("discriminator accuracy needs labelled sequences")
    if len(sequences) != len(labels):
        raise ValueError("one label per sequence is required")
    predicted = scorer.real_probabilities(sequences) > 0.5
    return float(np.mean(predicted == np.asarray(labels, dtype=bool)))


class EvaluationMetadata(BaseModel):
    strategy: str
    dataset: str = ""
    seed: int = 0
    reward_mode: str = ""
    phase: str = "pretrained"
    discriminator_protocol: str = ""
    similarity_target: str = "query+expansion"
    std_kind: str = "population"
    skipped_similarity_pairs: int = 0
    pair_count: int = 0


class EvaluationReport(BaseModel):
    ce: float
    perplexity: float
    word_coverage: float = Field(ge=0.0)
    semantic_similarity_mean: float = Field(ge=-1.0, le=1.0)
    semantic_similarity_std: float = Field(ge=0.0)
    discriminator_accuracy: float = Field(ge=0.0, le=1.0)
    metadata: EvaluationMetadata

    @model_validator(mode="after")
    def _check_perplexity(self) -> EvaluationReport:
        if abs(self.perplexity - math.exp(self.ce)) > 1e-9 * max(1.0, self.perplexity):
            raise ValueError("perplexity must equal exp(ce)")
        return self

    def table_row(self, label: str | None = None) -> str:
        """CE | PPL | WC | SS(μ, ε)"""
        cells = [
            f"{self.ce:.3f}",
            f"{self.perplexity:.3f}",
            f"{self.word_coverage:.2f}",
            f"({self.semantic_similarity_mean:.3f}, "
            f"{self.semantic_similarity_std:.3f})",
        ]
        if label is not None:
            cells.insert(0, label)
        return " | ".join(cells)


TABLE_HEADER = "CE | PPL | WC | SS(μ, ε)"


def expand_queries(
    generator: GeneratorModel,
    queries: Sequence[TokenSequence],
    lookup: ConditionLookup,
    vocabulary: Vocabulary,
) -> list[TokenSequence]:
    """Greedy expansion terms per query."""
    results = [
        generate(generator, q, lookup(q), vocabulary, DecodeMode.GREEDY)
        for q in queries
    ]
    return [r.expansion_tokens for r in results]


def evaluate_run(
    generator: GeneratorModel,
    scorer: RealnessScorer,
    pairs: Sequence[QueryDocumentPair],
    lookup: ConditionLookup,
    vocabulary: Vocabulary,
    table: EmbeddingTable,
    metadata: EvaluationMetadata,
    expansion_only_similarity: bool = False,
) -> EvaluationReport:
    """Full metric suite over `pairs` with greedy expansions."""
    if not pairs:
        raise EmptyInputError("cannot evaluate an empty split")
    ce, perplexity = cross_entropy_and_perplexity(generator, pairs, lookup)
    expansions = expand_queries(generator, [p.query for p in pairs], lookup, vocabulary)
    documents = [p.document for p in pairs]
    expanded = [p.query + e for p, e in zip(pairs, expansions, strict=True)]

    coverage = word_coverage(expansions, documents)
    similarity = semantic_similarity(
        expansions if expansion_only_similarity else expanded, documents, table
    )
    accuracy = discriminator_accuracy(
        scorer,
        [*documents, *expanded],
        [True] * len(documents) + [False] * len(expanded),
    )
    return EvaluationReport(
        ce=ce,
        perplexity=perplexity,
        word_coverage=coverage,
        semantic_similarity_mean=similarity.mean,
        semantic_similarity_std=similarity.std,
        discriminator_accuracy=accuracy,
        metadata=metadata.model_copy(
            update={
                "similarity_target": (
                    "expansion" if expansion_only_similarity else "query+expansion"
                ),
                "skipped_similarity_pairs": similarity.skipped,
                "pair_count": len(pairs),
            }
        ),
    )
