"""Smoothed TF-IDF weights over the document corpus."""

from __future__ import annotations

import math
from collections import Counter
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from sklearn.feature_extraction.text import CountVectorizer, TfidfTransformer

from qexgan.corpus import TokenSequence
from qexgan.errors import EmptyInputError


def _pretokenized(sequence: TokenSequence) -> tuple[str, ...]:
    return sequence.surface


@dataclass(frozen=True)
class TfIdfModel:
    document_frequency: dict[str, int]
    document_count: int
    idf: dict[str, float]

    def idf_of(self, token: str) -> float:
        """Smoothed idf; tokens never seen in a document get df = 0."""
        known = self.idf.get(token)
        if known is not None:
            return known
        return math.log((1 + self.document_count) / 1) + 1.0

    def query_weights(
        self, query: TokenSequence
    ) -> tuple[tuple[str, ...], list[float]]:
        """Distinct query terms, first-seen order, each weighted tf(t) * idf(t).

        A repeated token counts once here; its tf carries the repetition.
        """
        tf = Counter(query.surface)
        terms = tuple(tf)
        return terms, [tf[term] * self.idf_of(term) for term in terms]


def fit_tfidf(documents: Sequence[TokenSequence]) -> TfIdfModel:
    """idf(t) = ln((1 + N) / (1 + df(t))) + 1 over N documents."""
    if not documents:
        raise EmptyInputError("cannot fit TF-IDF on an empty document list")

    vectorizer = CountVectorizer(analyzer=_pretokenized, binary=True)
    presence = vectorizer.fit_transform(documents)
    transformer = TfidfTransformer(smooth_idf=True).fit(presence)

    vocabulary = vectorizer.get_feature_names_out()
    df = np.asarray(presence.sum(axis=0)).ravel()
    return TfIdfModel(
        document_frequency={t: int(c) for t, c in zip(vocabulary, df, strict=True)},
        document_count=len(documents),
        idf={
            t: float(v) for t, v in zip(vocabulary, transformer.idf_, strict=True)
        },
    )
