"""Pre-trained word vectors: loading, PCA reduction, lookup and CBOW averaging."""

from __future__ import annotations

import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from qexgan.corpus import TokenSequence, Vocabulary
from qexgan.errors import (
    DegenerateCovarianceError,
    EmptyInputError,
    MalformedRecordError,
    MissingInputError,
)
from qexgan.types import OovPolicy


logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class EmbeddingTable:
    """Token vectors of one fixed dimension; OOV lookups resolve by policy."""

    tokens: tuple[str, ...]
    matrix: np.ndarray
    oov_policy: OovPolicy = OovPolicy.ZERO
    index: dict[str, int] = field(init=False, repr=False)
    unk_vector: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        matrix = np.asarray(self.matrix, dtype=np.float64)
        if matrix.ndim != 2 or matrix.shape[1] == 0:
            raise ValueError("embedding matrix must be 2-D with positive dimension")
        if matrix.shape[0] != len(self.tokens):
            raise ValueError("one vector per token is required")
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(
            self, "index", {token: i for i, token in enumerate(self.tokens)}
        )
        if self.oov_policy is OovPolicy.UNK_VECTOR and len(self.tokens):
            unk = matrix.mean(axis=0)
        else:
            unk = np.zeros(matrix.shape[1])
        unk.setflags(write=False)
        object.__setattr__(self, "unk_vector", unk)

    @property
    def dimension(self) -> int:
        return int(self.matrix.shape[1])

    def __len__(self) -> int:
        return len(self.tokens)

    def __contains__(self, token: object) -> bool:
        return token in self.index

    def lookup(self, token: str) -> np.ndarray:
        row = self.index.get(token)
        return self.matrix[row] if row is not None else self.unk_vector

    def with_policy(self, oov_policy: OovPolicy) -> EmbeddingTable:
        return EmbeddingTable(self.tokens, self.matrix, oov_policy)

    def restricted_to(self, tokens: Iterable[str]) -> EmbeddingTable:
        """Sub-table holding only `tokens` present in this table, in table order."""
        wanted = set(tokens)
        rows = [i for i, token in enumerate(self.tokens) if token in wanted]
        return EmbeddingTable(
            tuple(self.tokens[i] for i in rows), self.matrix[rows], self.oov_policy
        )

    def vocabulary_matrix(self, vocabulary: Vocabulary) -> np.ndarray:
        """Rows aligned with vocabulary ids; specials resolve through the OOV policy."""
        return np.stack([self.lookup(token) for token in vocabulary.id_to_token])


def load_embedding_table(
    path: str | Path, oov_policy: OovPolicy = OovPolicy.ZERO
) -> EmbeddingTable:
    """Parse a text vector file: optional "count dim" header, then token + floats."""
    path = Path(path)
    if not path.exists():
        raise MissingInputError(path, "embedding file")

    tokens: list[str] = []
    rows: list[list[float]] = []
    seen: set[str] = set()
    dimension: int | None = None
    with open(path, encoding="utf-8") as f:
        for line_number, line in enumerate(f, start=1):
            parts = line.rstrip("\n").rstrip().split(" ")
            if not parts or parts == [""]:
                continue
            is_header = len(parts) == 2 and all(p.isdigit() for p in parts)
            if line_number == 1 and is_header:
                dimension = int(parts[1])
                continue
            token, values = parts[0], parts[1:]
            if dimension is None:
                dimension = len(values)
            if len(values) != dimension:
                raise MalformedRecordError(
                    path,
                    line_number,
                    f"vector length {len(values)} differs from dimension "
                    f"{dimension}",
                )
            try:
                vector = [float(v) for v in values]
            except ValueError as e:
                raise MalformedRecordError(path, line_number, str(e)) from e
            if token in seen:
                continue
            seen.add(token)
            tokens.append(token)
            rows.append(vector)

    if not rows or not dimension:
        raise EmptyInputError(f"no vectors in embedding file {path}")
    return EmbeddingTable(tuple(tokens), np.asarray(rows), oov_policy)


def write_embedding_table(table: EmbeddingTable, path: str | Path) -> None:
    """Write the table in the text vector format, header included."""
    lines = [f"{len(table)} {table.dimension}"]
    for token, vector in zip(table.tokens, table.matrix, strict=True):
        lines.append(token + " " + " ".join(f"{v:.9g}" for v in vector))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def principal_axes(centered: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Covariance eigenvalues (descending) and eigenvectors as columns.

    Each axis is oriented so its largest-magnitude component is positive.
    """
    covariance = centered.T @ centered / centered.shape[0]
    eigenvalues, eigenvectors = np.linalg.eigh(covariance)
    order = np.argsort(eigenvalues, kind="stable")[::-1]
    eigenvalues = np.clip(eigenvalues[order], 0.0, None)
    axes = eigenvectors[:, order]
    pivots = np.argmax(np.abs(axes), axis=0)
    signs = np.sign(axes[pivots, np.arange(axes.shape[1])])
    signs[signs == 0] = 1.0
    return eigenvalues, axes * signs


def covariance_rank(eigenvalues: np.ndarray) -> int:
    if eigenvalues.size == 0 or eigenvalues[0] <= 0:
        return 0
    tolerance = eigenvalues[0] * eigenvalues.size * np.finfo(np.float64).eps
    return int(np.count_nonzero(eigenvalues > tolerance))


def reduce_dimensions(table: EmbeddingTable, target_dim: int) -> EmbeddingTable:
    """Project the mean-centred vectors onto their top principal components."""
    if not 0 < target_dim <= table.dimension:
        raise ValueError(
            f"target dimension {target_dim} must be in 1..{table.dimension}"
        )
    if len(table) < target_dim:
        raise DegenerateCovarianceError(len(table), target_dim)

    centered = table.matrix - table.matrix.mean(axis=0)
    eigenvalues, axes = principal_axes(centered)
    rank = covariance_rank(eigenvalues)
    if rank < target_dim:
        raise DegenerateCovarianceError(rank, target_dim)

    projected = centered @ axes[:, :target_dim]
    logger.info(
        "reduced %d vectors from %d to %d dims",
        len(table),
        table.dimension,
        target_dim,
    )
    return EmbeddingTable(table.tokens, projected, table.oov_policy)


def embed_sequence(
    sequence: TokenSequence | Sequence[str], table: EmbeddingTable
) -> np.ndarray:
    surface = sequence.surface if isinstance(sequence, TokenSequence) else sequence
    if not surface:
        return np.zeros((0, table.dimension))
    return np.stack([table.lookup(token) for token in surface])


def cbow(
    sequence: TokenSequence | Sequence[str],
    table: EmbeddingTable,
    weights: Sequence[float] | None = None,
) -> np.ndarray:
    """Mean embedding, or (Σ w_i e_i) / Σ w_i with weights; zero when undefined."""
    rows = embed_sequence(sequence, table)
    if rows.shape[0] == 0:
        return np.zeros(table.dimension)
    if weights is None:
        return rows.mean(axis=0)

    w = np.asarray(weights, dtype=np.float64)
    if w.shape != (rows.shape[0],):
        raise ValueError("one weight per token is required")
    total = w.sum()
    if total == 0:
        return np.zeros(table.dimension)
    return (w @ rows) / total


def table_fingerprint(table: EmbeddingTable) -> bytes:
    """Stable bytes describing the table, for hashing."""
    header = "\n".join(table.tokens).encode("utf-8")
    return header + table.matrix.astype("<f8").tobytes()
