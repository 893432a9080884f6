"""Single-layer LSTM classifier separating real documents from expanded queries.

The discriminator reads fixed word vectors from the embedding table and owns
no embedding parameters of its own. It never sees a condition vector.
"""

from __future__ import annotations

import itertools
import logging
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from typing import Protocol

import numpy as np
import torch
import torch.nn.functional as F
from pydantic import BaseModel
from torch import nn
from torch.nn.utils.rnn import pack_padded_sequence

from qexgan.config import DiscriminatorConfig, DiscriminatorGrid
from qexgan.corpus import PAD_TOKEN, TokenSequence
from qexgan.embeddings import EmbeddingTable, embed_sequence
from qexgan.errors import EmptyInputError
from qexgan.models.seeding import seeded


logger = logging.getLogger(__name__)

REAL_LABEL = 1.0
SYNTHETIC_LABEL = 0.0


class DiscriminatorModel(nn.Module):
    def __init__(self, config: DiscriminatorConfig) -> None:
        super().__init__()
        self.config = config
        self.lstm = nn.LSTM(
            config.token_dim,
            config.lstm_hidden,
            num_layers=config.layers,
            batch_first=True,
            dropout=config.dropout if config.layers > 1 else 0.0,
        )
        self.dropout = nn.Dropout(config.dropout)
        self.output = nn.Linear(config.lstm_hidden, 1)

    def forward(self, inputs: torch.Tensor, lengths: torch.Tensor) -> torch.Tensor:
        """(B, T, token_dim) inputs with true lengths → (B,) logits."""
        packed = pack_padded_sequence(
            inputs, lengths.cpu(), batch_first=True, enforce_sorted=False
        )
        _, (hidden, _) = self.lstm(packed)
        return self.output(self.dropout(hidden[-1])).squeeze(-1)


class DiscriminatorEpoch(BaseModel):
    epoch: int
    loss: float
    accuracy: float


def init_discriminator(config: DiscriminatorConfig) -> DiscriminatorModel:
    with seeded(config.seed):
        return DiscriminatorModel(config)


def _without_trailing_padding(sequence: TokenSequence) -> tuple[str, ...]:
    end = len(sequence.surface)
    while end and sequence.surface[end - 1] == PAD_TOKEN:
        end -= 1
    return sequence.surface[:end]


def embed_batch(
    model: DiscriminatorModel,
    sequences: Sequence[TokenSequence],
    table: EmbeddingTable,
) -> tuple[torch.Tensor, torch.Tensor]:
    """Zero-padded (B, T, token_dim) inputs and their lengths.

    Trailing PAD tokens are padding, not content, and are dropped first.
    """
    if table.dimension != model.config.token_dim:
        raise ValueError(
            f"embedding dimension {table.dimension} does not match "
            f"discriminator token_dim {model.config.token_dim}"
        )
    surfaces = [_without_trailing_padding(s) for s in sequences]
    if any(len(s) == 0 for s in surfaces):
        raise EmptyInputError("the discriminator cannot classify an empty sequence")
    parameter = next(model.parameters())
    width = max(len(s) for s in surfaces)
    inputs = np.zeros((len(surfaces), width, table.dimension))
    for row, surface in enumerate(surfaces):
        inputs[row, : len(surface)] = embed_sequence(surface, table)
    lengths = torch.tensor([len(s) for s in surfaces], dtype=torch.long)
    return (
        torch.as_tensor(inputs, dtype=parameter.dtype, device=parameter.device),
        lengths,
    )


def logits(
    model: DiscriminatorModel,
    sequences: Sequence[TokenSequence],
    table: EmbeddingTable,
) -> torch.Tensor:
    inputs, lengths = embed_batch(model, sequences, table)
    return model(inputs, lengths)


@torch.no_grad()
def real_probabilities(
    model: DiscriminatorModel,
    sequences: Sequence[TokenSequence],
    table: EmbeddingTable,
    batch_size: int = 256,
) -> np.ndarray:
    """Probability-real per sequence, in eval mode."""
    was_training = model.training
    model.eval()
    try:
        chunks = [
            torch.sigmoid(logits(model, sequences[i : i + batch_size], table))
            .double()
            .cpu()
            .numpy()
            for i in range(0, len(sequences), batch_size)
        ]
    finally:
        model.train(was_training)
    return np.concatenate(chunks) if chunks else np.zeros(0)


def classify(
    model: DiscriminatorModel, sequence: TokenSequence, table: EmbeddingTable
) -> float:
    return float(real_probabilities(model, [sequence], table)[0])


def bce_loss(
    model: DiscriminatorModel,
    sequences: Sequence[TokenSequence],
    labels: Sequence[float],
    table: EmbeddingTable,
) -> torch.Tensor:
    """Mean binary cross-entropy; label 1 is a real document."""
    scores = logits(model, sequences, table)
    targets = torch.as_tensor(labels, dtype=scores.dtype, device=scores.device)
    return F.binary_cross_entropy_with_logits(scores, targets)


class RealnessScorer(Protocol):
    """Anything that maps sequences to probability-real scores."""

    def real_probabilities(self, sequences: Sequence[TokenSequence]) -> np.ndarray: ...


@dataclass(frozen=True, eq=False)
class DiscriminatorScorer:
    model: DiscriminatorModel
    table: EmbeddingTable

    def real_probabilities(self, sequences: Sequence[TokenSequence]) -> np.ndarray:
        return real_probabilities(self.model, sequences, self.table)


def _balanced_epoch(
    real: Sequence[TokenSequence],
    synthetic: Sequence[TokenSequence],
    rng: np.random.Generator,
) -> tuple[list[TokenSequence], list[float]]:
    """Shuffle each class, truncate the larger one, interleave the two."""
    n = min(len(real), len(synthetic))
    real_order = rng.permutation(len(real))[:n]
    synthetic_order = rng.permutation(len(synthetic))[:n]
    sequences: list[TokenSequence] = []
    labels: list[float] = []
    for r, s in zip(real_order, synthetic_order, strict=True):
        sequences += [real[r], synthetic[s]]
        labels += [REAL_LABEL, SYNTHETIC_LABEL]
    return sequences, labels


def pretrain_discriminator(
    model: DiscriminatorModel,
    real: Sequence[TokenSequence],
    synthetic: Sequence[TokenSequence],
    table: EmbeddingTable,
    config: DiscriminatorConfig,
    epochs: int | None = None,
    on_epoch: Callable[[DiscriminatorEpoch], None] | None = None,
) -> list[DiscriminatorEpoch]:
    """Adam on balanced batches; each batch holds as many real as synthetic rows."""
    if not real:
        raise EmptyInputError("no real documents for discriminator pre-training")
    if not synthetic:
        raise EmptyInputError("no synthetic sequences for discriminator pre-training")

    optimizer = torch.optim.Adam(model.parameters(), lr=config.learning_rate)
    shuffler = np.random.default_rng(config.seed)
    # even batch width keeps the interleaved classes paired
    batch_size = config.batch_size - config.batch_size % 2
    history: list[DiscriminatorEpoch] = []
    with seeded(config.seed):
        for epoch in range(1, (epochs or config.epochs) + 1):
            model.train()
            sequences, labels = _balanced_epoch(real, synthetic, shuffler)
            total = 0.0
            for start in range(0, len(sequences), batch_size):
                batch = sequences[start : start + batch_size]
                loss = bce_loss(model, batch, labels[start : start + batch_size], table)
                optimizer.zero_grad()
                loss.backward()
                optimizer.step()
                total += float(loss) * len(batch)

            predictions = real_probabilities(model, sequences, table) > 0.5
            accuracy = float(np.mean(predictions == np.asarray(labels, dtype=bool)))
            record = DiscriminatorEpoch(
                epoch=epoch, loss=total / len(sequences), accuracy=accuracy
            )
            logger.info(
                "discriminator epoch %d: loss %.4f, accuracy %.3f",
                epoch,
                record.loss,
                accuracy,
            )
            history.append(record)
            if on_epoch is not None:
                on_epoch(record)
    return history


class GridPointResult(BaseModel):
    learning_rate: float
    dropout: float
    epochs: int
    batch_size: int
    validation_loss: float
    validation_accuracy: float


class GridSearchResult(BaseModel):
    best: DiscriminatorConfig
    results: list[GridPointResult]


def _holdout(
    items: Sequence[TokenSequence], fraction: float, rng: np.random.Generator
) -> tuple[list[TokenSequence], list[TokenSequence]]:
    order = rng.permutation(len(items))
    cut = max(1, int(round(len(items) * fraction)))
    if cut >= len(items):
        raise EmptyInputError("too few sequences to hold out a validation part")
    return [items[i] for i in order[cut:]], [items[i] for i in order[:cut]]


def grid_search_discriminator(
    real: Sequence[TokenSequence],
    synthetic: Sequence[TokenSequence],
    table: EmbeddingTable,
    grid: DiscriminatorGrid,
    config: DiscriminatorConfig,
) -> GridSearchResult:
    """Train one discriminator per grid point; lowest hold-out loss wins."""
    rng = np.random.default_rng(config.seed)
    real_train, real_valid = _holdout(real, grid.holdout_fraction, rng)
    synthetic_train, synthetic_valid = _holdout(synthetic, grid.holdout_fraction, rng)
    valid_sequences = [*real_valid, *synthetic_valid]
    valid_labels = [REAL_LABEL] * len(real_valid) + [SYNTHETIC_LABEL] * len(
        synthetic_valid
    )

    results: list[GridPointResult] = []
    best: tuple[float, DiscriminatorConfig] | None = None
    for learning_rate, dropout, epochs, batch_size in itertools.product(
        grid.learning_rates, grid.dropouts, grid.epochs, grid.batch_sizes
    ):
        candidate = config.model_copy(
            update={
                "learning_rate": learning_rate,
                "dropout": dropout,
                "epochs": epochs,
                "batch_size": batch_size,
            }
        )
        model = init_discriminator(candidate)
        pretrain_discriminator(model, real_train, synthetic_train, table, candidate)
        model.eval()
        with torch.no_grad():
            loss = float(bce_loss(model, valid_sequences, valid_labels, table))
        predictions = real_probabilities(model, valid_sequences, table) > 0.5
        accuracy = float(np.mean(predictions == np.asarray(valid_labels, dtype=bool)))
        results.append(
            GridPointResult(
                learning_rate=learning_rate,
                dropout=dropout,
                epochs=epochs,
                batch_size=batch_size,
                validation_loss=loss,
                validation_accuracy=accuracy,
            )
        )
        logger.info(
            "grid point lr=%g dropout=%g epochs=%d batch=%d: loss %.4f",
            learning_rate,
            dropout,
            epochs,
            batch_size,
            loss,
        )
        if best is None or loss < best[0]:
            best = (loss, candidate)

    if best is None:
        raise EmptyInputError("the discriminator grid is empty")
    return GridSearchResult(best=best[1], results=results)
