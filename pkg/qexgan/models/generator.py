"""Conditional transformer encoder-decoder that generates expansion terms.

Every encoder and decoder input position is a token embedding concatenated
with the query-level condition vector, plus a sinusoidal position code.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np
import torch
import torch.nn.functional as F
from pydantic import BaseModel
from torch import nn

from qexgan.conditions.strategies import ConditionVector
from qexgan.config import GeneratorConfig
from qexgan.corpus import (
    BOS_ID,
    EOS_ID,
    PAD_ID,
    QueryDocumentPair,
    TokenSequence,
    Vocabulary,
)
from qexgan.errors import ConditionCoverageError, EmptyInputError
from qexgan.models.seeding import seeded
from qexgan.types import DecodeMode


logger = logging.getLogger(__name__)

ConditionLookup = Callable[[TokenSequence], ConditionVector]


def sinusoidal_table(length: int, dim: int) -> torch.Tensor:
    position = torch.arange(length, dtype=torch.float64).unsqueeze(1)
    rate = torch.exp(
        torch.arange(0, dim, 2, dtype=torch.float64) * (-math.log(10000.0) / dim)
    )
    table = torch.zeros(length, dim, dtype=torch.float64)
    table[:, 0::2] = torch.sin(position * rate)
    table[:, 1::2] = torch.cos(position * rate[: dim // 2])
    return table


class GeneratorModel(nn.Module):
    def __init__(self, config: GeneratorConfig) -> None:
        super().__init__()
        self.config = config
        d_model = config.model_input_dim
        self.embedding = nn.Embedding(
            config.vocab_size, config.token_dim, padding_idx=PAD_ID
        )
        self.encoder = nn.TransformerEncoder(
            nn.TransformerEncoderLayer(
                d_model,
                config.attention_heads,
                dim_feedforward=config.hidden_dim,
                dropout=config.dropout,
                batch_first=True,
            ),
            config.encoder_layers,
            enable_nested_tensor=False,
        )
        self.decoder = nn.TransformerDecoder(
            nn.TransformerDecoderLayer(
                d_model,
                config.attention_heads,
                dim_feedforward=config.hidden_dim,
                dropout=config.dropout,
                batch_first=True,
            ),
            config.decoder_layers,
        )
        self.output = nn.Linear(d_model, config.vocab_size)
        # +1 covers the BOS position in front of a full-length expansion
        positions = max(config.max_expansion_len + 1, 512)
        self.register_buffer(
            "positional", sinusoidal_table(positions, d_model).float(), persistent=False
        )

    def _inputs(self, ids: torch.Tensor, conditions: torch.Tensor) -> torch.Tensor:
        """(B, T) ids + (B, C) conditions → (B, T, token_dim + C) with positions."""
        tokens = self.embedding(ids)
        broadcast = conditions.unsqueeze(1).expand(-1, ids.shape[1], -1)
        joined = torch.cat([tokens, broadcast.to(tokens.dtype)], dim=-1)
        if ids.shape[1] > self.positional.shape[0]:
            self.positional = sinusoidal_table(ids.shape[1], joined.shape[-1]).to(
                joined.dtype
            )
        return joined + self.positional[: ids.shape[1]].to(joined.dtype)

    def encode(
        self, query_ids: torch.Tensor, conditions: torch.Tensor
    ) -> tuple[torch.Tensor, torch.Tensor]:
        """Encoder memory and its key padding mask."""
        padding = query_ids.eq(PAD_ID)
        memory = self.encoder(
            self._inputs(query_ids, conditions), src_key_padding_mask=padding
        )
        return memory, padding

    def decode(
        self,
        memory: torch.Tensor,
        memory_padding: torch.Tensor,
        decoder_ids: torch.Tensor,
        conditions: torch.Tensor,
    ) -> torch.Tensor:
        """Logits (B, T, V) for every decoder position under a causal mask."""
        length = decoder_ids.shape[1]
        causal = torch.triu(
            torch.ones(length, length, dtype=torch.bool, device=memory.device),
            diagonal=1,
        )
        hidden = self.decoder(
            self._inputs(decoder_ids, conditions),
            memory,
            tgt_mask=causal,
            tgt_key_padding_mask=decoder_ids.eq(PAD_ID),
            memory_key_padding_mask=memory_padding,
        )
        return self.output(hidden)

    def forward(
        self,
        query_ids: torch.Tensor,
        conditions: torch.Tensor,
        decoder_ids: torch.Tensor,
    ) -> torch.Tensor:
        memory, padding = self.encode(query_ids, conditions)
        return self.decode(memory, padding, decoder_ids, conditions)


@dataclass(frozen=True)
class GenerationResult:
    expansion_tokens: TokenSequence
    stepwise_logprobs: tuple[float, ...]
    finished: bool

    @property
    def total_logprob(self) -> float:
        return float(sum(self.stepwise_logprobs))


class EpochRecord(BaseModel):
    epoch: int
    train_ce: float
    valid_ce: float
    valid_ppl: float


def init_generator(
    config: GeneratorConfig, embeddings: np.ndarray | None = None
) -> GeneratorModel:
    """Seeded model; Linear weights are uniform in ±1/sqrt(fan_in).

    `embeddings` (vocab_size x token_dim), when given, initialises the token
    embedding rows.
    """
    with seeded(config.seed):
        model = GeneratorModel(config)
        for module in model.modules():
            if isinstance(module, nn.Linear):
                bound = 1.0 / math.sqrt(module.in_features)
                nn.init.uniform_(module.weight, -bound, bound)
                if module.bias is not None:
                    nn.init.uniform_(module.bias, -bound, bound)
        if embeddings is not None:
            if embeddings.shape != (config.vocab_size, config.token_dim):
                raise ValueError(
                    f"embedding matrix shape {embeddings.shape} does not match "
                    f"({config.vocab_size}, {config.token_dim})"
                )
            with torch.no_grad():
                known = torch.as_tensor(embeddings, dtype=torch.float32)
                has_vector = known.abs().sum(dim=1) > 0
                model.embedding.weight[has_vector] = known[has_vector]
                model.embedding.weight[PAD_ID].zero_()
    return model


def _device(model: nn.Module) -> torch.device:
    return next(model.parameters()).device


def _dtype(model: nn.Module) -> torch.dtype:
    return next(model.parameters()).dtype


def _condition_tensor(
    model: GeneratorModel, conditions: Sequence[ConditionVector]
) -> torch.Tensor:
    for condition in conditions:
        if condition.dimension != model.config.condition_dim:
            raise ValueError(
                f"condition dimension {condition.dimension} does not match "
                f"condition_dim {model.config.condition_dim}"
            )
    stacked = np.stack([c.values for c in conditions])
    return torch.as_tensor(stacked, dtype=_dtype(model), device=_device(model))


def _pad(rows: Sequence[Sequence[int]], device: torch.device) -> torch.Tensor:
    width = max(len(r) for r in rows)
    padded = [list(r) + [PAD_ID] * (width - len(r)) for r in rows]
    return torch.tensor(padded, dtype=torch.long, device=device)


def _emittable_log_probs(logits: torch.Tensor) -> torch.Tensor:
    """Log-distribution over tokens that may be emitted; PAD and BOS never are."""
    masked = logits.clone()
    masked[..., [PAD_ID, BOS_ID]] = float("-inf")
    return torch.log_softmax(masked, dim=-1)


def encode(
    model: GeneratorModel, query: TokenSequence, condition: ConditionVector
) -> torch.Tensor:
    """Encoder memory (len x model_input_dim) for one query."""
    if not query.tokens:
        raise EmptyInputError("the generator needs at least one query token")
    query_ids = _pad([query.tokens], _device(model))
    memory, _ = model.encode(query_ids, _condition_tensor(model, [condition]))
    return memory[0]


def decode_step(
    model: GeneratorModel,
    memory: torch.Tensor,
    prefix: Sequence[int],
    condition: ConditionVector,
) -> torch.Tensor:
    """Next-token distribution after BOS + prefix."""
    device = _device(model)
    decoder_ids = torch.tensor([[BOS_ID, *prefix]], dtype=torch.long, device=device)
    padding = torch.zeros(1, memory.shape[0], dtype=torch.bool, device=device)
    logits = model.decode(
        memory.unsqueeze(0), padding, decoder_ids, _condition_tensor(model, [condition])
    )
    return torch.softmax(logits[0, -1], dim=-1)


@torch.no_grad()
def sample_continuations(
    model: GeneratorModel,
    query: TokenSequence,
    condition: ConditionVector,
    prefix: Sequence[int],
    count: int,
    mode: DecodeMode,
    generator: torch.Generator | None,
    max_len: int | None = None,
) -> list[tuple[list[int], list[float], bool]]:
    """Extend `prefix` `count` times in parallel until EOS or the length cap.

    Returns (expansion ids without EOS, log-probs of the generated steps,
    finished) per continuation.
    """
    was_training = model.training
    model.eval()
    try:
        cap = max_len or model.config.max_expansion_len
        device = _device(model)
        query_ids = _pad([query.tokens], device).expand(count, -1)
        conditions = _condition_tensor(model, [condition]).expand(count, -1)
        memory, padding = model.encode(query_ids, conditions)

        sequences = [list(prefix) for _ in range(count)]
        logprobs: list[list[float]] = [[] for _ in range(count)]
        finished = [False] * count
        while True:
            active = [
                i for i in range(count) if not finished[i] and len(sequences[i]) < cap
            ]
            if not active:
                break
            decoder_ids = _pad([[BOS_ID, *sequences[i]] for i in active], device)
            lengths = [len(sequences[i]) for i in active]
            logits = model.decode(
                memory[active], padding[active], decoder_ids, conditions[active]
            )
            last = logits[torch.arange(len(active)), torch.tensor(lengths)]
            log_dist = _emittable_log_probs(last.double())
            if mode is DecodeMode.GREEDY:
                chosen = log_dist.argmax(dim=-1)
            else:
                chosen = torch.multinomial(
                    log_dist.exp().cpu(), 1, generator=generator
                ).squeeze(1)
            for row, i in enumerate(active):
                token = int(chosen[row])
                logprobs[i].append(float(log_dist[row, token]))
                if token == EOS_ID:
                    finished[i] = True
                else:
                    sequences[i].append(token)
        return [(sequences[i], logprobs[i], finished[i]) for i in range(count)]
    finally:
        model.train(was_training)


def generate(
    model: GeneratorModel,
    query: TokenSequence,
    condition: ConditionVector,
    vocabulary: Vocabulary,
    mode: DecodeMode = DecodeMode.GREEDY,
    seed: int = 0,
    max_len: int | None = None,
) -> GenerationResult:
    """Decode one expansion; EOS ends it and is left out of the tokens."""
    if not query.tokens:
        raise EmptyInputError("the generator needs at least one query token")
    stream = torch.Generator().manual_seed(seed)
    ids, logprobs, finished = sample_continuations(
        model, query, condition, [], 1, mode, stream, max_len
    )[0]
    return GenerationResult(vocabulary.decode(ids), tuple(logprobs), finished)


def sequence_log_probs(
    model: GeneratorModel,
    queries: Sequence[TokenSequence],
    conditions: Sequence[ConditionVector],
    expansions: Sequence[Sequence[int]],
    finished: Sequence[bool],
) -> torch.Tensor:
    """Differentiable Σ log p of each expansion (plus EOS when finished)."""
    device = _device(model)
    query_ids = _pad([q.tokens for q in queries], device)
    decoder_ids = _pad([[BOS_ID, *e] for e in expansions], device)
    targets = _pad(
        [[*e, EOS_ID] if done else list(e) for e, done in zip(expansions, finished)],
        device,
    )
    if targets.shape[1] < decoder_ids.shape[1]:
        targets = F.pad(targets, (0, decoder_ids.shape[1] - targets.shape[1]))
    decoder_ids = decoder_ids[:, : targets.shape[1]]
    logits = model(query_ids, _condition_tensor(model, conditions), decoder_ids)
    log_dist = _emittable_log_probs(logits)
    picked = log_dist.gather(-1, targets.unsqueeze(-1)).squeeze(-1)
    return picked.masked_fill(targets.eq(PAD_ID), 0.0).sum(dim=1)


def teacher_forced_loss(
    model: GeneratorModel,
    pairs: Sequence[QueryDocumentPair],
    conditions: Sequence[ConditionVector],
    reduction: str = "mean",
) -> torch.Tensor:
    """Token cross-entropy of document + EOS given BOS + document, PAD excluded."""
    device = _device(model)
    query_ids = _pad([p.query.tokens for p in pairs], device)
    decoder_ids = _pad([[BOS_ID, *p.document.tokens] for p in pairs], device)
    targets = _pad([[*p.document.tokens, EOS_ID] for p in pairs], device)
    logits = model(query_ids, _condition_tensor(model, conditions), decoder_ids)
    return F.cross_entropy(
        logits.reshape(-1, logits.shape[-1]),
        targets.reshape(-1),
        ignore_index=PAD_ID,
        reduction=reduction,
    )


def _batches(items: Sequence, size: int) -> list[Sequence]:
    return [items[start : start + size] for start in range(0, len(items), size)]


def conditions_for(
    pairs: Sequence[QueryDocumentPair], lookup: ConditionLookup
) -> list[ConditionVector]:
    conditions = []
    for pair in pairs:
        try:
            conditions.append(lookup(pair.query))
        except KeyError as e:
            raise ConditionCoverageError(
                f"missing condition for query '{pair.query.text}'"
            ) from e
    return conditions


@torch.no_grad()
def evaluate_cross_entropy(
    model: GeneratorModel,
    pairs: Sequence[QueryDocumentPair],
    lookup: ConditionLookup,
    batch_size: int = 64,
) -> float:
    """Mean per-token teacher-forced NLL over `pairs`, PAD excluded."""
    if not pairs:
        raise EmptyInputError("cannot evaluate cross-entropy on an empty split")
    was_training = model.training
    model.eval()
    try:
        total, count = 0.0, 0
        for batch in _batches(pairs, batch_size):
            conditions = conditions_for(batch, lookup)
            total += float(teacher_forced_loss(model, batch, conditions, "sum"))
            count += sum(len(p.document) + 1 for p in batch)
        return total / count
    finally:
        model.train(was_training)


def pretrain_generator(
    model: GeneratorModel,
    train_pairs: Sequence[QueryDocumentPair],
    valid_pairs: Sequence[QueryDocumentPair],
    lookup: ConditionLookup,
    config: GeneratorConfig,
    epochs: int | None = None,
    on_epoch: Callable[[EpochRecord], None] | None = None,
) -> list[EpochRecord]:
    """Teacher-forced Adam training; one history record per epoch."""
    if not train_pairs:
        raise EmptyInputError("no training pairs for generator pre-training")
    # resolve every condition up front so coverage gaps fail before training
    train_conditions = conditions_for(train_pairs, lookup)
    conditions_for(valid_pairs, lookup)

    optimizer = torch.optim.Adam(
        model.parameters(), lr=config.learning_rate, betas=(0.9, 0.999), eps=1e-8
    )
    shuffler = np.random.default_rng(config.seed)
    history: list[EpochRecord] = []
    with seeded(config.seed):
        for epoch in range(1, (epochs or config.pretrain_epochs) + 1):
            model.train()
            order = shuffler.permutation(len(train_pairs))
            total, count = 0.0, 0
            for batch_index in _batches(order, config.batch_size):
                batch = [train_pairs[i] for i in batch_index]
                conditions = [train_conditions[i] for i in batch_index]
                tokens = sum(len(p.document) + 1 for p in batch)
                loss = teacher_forced_loss(model, batch, conditions)
                optimizer.zero_grad()
                loss.backward()
                optimizer.step()
                total += float(loss) * tokens
                count += tokens

            train_ce = total / count
            valid_ce = (
                evaluate_cross_entropy(model, valid_pairs, lookup, config.batch_size)
                if valid_pairs
                else train_ce
            )
            record = EpochRecord(
                epoch=epoch,
                train_ce=train_ce,
                valid_ce=valid_ce,
                valid_ppl=math.exp(valid_ce),
            )
            logger.info(
                "generator epoch %d: train CE %.4f, valid CE %.4f",
                epoch,
                train_ce,
                valid_ce,
            )
            history.append(record)
            if on_epoch is not None:
                on_epoch(record)
    return history
