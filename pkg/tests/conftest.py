import json
from pathlib import Path

import numpy as np
import pytest

from qexgan.conditions.strategies import ConditionContext, make_condition
from qexgan.config import (
    AdversarialConfig,
    ConditionConfig,
    DiscriminatorConfig,
    GeneratorConfig,
    RunConfig,
)
from qexgan.corpus import (
    PairCorpus,
    QueryDocumentPair,
    TokenSequence,
    Vocabulary,
    build_vocabulary,
    split_corpus,
)
from qexgan.embeddings import EmbeddingTable
from qexgan.types import Strategy


COLOURS = ("kirmizi", "mavi", "siyah", "beyaz", "yesil")
ITEMS = ("elbise", "gomlek", "ayakkabi", "canta", "etek")
AUDIENCES = ("kadin", "erkek")


def toy_pair_texts() -> list[tuple[str, str]]:
    """50 (query, document) pairs; every query appears with two documents."""
    return [
        (f"{colour} {item}", f"{colour} {item} {audience} yazlik")
        for colour in COLOURS
        for item in ITEMS
        for audience in AUDIENCES
    ]


TOY_WORDS = tuple(
    sorted({word for q, d in toy_pair_texts() for word in f"{q} {d}".split()})
)


# Fixture: corpus_file - the 50-pair toy corpus as JSONL
@pytest.fixture
def corpus_file(tmp_path: Path) -> Path:
    path = tmp_path / "pairs.jsonl"
    path.write_text(
        "".join(
            json.dumps({"query": q, "document": d}) + "\n" for q, d in toy_pair_texts()
        ),
        encoding="utf-8",
    )
    return path


# Fixture: embeddings_file - 8-dim vectors for every toy word plus one extra
@pytest.fixture
def embeddings_file(tmp_path: Path) -> Path:
    rng = np.random.default_rng(7)
    words = [*TOY_WORDS, "kislik"]
    lines = [f"{len(words)} 8"]
    for word in words:
        lines.append(word + " " + " ".join(f"{v:.6f}" for v in rng.normal(size=8)))
    path = tmp_path / "vectors.vec"
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


@pytest.fixture
def split_pairs() -> PairCorpus:
    pairs = tuple(
        QueryDocumentPair(TokenSequence.from_text(q), TokenSequence.from_text(d))
        for q, d in toy_pair_texts()
    )
    return split_corpus(PairCorpus(pairs), (0.8, 0.1, 0.1), seed=0)


@pytest.fixture
def toy_vocabulary(split_pairs: PairCorpus) -> Vocabulary:
    return build_vocabulary(split_pairs)


@pytest.fixture
def encoded_corpus(split_pairs: PairCorpus, toy_vocabulary: Vocabulary) -> PairCorpus:
    return split_pairs.encode(toy_vocabulary)


# Fixture: toy_table - 4-dim random vectors for every toy word
@pytest.fixture
def toy_table() -> EmbeddingTable:
    rng = np.random.default_rng(3)
    return EmbeddingTable(TOY_WORDS, rng.normal(size=(len(TOY_WORDS), 4)))


@pytest.fixture
def self_lookup(toy_table: EmbeddingTable):
    context = ConditionContext(toy_table)

    def lookup(query: TokenSequence):
        return make_condition(query, Strategy.SELF, context)

    return lookup


# Fixture: make_generator_config - tiny transformer, dropout off
@pytest.fixture
def make_generator_config():
    def factory(vocab_size: int, **overrides) -> GeneratorConfig:
        values = {
            "token_dim": 4,
            "condition_dim": 4,
            "model_input_dim": 8,
            "hidden_dim": 16,
            "encoder_layers": 1,
            "decoder_layers": 1,
            "attention_heads": 2,
            "dropout": 0.0,
            "max_expansion_len": 6,
            "vocab_size": vocab_size,
            "learning_rate": 1e-2,
            "pretrain_epochs": 2,
            "batch_size": 8,
            "seed": 0,
        }
        values.update(overrides)
        return GeneratorConfig(**values)

    return factory


# Fixture: make_discriminator_config - tiny LSTM, dropout off
@pytest.fixture
def make_discriminator_config():
    def factory(**overrides) -> DiscriminatorConfig:
        values = {
            "token_dim": 4,
            "lstm_hidden": 8,
            "dropout": 0.0,
            "learning_rate": 1e-2,
            "epochs": 2,
            "batch_size": 16,
            "seed": 0,
        }
        values.update(overrides)
        return DiscriminatorConfig(**values)

    return factory


# Fixture: run_config - a pipeline config small enough to run end to end
@pytest.fixture
def run_config(
    tmp_path: Path, corpus_file: Path, embeddings_file: Path, make_generator_config
) -> RunConfig:
    generator = make_generator_config(
        4, max_expansion_len=4, pretrain_epochs=2, batch_size=16
    )
    return RunConfig(
        corpus_path=str(corpus_file),
        embeddings_path=str(embeddings_file),
        workdir=str(tmp_path / "work"),
        strategy=Strategy.SELF,
        seed=0,
        conditions=ConditionConfig(k_documents=2, k_words=3, leaf_size=4),
        generator=generator,
        discriminator=DiscriminatorConfig(
            token_dim=4, lstm_hidden=8, epochs=2, batch_size=16, dropout=0.0
        ),
        adversarial=AdversarialConfig(
            rollout_count=2,
            max_expansion_len=3,
            epochs=1,
            batch_size=8,
            learning_rate=1e-3,
        ),
    )
