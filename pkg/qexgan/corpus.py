"""Query-document pair corpus: loading, tokenisation, vocabulary, splits, stats."""

from __future__ import annotations

import json
import logging
import math
import re
from collections import Counter
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from pydantic import BaseModel

from qexgan.errors import EmptyInputError, MalformedRecordError, MissingInputError
from qexgan.types import CorpusFormat, Split


logger = logging.getLogger(__name__)

PAD_TOKEN = "<pad>"
BOS_TOKEN = "<bos>"
EOS_TOKEN = "<eos>"
UNK_TOKEN = "<unk>"
SPECIAL_TOKENS = (PAD_TOKEN, BOS_TOKEN, EOS_TOKEN, UNK_TOKEN)
PAD_ID, BOS_ID, EOS_ID, UNK_ID = range(4)

_NON_WORD = re.compile(r"[^\w\s]+")
_TURKISH_UPPER = str.maketrans({"I": "ı", "İ": "i"})


def tokenize(text: str, turkish_casing: bool = True) -> list[str]:
    """Lowercase, strip punctuation to word boundaries and split on whitespace.

    With `turkish_casing` the dotted/dotless capital I map to `i`/`ı` before
    lowercasing, as Turkish locale rules require.
    """
    if turkish_casing:
        text = text.translate(_TURKISH_UPPER)
    lowered = text.lower()
    return _NON_WORD.sub(" ", lowered).replace("_", " ").split()


def detokenize(surface: Iterable[str]) -> str:
    return " ".join(surface)


@dataclass(frozen=True)
class TokenSequence:
    """Surface tokens plus, once a vocabulary is applied, their ids."""

    surface: tuple[str, ...]
    tokens: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.tokens and len(self.tokens) != len(self.surface):
            raise ValueError("token ids and surface tokens must have equal length")

    def __len__(self) -> int:
        return len(self.surface)

    @property
    def encoded(self) -> bool:
        return len(self.tokens) == len(self.surface)

    @property
    def text(self) -> str:
        return detokenize(self.surface)

    def __add__(self, other: TokenSequence) -> TokenSequence:
        if self.encoded and other.encoded:
            return TokenSequence(
                self.surface + other.surface, self.tokens + other.tokens
            )
        return TokenSequence(self.surface + other.surface)

    @classmethod
    def from_text(cls, text: str, turkish_casing: bool = True) -> TokenSequence:
        return cls(tuple(tokenize(text, turkish_casing)))


@dataclass(frozen=True)
class Vocabulary:
    """Dense token-id map; ids 0-3 are PAD, BOS, EOS and UNK."""

    id_to_token: tuple[str, ...]
    token_to_id: dict[str, int] = field(compare=False, repr=False)

    @classmethod
    def from_tokens(cls, tokens: Iterable[str]) -> Vocabulary:
        ordered = list(SPECIAL_TOKENS)
        for token in tokens:
            if token in SPECIAL_TOKENS:
                continue
            ordered.append(token)
        index = {token: i for i, token in enumerate(ordered)}
        if len(index) != len(ordered):
            raise ValueError("vocabulary tokens must be unique")
        return cls(tuple(ordered), index)

    @property
    def size(self) -> int:
        return len(self.id_to_token)

    def __len__(self) -> int:
        return self.size

    def __contains__(self, token: object) -> bool:
        return token in self.token_to_id

    def id_of(self, token: str) -> int:
        return self.token_to_id.get(token, UNK_ID)

    def token_of(self, token_id: int) -> str:
        return self.id_to_token[token_id]

    def encode(self, sequence: TokenSequence) -> TokenSequence:
        return TokenSequence(
            sequence.surface, tuple(self.id_of(t) for t in sequence.surface)
        )

    def decode(self, ids: Iterable[int]) -> TokenSequence:
        ids = tuple(int(i) for i in ids)
        return TokenSequence(tuple(self.token_of(i) for i in ids), ids)

    def to_json(self) -> str:
        return json.dumps({"tokens": list(self.id_to_token)}, ensure_ascii=False)

    @classmethod
    def from_json(cls, text: str) -> Vocabulary:
        return cls.from_tokens(json.loads(text)["tokens"])


@dataclass(frozen=True)
class QueryDocumentPair:
    query: TokenSequence
    document: TokenSequence


@dataclass(frozen=True)
class PairCorpus:
    """Aligned (query, document) pairs, optionally split and encoded."""

    pairs: tuple[QueryDocumentPair, ...]
    splits: tuple[Split, ...] | None = None
    vocabulary: Vocabulary | None = None
    dropped: int = 0

    def __post_init__(self) -> None:
        if self.splits is not None and len(self.splits) != len(self.pairs):
            raise ValueError("one split tag per pair is required")

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self) -> Iterator[QueryDocumentPair]:
        return iter(self.pairs)

    def select(self, *splits: Split) -> list[QueryDocumentPair]:
        if self.splits is None:
            raise ValueError("corpus has not been split")
        wanted = set(splits)
        return [p for p, s in zip(self.pairs, self.splits, strict=True) if s in wanted]

    def subset(self, *splits: Split) -> PairCorpus:
        """A corpus containing only the pairs tagged with `splits`."""
        pairs = self.select(*splits)
        assert self.splits is not None
        tags = tuple(s for s in self.splits if s in set(splits))
        return PairCorpus(tuple(pairs), tags, self.vocabulary, 0)

    def encode(self, vocabulary: Vocabulary) -> PairCorpus:
        pairs = tuple(
            QueryDocumentPair(vocabulary.encode(p.query), vocabulary.encode(p.document))
            for p in self.pairs
        )
        return replace(self, pairs=pairs, vocabulary=vocabulary)

    def distinct_queries(self, *splits: Split) -> list[TokenSequence]:
        """Distinct queries by surface string, in first-occurrence order."""
        source = self.select(*splits) if splits else list(self.pairs)
        seen: dict[str, TokenSequence] = {}
        for pair in source:
            seen.setdefault(pair.query.text, pair.query)
        return list(seen.values())


def _read_record(
    path: Path, line_number: int, line: str, corpus_format: CorpusFormat
) -> tuple[str, str]:
    if corpus_format is CorpusFormat.JSONL:
        try:
            record = json.loads(line)
        except json.JSONDecodeError as e:
            raise MalformedRecordError(path, line_number, f"invalid JSON ({e.msg})")
        if not isinstance(record, dict):
            raise MalformedRecordError(path, line_number, "expected a JSON object")
        query, document = record.get("query"), record.get("document")
        if not isinstance(query, str) or not isinstance(document, str):
            raise MalformedRecordError(
                path, line_number, "'query' and 'document' must be strings"
            )
        return query, document

    columns = line.rstrip("\r\n").split("\t")
    if len(columns) != 2:
        raise MalformedRecordError(
            path, line_number, f"expected 2 tab-separated columns, got {len(columns)}"
        )
    return columns[0], columns[1]


def load_pairs(
    path: str | Path,
    corpus_format: CorpusFormat = CorpusFormat.JSONL,
    turkish_casing: bool = True,
) -> PairCorpus:
    """Read one pair per record, dropping records whose query or document is blank."""
    path = Path(path)
    if not path.exists():
        raise MissingInputError(path, "corpus file")

    pairs: list[QueryDocumentPair] = []
    dropped = 0
    with open(path, encoding="utf-8") as f:
        for line_number, line in enumerate(f, start=1):
            if not line.strip():
                continue
            query_text, document_text = _read_record(
                path, line_number, line, corpus_format
            )
            query = TokenSequence.from_text(query_text, turkish_casing)
            document = TokenSequence.from_text(document_text, turkish_casing)
            if not query.surface or not document.surface:
                dropped += 1
                continue
            pairs.append(QueryDocumentPair(query, document))

    if not pairs:
        raise EmptyInputError(f"no valid query-document records in {path}")
    if dropped:
        logger.warning("dropped %d records with a blank query or document", dropped)
    return PairCorpus(tuple(pairs), dropped=dropped)


def build_vocabulary(corpus: PairCorpus, min_count: int = 1) -> Vocabulary:
    """Joint query+document vocabulary, ordered by frequency then lexicographically."""
    if len(corpus) == 0:
        raise EmptyInputError("cannot build a vocabulary from an empty corpus")
    if min_count < 1:
        raise ValueError("min_count must be at least 1")

    counts: Counter[str] = Counter()
    for pair in corpus:
        counts.update(pair.query.surface)
        counts.update(pair.document.surface)
    kept = sorted(
        (token for token, count in counts.items() if count >= min_count),
        key=lambda token: (-counts[token], token),
    )
    return Vocabulary.from_tokens(kept)


def _round_half_up(value: float) -> int:
    return math.floor(value + 0.5)


def split_corpus(
    corpus: PairCorpus,
    ratios: Sequence[float] = (0.8, 0.1, 0.1),
    seed: int = 0,
) -> PairCorpus:
    """Tag each pair train/valid/test by a seeded shuffle."""
    if len(ratios) != 3 or any(r <= 0 for r in ratios):
        raise ValueError("split ratios must be three positive numbers")
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ValueError(f"split ratios must sum to 1, got {sum(ratios)}")
    total = len(corpus)
    if total < 3:
        raise EmptyInputError(f"need at least 3 pairs to split, got {total}")

    n_train = min(total, _round_half_up(total * ratios[0]))
    n_valid = min(total - n_train, _round_half_up(total * ratios[1]))

    order = np.random.default_rng(seed).permutation(total)
    tags: list[Split] = [Split.TEST] * total
    for rank, index in enumerate(order):
        if rank < n_train:
            tags[index] = Split.TRAIN
        elif rank < n_train + n_valid:
            tags[index] = Split.VALID
    return replace(corpus, splits=tuple(tags))


class SideStats(BaseModel):
    min_words: int
    mean_words: float
    max_words: int
    unique_words: int


class CorpusStats(BaseModel):
    pair_count: int
    query: SideStats
    document: SideStats
    document_to_query_ratio: float


def _side_stats(sequences: Sequence[TokenSequence]) -> SideStats:
    lengths = [len(s) for s in sequences]
    unique = {token for s in sequences for token in s.surface}
    return SideStats(
        min_words=min(lengths),
        mean_words=sum(lengths) / len(lengths),
        max_words=max(lengths),
        unique_words=len(unique),
    )


def corpus_stats(corpus: PairCorpus) -> CorpusStats:
    if len(corpus) == 0:
        raise EmptyInputError("cannot compute statistics of an empty corpus")
    query = _side_stats([p.query for p in corpus])
    document = _side_stats([p.document for p in corpus])
    return CorpusStats(
        pair_count=len(corpus),
        query=query,
        document=document,
        document_to_query_ratio=document.mean_words / query.mean_words,
    )


def write_corpus(corpus: PairCorpus, path: str | Path) -> None:
    """Persist pairs with their split tags, one JSON object per line."""
    lines = []
    splits = corpus.splits or (None,) * len(corpus)
    for pair, split in zip(corpus.pairs, splits, strict=True):
        record = {
            "query": pair.query.text,
            "document": pair.document.text,
            "split": split.value if split else None,
        }
        lines.append(json.dumps(record, ensure_ascii=False, sort_keys=True))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_corpus(path: str | Path, vocabulary: Vocabulary | None = None) -> PairCorpus:
    """Inverse of `write_corpus`; text is already tokenised so it is split verbatim."""
    pairs: list[QueryDocumentPair] = []
    splits: list[Split] = []
    with open(path, encoding="utf-8") as f:
        for line_number, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
                pairs.append(
                    QueryDocumentPair(
                        TokenSequence(tuple(record["query"].split())),
                        TokenSequence(tuple(record["document"].split())),
                    )
                )
                splits.append(Split(record["split"]))
            except (json.JSONDecodeError, KeyError, ValueError) as e:
                raise MalformedRecordError(path, line_number, str(e)) from e
    corpus = PairCorpus(tuple(pairs), tuple(splits))
    return corpus.encode(vocabulary) if vocabulary is not None else corpus
