"""expand: greedy expansion terms for ad-hoc queries."""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path

from pydantic import BaseModel

from qexgan.commands.artifacts import Phase, load_phase_generator, load_prepared
from qexgan.config import RunConfig
from qexgan.corpus import UNK_ID, TokenSequence
from qexgan.errors import EmptyInputError, MissingInputError
from qexgan.models.generator import generate
from qexgan.store import ArtifactStore
from qexgan.types import DecodeMode


logger = logging.getLogger(__name__)


class ExpansionRecord(BaseModel):
    query: str
    expansion_terms: list[str]
    expanded_query: str
    condition_strategy: str


@dataclass(frozen=True)
class ExpandResult:
    records: list[ExpansionRecord]
    phase: Phase
    output: Path | None = None
    warnings: list[str] = field(default_factory=list)

    def lines(self) -> list[str]:
        return [record.model_dump_json() for record in self.records]


def read_queries_file(path: str | Path) -> list[str]:
    """One query per line; blank lines are skipped and order is kept."""
    queries_path = Path(path)
    if not queries_path.exists():
        raise MissingInputError(queries_path, "queries file")
    lines = queries_path.read_text(encoding="utf-8").splitlines()
    return [line.strip() for line in lines if line.strip()]


def cmd_expand(
    config: RunConfig,
    store: ArtifactStore,
    queries: Sequence[str],
    output: str | Path | None = None,
    phase: Phase = Phase.AUTO,
) -> ExpandResult:
    if not queries:
        raise EmptyInputError("expand needs at least one query")
    strategy = config.strategy
    prepared = load_prepared(store, config, strategy)
    generator, resolved, _ = load_phase_generator(store, prepared, phase)

    records: list[ExpansionRecord] = []
    warnings: list[str] = []
    for raw in queries:
        query = prepared.vocabulary.encode(
            TokenSequence.from_text(raw, config.corpus.turkish_casing)
        )
        if not query.surface:
            raise EmptyInputError(f"query '{raw}' has no tokens")
        if all(token == UNK_ID for token in query.tokens):
            message = f"every token of '{query.text}' is out of vocabulary"
            logger.warning("%s", message)
            warnings.append(message)
        result = generate(
            generator,
            query,
            prepared.condition(query),
            prepared.vocabulary,
            DecodeMode.GREEDY,
            config.seed,
        )
        expansion = result.expansion_tokens
        records.append(
            ExpansionRecord(
                query=query.text,
                expansion_terms=list(expansion.surface),
                expanded_query=(query + expansion).text,
                condition_strategy=strategy.value,
            )
        )

    result_path = None
    if output is not None:
        result_path = Path(output)
        result_path.parent.mkdir(parents=True, exist_ok=True)
        text = "".join(record.model_dump_json() + "\n" for record in records)
        result_path.write_text(text, encoding="utf-8")
    logger.info(
        "expanded %d queries with the %s generator", len(records), resolved.value
    )
    return ExpandResult(records, resolved, result_path, warnings)
