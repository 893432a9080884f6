from collections.abc import Sequence

from qexgan.corpus import QueryDocumentPair, TokenSequence, Vocabulary
from qexgan.models.generator import ConditionLookup, GeneratorModel, generate
from qexgan.types import DecodeMode


def generate_synthetic(
    generator: GeneratorModel,
    pairs: Sequence[QueryDocumentPair],
    lookup: ConditionLookup,
    vocabulary: Vocabulary,
    mode: DecodeMode = DecodeMode.SAMPLE,
    seed: int = 0,
) -> list[TokenSequence]:
    """Expanded queries (query ⊕ generated expansion), one per pair.

    Pair ``i`` is decoded with stream ``seed + i`` so the set does not depend
    on iteration order.
    """
    synthetic = []
    for index, pair in enumerate(pairs):
        result = generate(
            generator, pair.query, lookup(pair.query), vocabulary, mode, seed + index
        )
        synthetic.append(pair.query + result.expansion_tokens)
    return synthetic
