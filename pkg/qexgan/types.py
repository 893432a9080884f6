from enum import Enum


class Strategy(Enum):
    SELF = "self"
    TFIDF = "tfidf"
    DOC_SIM = "doc_sim"
    WORD_SIM = "word_sim"

    @property
    def cli_name(self) -> str:
        return self.value.replace("_", "-")

    @property
    def display_name(self) -> str:
        return STRATEGY_DISPLAY_NAMES[self]

    @classmethod
    def parse(cls, text: str) -> "Strategy":
        return cls(text.strip().lower().replace("-", "_"))


STRATEGY_DISPLAY_NAMES = {
    Strategy.SELF: "Baseline Generator",
    Strategy.WORD_SIM: "Word Sim.",
    Strategy.DOC_SIM: "Document Sim.",
    Strategy.TFIDF: "TF-IDF",
}


class Split(Enum):
    TRAIN = "train"
    VALID = "valid"
    TEST = "test"


class CorpusFormat(Enum):
    JSONL = "jsonl"
    TSV = "tsv"


class OovPolicy(Enum):
    ZERO = "zero"
    UNK_VECTOR = "unk_vector"


class DecodeMode(Enum):
    GREEDY = "greedy"
    SAMPLE = "sample"


class RewardMode(Enum):
    PROB_REAL = "prob_real"
    DISC_LOSS = "disc_loss"


class BaselineMode(Enum):
    NONE = "none"
    MOVING_AVERAGE = "moving_average"


class DiscriminatorProtocol(Enum):
    """Which split supplies the discriminator's pre-training pairs."""

    TEST_SPLIT = "test"
    TRAIN_SPLIT = "train"
