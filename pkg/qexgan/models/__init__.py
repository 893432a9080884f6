from qexgan.models.checkpoint import (
    load_discriminator,
    load_generator,
    save_checkpoint,
)
from qexgan.models.discriminator import (
    DiscriminatorModel,
    DiscriminatorScorer,
    RealnessScorer,
    classify,
    grid_search_discriminator,
    init_discriminator,
    pretrain_discriminator,
)
from qexgan.models.generator import (
    GenerationResult,
    GeneratorModel,
    decode_step,
    encode,
    generate,
    init_generator,
    pretrain_generator,
)
from qexgan.models.synthetic import generate_synthetic


__all__ = [
    "DiscriminatorModel",
    "DiscriminatorScorer",
    "GenerationResult",
    "GeneratorModel",
    "RealnessScorer",
    "classify",
    "decode_step",
    "encode",
    "generate",
    "generate_synthetic",
    "grid_search_discriminator",
    "init_discriminator",
    "init_generator",
    "load_discriminator",
    "load_generator",
    "pretrain_discriminator",
    "pretrain_generator",
    "save_checkpoint",
]
