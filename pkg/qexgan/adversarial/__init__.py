from qexgan.adversarial.rollout import (
    RewardBatch,
    RolloutSet,
    batch_reward,
    rollout,
)
from qexgan.adversarial.trainer import (
    AdversarialEpoch,
    AdversarialResult,
    SampledExpansion,
    adversarial_train,
    policy_gradient_update,
    policy_surrogate,
)


__all__ = [
    "AdversarialEpoch",
    "AdversarialResult",
    "RewardBatch",
    "RolloutSet",
    "SampledExpansion",
    "adversarial_train",
    "batch_reward",
    "policy_gradient_update",
    "policy_surrogate",
    "rollout",
]
