from collections.abc import Callable

import numpy as np
import torch
from torch import nn


def finite_difference_errors(
    loss_fn: Callable[[], torch.Tensor],
    model: nn.Module,
    coordinates: int = 120,
    seed: int = 0,
    step: float = 1e-6,
) -> list[float]:
    """Relative error of autograd vs central differences at random coordinates.

    The model must already be in float64. Near-zero gradients are compared
    against an absolute floor of 1e-3.
    """
    parameters = [p for p in model.parameters() if p.requires_grad]
    model.zero_grad()
    loss_fn().backward()
    analytic = [p.grad.detach().clone() for p in parameters]

    slots = [(i, j) for i, p in enumerate(parameters) for j in range(p.numel())]
    rng = np.random.default_rng(seed)
    picked = rng.choice(len(slots), size=min(coordinates, len(slots)), replace=False)

    errors = []
    with torch.no_grad():
        for slot in picked:
            i, j = slots[slot]
            flat = parameters[i].view(-1)
            original = flat[j].item()
            flat[j] = original + step
            upper = loss_fn().item()
            flat[j] = original - step
            lower = loss_fn().item()
            flat[j] = original
            numeric = (upper - lower) / (2 * step)
            exact = analytic[i].view(-1)[j].item()
            scale = max(abs(exact), abs(numeric), 1e-3)
            errors.append(abs(exact - numeric) / scale)
    return errors
