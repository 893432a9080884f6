"""Versioned checkpoint container.

A checkpoint is a zip archive with fixed entry timestamps holding
``meta.json`` and one little-endian float32 ``.npy`` entry per named
parameter, so identical weights always produce identical bytes.
"""

from __future__ import annotations

import hashlib
import io
import json
import logging
import zipfile
from pathlib import Path
from typing import Any, Literal

import numpy as np
import torch
from numpy.lib import format as npy_format
from pydantic import BaseModel, Field
from torch import nn

from qexgan.config import DiscriminatorConfig, GeneratorConfig
from qexgan.errors import (
    ArtifactMismatch,
    MalformedRecordError,
    MissingArtifactError,
)
from qexgan.models.discriminator import DiscriminatorModel, init_discriminator
from qexgan.models.generator import GeneratorModel, init_generator


logger = logging.getLogger(__name__)

FORMAT_VERSION = 1
META_ENTRY = "meta.json"
_ZIP_DATE = (1980, 1, 1, 0, 0, 0)

CheckpointKind = Literal["generator", "discriminator"]


class CheckpointMeta(BaseModel):
    format_version: int = FORMAT_VERSION
    kind: CheckpointKind
    config: dict[str, Any]
    upstream: dict[str, str] = Field(default_factory=dict)
    parameters: dict[str, list[int]] = Field(default_factory=dict)
    extra: dict[str, Any] = Field(default_factory=dict)


def _entry(name: str) -> zipfile.ZipInfo:
    info = zipfile.ZipInfo(name, date_time=_ZIP_DATE)
    info.compress_type = zipfile.ZIP_DEFLATED
    info.external_attr = 0o644 << 16
    return info


def _npy_bytes(array: np.ndarray) -> bytes:
    buffer = io.BytesIO()
    npy_format.write_array(
        buffer, np.ascontiguousarray(array, dtype="<f4"), version=(1, 0)
    )
    return buffer.getvalue()


def save_checkpoint(
    path: str | Path,
    model: nn.Module,
    kind: CheckpointKind,
    config: BaseModel,
    upstream: dict[str, str] | None = None,
    extra: dict[str, Any] | None = None,
) -> str:
    """Write the checkpoint and return its sha256."""
    state = {
        name: tensor.detach().cpu().numpy()
        for name, tensor in model.state_dict().items()
    }
    meta = CheckpointMeta(
        kind=kind,
        config=config.model_dump(mode="json"),
        upstream=dict(upstream or {}),
        parameters={name: list(array.shape) for name, array in state.items()},
        extra=dict(extra or {}),
    )
    buffer = io.BytesIO()
    with zipfile.ZipFile(buffer, "w") as archive:
        archive.writestr(
            _entry(META_ENTRY),
            json.dumps(meta.model_dump(mode="json"), sort_keys=True, indent=2),
        )
        for name in sorted(state):
            archive.writestr(_entry(f"{name}.npy"), _npy_bytes(state[name]))

    data = buffer.getvalue()
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_bytes(data)
    logger.info("wrote %s checkpoint %s", kind, target)
    return hashlib.sha256(data).hexdigest()


def load_checkpoint(
    path: str | Path, kind: CheckpointKind | None = None
) -> tuple[CheckpointMeta, dict[str, np.ndarray]]:
    source = Path(path)
    if not source.exists():
        raise MissingArtifactError(kind or "checkpoint", source)
    try:
        with zipfile.ZipFile(source) as archive:
            meta = CheckpointMeta.model_validate_json(archive.read(META_ENTRY))
            arrays = {
                name: npy_format.read_array(io.BytesIO(archive.read(f"{name}.npy")))
                for name in meta.parameters
            }
    except (zipfile.BadZipFile, KeyError, ValueError) as e:
        raise MalformedRecordError(source, 0, f"unreadable checkpoint: {e}") from e
    if meta.format_version != FORMAT_VERSION:
        raise MalformedRecordError(
            source, 0, f"unsupported checkpoint version {meta.format_version}"
        )
    if kind is not None and meta.kind != kind:
        raise MalformedRecordError(
            source, 0, f"expected a {kind} checkpoint, found {meta.kind}"
        )
    return meta, arrays


def verify_upstream(meta: CheckpointMeta, current: dict[str, str]) -> None:
    """Refuse a checkpoint trained against artifacts that have since changed."""
    for name, recorded in sorted(meta.upstream.items()):
        actual = current.get(name)
        if actual is not None and actual != recorded:
            raise ArtifactMismatch(name, recorded, actual)


def _load_state(model: nn.Module, arrays: dict[str, np.ndarray]) -> None:
    reference = model.state_dict()
    state = {
        name: torch.as_tensor(np.asarray(array), dtype=reference[name].dtype)
        for name, array in arrays.items()
    }
    model.load_state_dict(state)


def load_generator(
    path: str | Path, current_upstream: dict[str, str] | None = None
) -> tuple[GeneratorModel, CheckpointMeta]:
    meta, arrays = load_checkpoint(path, "generator")
    verify_upstream(meta, current_upstream or {})
    model = init_generator(GeneratorConfig.model_validate(meta.config))
    _load_state(model, arrays)
    return model, meta


def load_discriminator(
    path: str | Path, current_upstream: dict[str, str] | None = None
) -> tuple[DiscriminatorModel, CheckpointMeta]:
    meta, arrays = load_checkpoint(path, "discriminator")
    verify_upstream(meta, current_upstream or {})
    model = init_discriminator(DiscriminatorConfig.model_validate(meta.config))
    _load_state(model, arrays)
    return model, meta
