"""Checkpoint archive: every network's weights, both optimizer states, the
config (plus its hash) and all RNG state, in one torch.save file. Resuming from
an archive reproduces the next step's losses bit-identically on the same
backend."""

from __future__ import annotations

from pathlib import Path

import torch

from .config import TrainConfig, config_from_dict, config_hash, config_to_dict
from .errors import DataError
from .networks import build_networks


def save_checkpoint(path: Path | str, step: int, config: TrainConfig, renderer, decomposer,
                    disc_image, disc_intrinsics, opt_g=None, opt_d=None,
                    data_rng_state=None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = {
        "step": step,
        "config": config_to_dict(config),
        "config_hash": config_hash(config),
        "networks": {
            "renderer": renderer.state_dict(),
            "decomposer": decomposer.state_dict(),
            "disc_image": disc_image.state_dict(),
            "disc_intrinsics": disc_intrinsics.state_dict(),
        },
        "optimizers": {
            "generator": opt_g.state_dict() if opt_g is not None else None,
            "discriminator": opt_d.state_dict() if opt_d is not None else None,
        },
        "rng": {
            "torch": torch.get_rng_state(),
            "data": data_rng_state,
        },
    }
    torch.save(payload, path)
    return path


def load_checkpoint(path: Path | str) -> dict:
    path = Path(path)
    if not path.exists():
        raise DataError(f"missing checkpoint: {path}")
    try:
        payload = torch.load(path, map_location="cpu", weights_only=False)
    except Exception as exc:
        raise DataError(f"cannot read checkpoint {path}: {exc}") from exc
    payload["config"] = config_from_dict(payload["config"])
    return payload


def restore_networks(payload: dict):
    """Rebuild (renderer, decomposer, disc_image, disc_intrinsics) from an archive."""
    config: TrainConfig = payload["config"]
    renderer, decomposer, disc_image, disc_intrinsics = build_networks(config.network)
    renderer.load_state_dict(payload["networks"]["renderer"])
    decomposer.load_state_dict(payload["networks"]["decomposer"])
    disc_image.load_state_dict(payload["networks"]["disc_image"])
    disc_intrinsics.load_state_dict(payload["networks"]["disc_intrinsics"])
    return renderer, decomposer, disc_image, disc_intrinsics
