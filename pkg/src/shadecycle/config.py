"""Training configuration: a plain dataclass tree with strict JSON (de)serialization.

Unknown keys are configuration errors; the canonical JSON form is hashed into
checkpoints so a run can always be traced back to its exact configuration.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError
from .losses import LossWeights
from .networks import CHANNEL_SLICES, NETWORK_STRIDE, NetworkConfig

FULL_TAG = "full"


@dataclass
class AblationConfig:
    shared_discriminator: bool = True
    decomposition_cycle: bool = True
    drop_inputs: tuple = ()

    def __post_init__(self):
        self.drop_inputs = tuple(sorted(self.drop_inputs))
        unknown = set(self.drop_inputs) - set(CHANNEL_SLICES)
        if unknown:
            raise ConfigError(f"drop_inputs must be a subset of A/N/F, got {sorted(unknown)}")

    def tag(self) -> str:
        parts = []
        if not self.shared_discriminator:
            parts.append("w/o Shared Discr")
        if not self.decomposition_cycle:
            parts.append("w/o Decom. Cyc.")
        parts += [f"w/o {c}" for c in self.drop_inputs]
        return ", ".join(parts) if parts else FULL_TAG


@dataclass
class TrainConfig:
    learning_rate: float = 2e-4
    adam_beta1: float = 0.5
    adam_beta2: float = 0.999
    batch_size: int = 8
    max_steps: int = 20000
    resolution: tuple = (64, 64)
    seed: int = 0
    gan_mode: str = "nonsaturating"
    dec_cycle_smooth_l1: bool = False
    lr_decay: bool = False
    eval_every: int = 1000
    checkpoint_every: int = 1000
    grid_every: int = 1000
    weights: LossWeights = field(default_factory=LossWeights)
    network: NetworkConfig = field(default_factory=NetworkConfig)
    ablation: AblationConfig = field(default_factory=AblationConfig)

    def __post_init__(self):
        self.resolution = tuple(int(v) for v in self.resolution)
        if self.learning_rate <= 0:
            raise ConfigError(f"learning_rate must be > 0, got {self.learning_rate}")
        if self.batch_size <= 0 or self.max_steps <= 0:
            raise ConfigError("batch_size and max_steps must be positive")
        h, w = self.resolution
        if h % NETWORK_STRIDE or w % NETWORK_STRIDE:
            raise ConfigError(
                f"resolution {self.resolution} not divisible by network stride {NETWORK_STRIDE}")
        if self.gan_mode not in ("nonsaturating", "lsgan"):
            raise ConfigError(f"gan_mode must be nonsaturating|lsgan, got {self.gan_mode!r}")

    @property
    def tag(self) -> str:
        return self.ablation.tag()


_NESTED = {"weights": LossWeights, "network": NetworkConfig, "ablation": AblationConfig}


def _from_dict(cls, payload: dict):
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = set(payload) - names
    if unknown:
        raise ConfigError(f"unknown {cls.__name__} keys: {sorted(unknown)}")
    kwargs = {}
    for key, value in payload.items():
        nested = _NESTED.get(key)
        if nested is not None and isinstance(value, dict):
            value = _from_dict(nested, value)
        kwargs[key] = value
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"bad {cls.__name__}: {exc}") from exc


def config_to_dict(config: TrainConfig) -> dict:
    return dataclasses.asdict(config)


def config_from_dict(payload: dict) -> TrainConfig:
    return _from_dict(TrainConfig, dict(payload))


def load_config(path: Path | str) -> TrainConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"missing config file: {path}")
    try:
        payload = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from exc
    return config_from_dict(payload)


def save_config(config: TrainConfig, path: Path | str) -> None:
    Path(path).write_text(json.dumps(config_to_dict(config), indent=1, sort_keys=True) + "\n")


def config_hash(config: TrainConfig) -> str:
    canonical = json.dumps(config_to_dict(config), sort_keys=True)
    return hashlib.sha256(canonical.encode()).hexdigest()[:16]


# Cadence knobs do not influence the optimization stream, so resuming under a
# different logging/eval schedule is safe and allowed.
_CADENCE_FIELDS = ("max_steps", "eval_every", "checkpoint_every", "grid_every")


def reproducibility_hash(config: TrainConfig) -> str:
    payload = {k: v for k, v in config_to_dict(config).items() if k not in _CADENCE_FIELDS}
    return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()[:16]
