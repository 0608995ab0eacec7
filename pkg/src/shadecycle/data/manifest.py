"""Dataset manifest: a JSON index of unpaired intrinsic-map and real-image records.

Record kinds:
  intrinsic -- albedo/normal/refl/mask channel files (the synthetic domain)
  real      -- a single RGB image (the real/pseudo-real domain)
  paired    -- all five files for one scene; used only by evaluation manifests,
               never drawn by the unpaired sampler.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import DataError
from .io import decode_intrinsics, decode_real
from .types import ImageTensor, IntrinsicMaps

MANIFEST_NAME = "manifest.json"
RECORD_KINDS = ("intrinsic", "real", "paired")


@dataclass
class ManifestRecord:
    id: str
    kind: str
    paths: dict[str, str]
    source: str = "analytic"
    seed: int = 0


@dataclass
class DatasetManifest:
    root: Path
    resolution: tuple[int, int]
    records: list[ManifestRecord] = field(default_factory=list)

    def by_kind(self, kind: str) -> list[ManifestRecord]:
        return [r for r in self.records if r.kind == kind]

    def record(self, record_id: str) -> ManifestRecord:
        for r in self.records:
            if r.id == record_id:
                return r
        raise DataError(f"no record with id {record_id!r}")

    def load_intrinsics(self, rec: ManifestRecord) -> IntrinsicMaps:
        m = decode_intrinsics(self.root, paths=rec.paths)
        if m.resolution != tuple(self.resolution):
            raise DataError(f"record {rec.id}: shape {m.resolution} != manifest {self.resolution}")
        return m

    def load_real(self, rec: ManifestRecord) -> ImageTensor:
        img = decode_real(self.root, paths=rec.paths)
        if img.resolution != tuple(self.resolution):
            raise DataError(f"record {rec.id}: shape {img.resolution} != manifest {self.resolution}")
        return img


def save_manifest(manifest: DatasetManifest, path: Path | str | None = None) -> Path:
    path = Path(path) if path is not None else manifest.root / MANIFEST_NAME
    payload = {
        "resolution": list(manifest.resolution),
        "records": [
            {"id": r.id, "kind": r.kind, "paths": r.paths, "source": r.source, "seed": r.seed}
            for r in manifest.records
        ],
    }
    path.write_text(json.dumps(payload, indent=1, sort_keys=True) + "\n")
    return path


def load_manifest(path: Path | str) -> DatasetManifest:
    """Parse manifest.json and verify every referenced file exists.

    Per-channel decoding (and the shape check against the declared resolution)
    happens lazily at access time so large corpora load fast.
    """
    path = Path(path)
    if path.is_dir():
        path = path / MANIFEST_NAME
    if not path.exists():
        raise DataError(f"missing manifest: {path}")
    try:
        payload = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise DataError(f"cannot parse manifest {path}: {exc}") from exc
    root = path.parent
    records = []
    seen = set()
    for raw in payload.get("records", []):
        rec = ManifestRecord(id=raw["id"], kind=raw["kind"], paths=dict(raw["paths"]),
                             source=raw.get("source", "external"), seed=int(raw.get("seed", 0)))
        if rec.kind not in RECORD_KINDS:
            raise DataError(f"record {rec.id}: unknown kind {rec.kind!r}")
        if rec.id in seen:
            raise DataError(f"duplicate record id {rec.id!r}")
        seen.add(rec.id)
        for channel, rel in rec.paths.items():
            if not (root / rel).exists():
                raise DataError(f"record {rec.id}: missing {channel} file: {root / rel}")
        records.append(rec)
    resolution = tuple(payload.get("resolution", (0, 0)))
    return DatasetManifest(root=root, resolution=resolution, records=records)


def draw_unpaired_indices(manifest: DatasetManifest, batch_size: int,
                          rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Independent index draws into the intrinsic and real record lists."""
    intrinsic = manifest.by_kind("intrinsic")
    real = manifest.by_kind("real")
    if not intrinsic:
        raise DataError("no intrinsic records")
    if not real:
        raise DataError("no real records")
    idx_m = rng.integers(0, len(intrinsic), size=batch_size)
    idx_r = rng.integers(0, len(real), size=batch_size)
    return idx_m, idx_r


def sample_unpaired_batch(manifest: DatasetManifest, batch_size: int,
                          rng: np.random.Generator) -> tuple[list[IntrinsicMaps], list[ImageTensor]]:
    """Draw batch_size intrinsic maps and batch_size real images independently.

    The two index draws share no correlation (unpaired regime) and are
    deterministic under a fixed rng state.
    """
    idx_m, idx_r = draw_unpaired_indices(manifest, batch_size, rng)
    intrinsic = manifest.by_kind("intrinsic")
    real = manifest.by_kind("real")
    maps = [manifest.load_intrinsics(intrinsic[i]) for i in idx_m]
    images = [manifest.load_real(real[i]) for i in idx_r]
    return maps, images


def paired_records(manifest: DatasetManifest) -> list[tuple[IntrinsicMaps, ImageTensor]]:
    """Load every paired record (evaluation manifests)."""
    out = []
    for rec in manifest.by_kind("paired"):
        out.append((manifest.load_intrinsics(rec), manifest.load_real(rec)))
    return out
