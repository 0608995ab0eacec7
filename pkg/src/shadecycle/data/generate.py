"""Analytic corpus generation: unpaired training records plus a paired eval split.

Intrinsic records and pseudo-real records are produced from disjoint scene
streams, so the training corpus is unpaired by construction. The eval split
keeps scene/image pairs together (kind "paired") to make held-out
decomposition errors computable.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from ..errors import ConfigError, DataError
from .composite import phong_composite
from .io import encode_intrinsics, encode_real
from .manifest import DatasetManifest, ManifestRecord, save_manifest
from .primitives import analytic_primitive_gbuffer
from .types import CameraSample, ImageTensor, IntrinsicMaps, PRIMITIVE_SHAPES, PrimitiveScene

EVAL_SUBDIR = "eval"


def sample_scene(rng: np.random.Generator, scene_id: str = "scene") -> PrimitiveScene:
    """Draw one primitive scene: shape, colors, gloss, a camera inside the
    8 m radius / 3 m height envelope, and a camera-space light direction."""
    shape = PRIMITIVE_SHAPES[rng.integers(0, len(PRIMITIVE_SHAPES))]
    body = rng.uniform(0.08, 0.95, size=3)
    n_parts = int(rng.integers(0, 5))
    parts = [rng.uniform(0.08, 0.95, size=3) for _ in range(n_parts)]
    gloss = float(rng.uniform(0.0, 0.9))

    radius = float(rng.uniform(2.5, 8.0))
    azimuth = float(rng.uniform(0.0, 2 * np.pi))
    height = float(rng.uniform(0.3, 3.0))
    position = np.array([radius * np.cos(azimuth), radius * np.sin(azimuth), height])
    look_at = rng.uniform(-0.15, 0.15, size=3)
    fov = float(rng.uniform(30.0, 55.0))

    # light in camera space, biased toward the camera so shading carries a
    # stable normal cue across the corpus
    light = rng.normal(size=3)
    light[:2] *= 0.35
    light[2] = abs(light[2]) * 0.3 + 1.0
    light = light / np.linalg.norm(light)

    return PrimitiveScene(shape=shape, body_color=body, part_colors=parts,
                          glossiness=gloss, light_direction=light,
                          camera=CameraSample(position, look_at, fov),
                          scene_id=scene_id)


def render_scene(rng: np.random.Generator, resolution: tuple[int, int],
                 scene_id: str, max_tries: int = 8) -> tuple[PrimitiveScene, IntrinsicMaps]:
    """Sample scenes until one is visible from its camera (resampling on
    degenerate framings)."""
    last_err = None
    for _ in range(max_tries):
        scene = sample_scene(rng, scene_id)
        try:
            return scene, analytic_primitive_gbuffer(scene, resolution)
        except DataError as exc:
            last_err = exc
    raise DataError(f"could not frame scene {scene_id} after {max_tries} tries: {last_err}")


def _pseudo_real(rng: np.random.Generator, scene: PrimitiveScene,
                 m: IntrinsicMaps) -> ImageTensor:
    ambient = float(rng.uniform(0.15, 0.4))
    return phong_composite(m, scene.light_direction, ambient, rng)


def import_real_directory(src_dir: Path | str, out_dir: Path | str,
                          resolution: tuple[int, int]) -> list[ManifestRecord]:
    """Read a directory of RGB images into `real` records (letterbox resize).

    Returns the records; channel files are written into out_dir. This is the
    full extent of real-photo ingestion: no augmentation, no pairing.
    """
    from PIL import Image

    src_dir = Path(src_dir)
    out_dir = Path(out_dir)
    files = sorted(p for p in src_dir.iterdir()
                   if p.suffix.lower() in (".png", ".jpg", ".jpeg", ".bmp"))
    if not files:
        raise DataError(f"no images found in {src_dir}")
    th, tw = resolution
    records = []
    for k, path in enumerate(files):
        try:
            img = Image.open(path).convert("RGB")
        except Exception as exc:
            raise DataError(f"cannot decode image {path}: {exc}") from exc
        scale = min(th / img.height, tw / img.width)
        nh = max(int(round(img.height * scale)), 1)
        nw = max(int(round(img.width * scale)), 1)
        img = img.resize((nw, nh), Image.BILINEAR)
        canvas = np.full((th, tw, 3), 0.5)
        y0, x0 = (th - nh) // 2, (tw - nw) // 2
        canvas[y0:y0 + nh, x0:x0 + nw] = np.asarray(img, dtype=np.float64) / 255.0
        rec_id = f"ext{k:05d}"
        paths = encode_real(ImageTensor.from_unit(canvas), out_dir, rec_id)
        records.append(ManifestRecord(id=rec_id, kind="real", paths=paths,
                                      source="external", seed=0))
    return records


def generate_corpus(out_dir: Path | str, count: int, resolution: tuple[int, int],
                    seed: int, eval_count: int | None = None,
                    real_dir: Path | str | None = None) -> tuple[Path, Path]:
    """Emit ``count`` intrinsic + ``count`` pseudo-real training records (unpaired)
    and an eval manifest of paired records. Returns (train manifest path, eval
    manifest path). Deterministic in ``seed``.

    With ``real_dir``, the real domain is imported from that directory of RGB
    images instead of being synthesized (the paired eval split stays analytic so
    intrinsic errors remain measurable).
    """
    if count <= 0:
        raise ConfigError(f"count must be positive, got {count}")
    if eval_count is None:
        eval_count = max(8, count // 10)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    eval_dir = out_dir / EVAL_SUBDIR
    eval_dir.mkdir(parents=True, exist_ok=True)

    root_seq = np.random.SeedSequence(seed)
    rng_m, rng_r, rng_e = [np.random.default_rng(s) for s in root_seq.spawn(3)]

    train = DatasetManifest(root=out_dir, resolution=tuple(resolution))
    for i in range(count):
        rec_id = f"syn{i:05d}"
        _, m = render_scene(rng_m, resolution, rec_id)
        paths = encode_intrinsics(m, out_dir, rec_id)
        train.records.append(ManifestRecord(id=rec_id, kind="intrinsic", paths=paths,
                                            source="analytic", seed=seed))
    if real_dir is not None:
        train.records.extend(import_real_directory(real_dir, out_dir, resolution))
    else:
        for i in range(count):
            rec_id = f"img{i:05d}"
            scene, m = render_scene(rng_r, resolution, rec_id)
            paths = encode_real(_pseudo_real(rng_r, scene, m), out_dir, rec_id)
            train.records.append(ManifestRecord(id=rec_id, kind="real", paths=paths,
                                                source="analytic", seed=seed))
    train_path = save_manifest(train)

    holdout = DatasetManifest(root=eval_dir, resolution=tuple(resolution))
    for i in range(eval_count):
        rec_id = f"eval{i:05d}"
        scene, m = render_scene(rng_e, resolution, rec_id)
        paths = encode_intrinsics(m, eval_dir, rec_id)
        paths.update(encode_real(_pseudo_real(rng_e, scene, m), eval_dir, rec_id))
        holdout.records.append(ManifestRecord(id=rec_id, kind="paired", paths=paths,
                                              source="analytic", seed=seed))
    eval_path = save_manifest(holdout)
    return train_path, eval_path
