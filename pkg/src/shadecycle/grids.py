"""PNG mosaics for training logs and the eval CLI."""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image


def _to_tile(img01: np.ndarray) -> np.ndarray:
    return np.round(np.clip(img01, 0.0, 1.0) * 255.0).astype(np.uint8)


def tile_grid(rows: list[list[np.ndarray]], pad: int = 2) -> np.ndarray:
    """Assemble rows of HxWx3 [0,1] tiles into one image array."""
    h, w = rows[0][0].shape[:2]
    n_cols = max(len(r) for r in rows)
    out = np.full((len(rows) * (h + pad) - pad, n_cols * (w + pad) - pad, 3), 255,
                  dtype=np.uint8)
    for i, row in enumerate(rows):
        for j, tile in enumerate(row):
            y, x = i * (h + pad), j * (w + pad)
            out[y:y + h, x:x + w] = _to_tile(tile)
    return out


def save_grid(path: Path | str, rows: list[list[np.ndarray]]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(tile_grid(rows), mode="RGB").save(path)


def stack_to_tiles(stack: np.ndarray) -> list[np.ndarray]:
    """Split a (9, H, W) network-encoding stack into displayable [0,1] tiles
    (albedo, normals, reflections)."""
    a = np.moveaxis(stack[0:3], 0, -1) * 0.5 + 0.5
    n = np.moveaxis(stack[3:6], 0, -1) * 0.5 + 0.5
    f = np.moveaxis(stack[6:9], 0, -1) * 0.5 + 0.5
    return [a, n, f]


def image_to_tile(img: np.ndarray) -> np.ndarray:
    """(3, H, W) [-1,1] image to an HxWx3 [0,1] tile."""
    return np.moveaxis(img, 0, -1) * 0.5 + 0.5
