"""On-disk channel formats.

Albedo/reflections/real images are 8-bit RGB PNGs in [0,1]; normals are 16-bit
RGB PNGs under n_enc = (n+1)/2; the foreground mask is a 1-bit PNG. Round trips
are lossless within quantization: 1/255 per 8-bit channel, 1/65535 for normals.
"""

from __future__ import annotations

import os
from pathlib import Path

import cv2
import numpy as np
from PIL import Image

from ..errors import DataError
from .types import ImageTensor, IntrinsicMaps

CHANNEL_SUFFIXES = {
    "albedo": "_albedo.png",
    "normal": "_normal.png",
    "refl": "_refl.png",
    "mask": "_mask.png",
    "real": "_real.png",
}


def channel_paths(record_id: str, kinds=("albedo", "normal", "refl", "mask")) -> dict[str, str]:
    return {k: record_id + CHANNEL_SUFFIXES[k] for k in kinds}


def _write_u8_rgb(path: Path, img01: np.ndarray) -> None:
    arr = np.round(np.clip(img01, 0.0, 1.0) * 255.0).astype(np.uint8)
    Image.fromarray(arr, mode="RGB").save(path)


def _read_u8_rgb(path: Path, channel: str) -> np.ndarray:
    if not os.path.exists(path):
        raise DataError(f"missing {channel} file: {path}")
    try:
        arr = np.array(Image.open(path).convert("RGB"))
    except Exception as exc:
        raise DataError(f"cannot decode {channel} file {path}: {exc}") from exc
    return arr.astype(np.float64) / 255.0


def _write_u16_normals(path: Path, normals: np.ndarray) -> None:
    enc = np.clip((normals + 1.0) * 0.5, 0.0, 1.0)
    arr = np.round(enc * 65535.0).astype(np.uint16)
    # cv2 writes BGR channel order
    cv2.imwrite(str(path), arr[..., ::-1])


def _read_u16_normals(path: Path) -> np.ndarray:
    if not os.path.exists(path):
        raise DataError(f"missing normal file: {path}")
    arr = cv2.imread(str(path), cv2.IMREAD_UNCHANGED)
    if arr is None or arr.ndim != 3 or arr.dtype != np.uint16:
        raise DataError(f"cannot decode normal file {path} as 16-bit RGB")
    return arr[..., ::-1].astype(np.float64) / 65535.0 * 2.0 - 1.0


def _write_mask(path: Path, mask: np.ndarray) -> None:
    Image.fromarray(mask.astype(bool)).save(path)


def _read_mask(path: Path) -> np.ndarray:
    if not os.path.exists(path):
        raise DataError(f"missing mask file: {path}")
    arr = np.array(Image.open(path))
    if arr.ndim == 3:
        arr = arr[..., 0]
    if arr.dtype == bool:
        return arr
    return arr > (127 if arr.dtype == np.uint8 else 0)


def encode_intrinsics(m: IntrinsicMaps, directory: Path | str, record_id: str) -> dict[str, str]:
    """Write the four channel files for one record; returns relative file names."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = channel_paths(record_id)
    _write_u8_rgb(directory / paths["albedo"], m.albedo)
    _write_u16_normals(directory / paths["normal"], m.normals)
    _write_u8_rgb(directory / paths["refl"], m.reflections)
    _write_mask(directory / paths["mask"], m.foreground_mask)
    return paths


def decode_intrinsics(directory: Path | str, record_id: str | None = None,
                      paths: dict[str, str] | None = None) -> IntrinsicMaps:
    """Load one record's channel files back into IntrinsicMaps.

    Raises DataError naming the channel when a file is missing or undecodable,
    and when the channels disagree on shape.
    """
    directory = Path(directory)
    if paths is None:
        if record_id is None:
            raise ValueError("need record_id or explicit paths")
        paths = channel_paths(record_id)
    albedo = _read_u8_rgb(directory / paths["albedo"], "albedo")
    normals = _read_u16_normals(directory / paths["normal"])
    refl = _read_u8_rgb(directory / paths["refl"], "refl")
    mask = _read_mask(directory / paths["mask"])
    shapes = {albedo.shape, normals.shape, refl.shape, mask.shape + (3,)}
    if len(shapes) != 1:
        raise DataError(f"channel shape mismatch for record files in {directory}: {sorted(shapes)}")
    # the mask is authoritative: re-zero background pixels, since the 16-bit
    # normal encoding cannot represent (n+1)/2 = 0.5 exactly (65535 is odd)
    bg = ~mask
    albedo[bg] = 0.0
    normals[bg] = 0.0
    refl[bg] = 0.0
    return IntrinsicMaps(albedo=albedo, normals=normals, reflections=refl,
                         foreground_mask=mask)


def encode_real(image: ImageTensor, directory: Path | str, record_id: str) -> dict[str, str]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = channel_paths(record_id, kinds=("real",))
    _write_u8_rgb(directory / paths["real"], image.to_unit())
    return paths


def decode_real(directory: Path | str, record_id: str | None = None,
                paths: dict[str, str] | None = None) -> ImageTensor:
    if paths is None:
        if record_id is None:
            raise ValueError("need record_id or explicit paths")
        paths = channel_paths(record_id, kinds=("real",))
    img01 = _read_u8_rgb(Path(directory) / paths["real"], "real")
    return ImageTensor.from_unit(img01)
