"""Pseudo-real image oracle: Lambert shading plus additive reflections.

This stands in for a photo corpus. Because the compositor is known in closed
form, every pseudo-real image has exact ground-truth intrinsics, which is what
makes the held-out decomposition metrics checkable.
"""

from __future__ import annotations

import numpy as np

from ..errors import ConfigError
from .types import ImageTensor, IntrinsicMaps


def phong_composite(m: IntrinsicMaps, light_direction: np.ndarray, ambient: float,
                    rng: np.random.Generator | int | None = 0) -> ImageTensor:
    """Shade intrinsics into a pseudo-real image in the [-1, 1] encoding.

    Foreground: clamp(albedo * (ambient + (1-ambient) * max(0, n.l)) + reflections, 0, 1).
    Background: one random solid color drawn from ``rng`` (so the result is
    deterministic given the seed). ``light_direction`` must be a unit vector in
    the same (camera) coordinate frame as ``m.normals``.
    """
    light = np.asarray(light_direction, dtype=np.float64)
    if abs(np.linalg.norm(light) - 1.0) > 1e-6:
        raise ConfigError(f"light_direction must be unit length, |l| = {np.linalg.norm(light):.6f}")
    if not (0.0 <= ambient <= 1.0):
        raise ConfigError(f"ambient must be in [0,1], got {ambient}")
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)

    n_dot_l = np.clip(np.sum(m.normals * light, axis=-1), 0.0, None)
    shade = ambient + (1.0 - ambient) * n_dot_l
    img = np.clip(m.albedo * shade[..., None] + m.reflections, 0.0, 1.0)

    background = rng.uniform(0.0, 1.0, size=3)
    img = np.where(m.foreground_mask[..., None], img, background)
    return ImageTensor.from_unit(img)
