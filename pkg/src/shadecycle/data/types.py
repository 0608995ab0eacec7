"""Core pixel-domain containers shared by the data pipeline, networks and metrics."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError


@dataclass
class IntrinsicMaps:
    """The 9-channel per-pixel scene description: albedo, camera-space normals, reflections.

    All maps are H x W x 3 float arrays. Albedo and reflections live in [0, 1];
    normals are per-pixel 3-vectors in camera coordinates (unit length on the
    foreground of ground-truth data). The boolean foreground mask is authoritative:
    background pixels carry zeros in every map. The mask itself is never part of
    the network input.
    """

    albedo: np.ndarray
    normals: np.ndarray
    reflections: np.ndarray
    foreground_mask: np.ndarray

    def __post_init__(self):
        shapes = {self.albedo.shape, self.normals.shape, self.reflections.shape}
        if len(shapes) != 1:
            raise ValueError(f"channel shapes differ: {sorted(shapes)}")
        if self.albedo.ndim != 3 or self.albedo.shape[2] != 3:
            raise ValueError(f"expected HxWx3 maps, got {self.albedo.shape}")
        if self.foreground_mask.shape != self.albedo.shape[:2]:
            raise ValueError(
                f"mask shape {self.foreground_mask.shape} != map shape {self.albedo.shape[:2]}"
            )

    @property
    def resolution(self) -> tuple[int, int]:
        return self.albedo.shape[0], self.albedo.shape[1]

    def validate(self, normal_tol: float = 1e-3) -> None:
        """Check the ground-truth invariants (unit normals on foreground, zero background)."""
        fg = self.foreground_mask
        if fg.any():
            norms = np.linalg.norm(self.normals[fg], axis=-1)
            worst = float(np.abs(norms - 1.0).max())
            if worst > normal_tol:
                raise ValueError(f"foreground normals deviate from unit length by {worst:.2e}")
        bg = ~fg
        for name, arr in (("albedo", self.albedo), ("normals", self.normals),
                          ("reflections", self.reflections)):
            if bg.any() and np.abs(arr[bg]).max() > 0:
                raise ValueError(f"{name} non-zero on background pixels")

    def to_network(self) -> np.ndarray:
        """Stack into the 9-channel [-1, 1] network encoding, channels-first.

        Albedo and reflections map [0,1] -> [-1,1]; normal components are
        already in [-1,1] and pass through unchanged. Returns (9, H, W) float32.
        """
        a = self.albedo.astype(np.float32) * 2.0 - 1.0
        n = self.normals.astype(np.float32)
        f = self.reflections.astype(np.float32) * 2.0 - 1.0
        return np.concatenate([np.moveaxis(a, -1, 0), np.moveaxis(n, -1, 0),
                               np.moveaxis(f, -1, 0)], axis=0)

    @staticmethod
    def from_network(stack: np.ndarray, mask: np.ndarray | None = None) -> "IntrinsicMaps":
        """Inverse of :meth:`to_network` for raw 9-channel network output.

        Albedo/reflections are clipped back into [0,1]; normals are passed
        through raw (the decomposer's normal head is unbounded by design).
        """
        if stack.ndim != 3 or stack.shape[0] != 9:
            raise ValueError(f"expected (9, H, W) stack, got {stack.shape}")
        h, w = stack.shape[1:]
        if mask is None:
            mask = np.ones((h, w), dtype=bool)
        a = np.clip(np.moveaxis(stack[0:3], 0, -1) * 0.5 + 0.5, 0.0, 1.0)
        n = np.moveaxis(stack[3:6], 0, -1).astype(np.float64)
        f = np.clip(np.moveaxis(stack[6:9], 0, -1) * 0.5 + 0.5, 0.0, 1.0)
        return IntrinsicMaps(albedo=a, normals=n, reflections=f, foreground_mask=mask)


@dataclass
class ImageTensor:
    """An H x W x 3 RGB image in the [-1, 1] network value range."""

    pixels: np.ndarray

    def __post_init__(self):
        if self.pixels.ndim != 3 or self.pixels.shape[2] != 3:
            raise ValueError(f"expected HxWx3 pixels, got {self.pixels.shape}")
        self.pixels = np.clip(self.pixels, -1.0, 1.0)

    @property
    def resolution(self) -> tuple[int, int]:
        return self.pixels.shape[0], self.pixels.shape[1]

    @staticmethod
    def from_unit(img01: np.ndarray) -> "ImageTensor":
        return ImageTensor(pixels=img01.astype(np.float32) * 2.0 - 1.0)

    def to_unit(self) -> np.ndarray:
        return np.clip(self.pixels * 0.5 + 0.5, 0.0, 1.0)


@dataclass
class CameraSample:
    """Pinhole camera pose: position and look-at point in meters, vertical FOV in degrees.

    World convention: +Z is up; "height" is the z coordinate and the horizontal
    radius is measured in the xy plane.
    """

    position: np.ndarray
    look_at: np.ndarray
    fov_y: float

    def __post_init__(self):
        self.position = np.asarray(self.position, dtype=np.float64)
        self.look_at = np.asarray(self.look_at, dtype=np.float64)
        if not (0.0 < self.fov_y < 180.0):
            raise ConfigError(f"fov_y must be in (0, 180) degrees, got {self.fov_y}")
        if np.linalg.norm(self.position - self.look_at) < 1e-9:
            raise ConfigError("camera position coincides with look_at")


PRIMITIVE_SHAPES = ("sphere", "box", "capsule")


@dataclass
class PrimitiveScene:
    """Desk-scale scene: one analytic primitive with flat part colors and a gloss factor."""

    shape: str
    body_color: np.ndarray
    part_colors: list = field(default_factory=list)
    glossiness: float = 0.0
    light_direction: np.ndarray = None
    camera: CameraSample = None
    scene_id: str = "scene"

    def __post_init__(self):
        if self.shape not in PRIMITIVE_SHAPES:
            raise ConfigError(f"unknown primitive shape {self.shape!r}")
        self.body_color = np.asarray(self.body_color, dtype=np.float64)
        self.part_colors = [np.asarray(c, dtype=np.float64) for c in self.part_colors]
        if len(self.part_colors) > 4:
            raise ConfigError("at most 4 part colors are supported")
        for c in [self.body_color] + self.part_colors:
            if c.shape != (3,) or (c < 0).any() or (c > 1).any():
                raise ConfigError(f"colors must be RGB in [0,1]^3, got {c}")
        if not (0.0 <= self.glossiness <= 1.0):
            raise ConfigError(f"glossiness must be in [0,1], got {self.glossiness}")
        if self.light_direction is None:
            self.light_direction = np.array([0.0, 0.0, 1.0])
        self.light_direction = np.asarray(self.light_direction, dtype=np.float64)
        n = np.linalg.norm(self.light_direction)
        if abs(n - 1.0) > 1e-6:
            raise ConfigError(f"light_direction must be unit length, |l| = {n:.6f}")
        if self.camera is None:
            raise ConfigError("PrimitiveScene requires a camera")
