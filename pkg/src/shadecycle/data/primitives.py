"""Closed-form G-buffers for sphere/box/capsule scenes.

Per-pixel rays are intersected analytically (no rasterization), so foreground
normals are exact surface normals before quantization. Normals are reported in
camera coordinates; environment reflections use a procedural sky gradient
looked up along the mirrored view direction in world space.
"""

from __future__ import annotations

import numpy as np

from ..errors import ConfigError, DataError
from .types import CameraSample, IntrinsicMaps, PrimitiveScene

# Canonical object sizes (meters); scene variety comes from camera/colors/light.
SPHERE_RADIUS = 1.0
BOX_HALF_EXTENTS = np.array([1.1, 0.75, 0.65])
CAPSULE_HALF_LENGTH = 0.8
CAPSULE_RADIUS = 0.55

WORLD_UP = np.array([0.0, 0.0, 1.0])

_SKY_ZENITH = np.array([0.30, 0.50, 0.85])
_SKY_HORIZON = np.array([0.85, 0.88, 0.95])
_SKY_GROUND = np.array([0.25, 0.22, 0.20])
# a soft sun lobe breaks the azimuthal symmetry of the gradient, so reflection
# colors constrain every component of the surface normal, not just elevation
_SUN_DIR = np.array([0.5547, 0.3328, 0.7632])
_SUN_COLOR = np.array([0.9, 0.82, 0.6])
_SUN_SHARPNESS = 16.0


def camera_basis(camera: CameraSample) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Right/up/forward unit vectors of the camera frame (camera looks down -Z)."""
    forward = camera.look_at - camera.position
    forward = forward / np.linalg.norm(forward)
    up = WORLD_UP
    if np.linalg.norm(np.cross(forward, up)) < 1e-8:
        up = np.array([0.0, 1.0, 0.0])
    right = np.cross(forward, up)
    right = right / np.linalg.norm(right)
    true_up = np.cross(right, forward)
    return right, true_up, forward


def world_to_camera(vectors: np.ndarray, camera: CameraSample) -> np.ndarray:
    """Rotate world-space direction vectors (..., 3) into camera space."""
    right, up, forward = camera_basis(camera)
    rot = np.stack([right, up, -forward], axis=0)
    return vectors @ rot.T


def pixel_rays(camera: CameraSample, resolution: tuple[int, int]) -> tuple[np.ndarray, np.ndarray]:
    """World-space ray origins and unit directions through every pixel center.

    Returns (origin (3,), directions (H, W, 3)).
    """
    h, w = resolution
    right, up, forward = camera_basis(camera)
    tan_half = np.tan(np.deg2rad(camera.fov_y) * 0.5)
    aspect = w / h
    xs = ((np.arange(w) + 0.5) / w * 2.0 - 1.0) * tan_half * aspect
    ys = (1.0 - (np.arange(h) + 0.5) / h * 2.0) * tan_half
    dirs = (xs[None, :, None] * right[None, None, :]
            + ys[:, None, None] * up[None, None, :]
            + forward[None, None, :])
    dirs = dirs / np.linalg.norm(dirs, axis=-1, keepdims=True)
    return camera.position, dirs


def reflect_directions(view: np.ndarray, normal: np.ndarray) -> np.ndarray:
    """Mirror view directions about surface normals: r = v - 2 (v.n) n."""
    dot = np.sum(view * normal, axis=-1, keepdims=True)
    return view - 2.0 * dot * normal


def sky_gradient(directions: np.ndarray) -> np.ndarray:
    """Procedural environment radiance in [0,1]^3 from world-space directions:
    a vertical sky/ground gradient plus a fixed soft sun lobe."""
    z = np.clip(directions[..., 2], -1.0, 1.0)
    above = np.clip(z, 0.0, 1.0)[..., None]
    below = np.clip(-z, 0.0, 1.0)[..., None]
    sky = _SKY_HORIZON * (1.0 - above) + _SKY_ZENITH * above
    ground = _SKY_HORIZON * (1.0 - below) + _SKY_GROUND * below
    base = np.where(z[..., None] >= 0.0, sky, ground)
    sun = np.clip(np.sum(directions * _SUN_DIR, axis=-1), 0.0, 1.0) ** _SUN_SHARPNESS
    return np.clip(base + sun[..., None] * _SUN_COLOR, 0.0, 1.0)


def _intersect_sphere(origin, dirs):
    oc = origin[None, None, :]
    b = np.sum(oc * dirs, axis=-1)
    c = np.dot(origin, origin) - SPHERE_RADIUS ** 2
    disc = b * b - c
    hit = disc >= 0.0
    t = np.where(hit, -b - np.sqrt(np.maximum(disc, 0.0)), np.inf)
    hit &= t > 1e-6
    t = np.where(hit, t, np.inf)
    points = origin[None, None, :] + np.where(hit, t, 0.0)[..., None] * dirs
    normals = points / SPHERE_RADIUS
    return hit, t, points, normals


def _intersect_box(origin, dirs):
    he = BOX_HALF_EXTENTS
    with np.errstate(divide="ignore", invalid="ignore"):
        inv = 1.0 / dirs
    t1 = (-he[None, None, :] - origin[None, None, :]) * inv
    t2 = (he[None, None, :] - origin[None, None, :]) * inv
    tmin_axis = np.minimum(t1, t2)
    tmax_axis = np.maximum(t1, t2)
    tnear = tmin_axis.max(axis=-1)
    tfar = tmax_axis.min(axis=-1)
    hit = (tnear <= tfar) & (tfar > 1e-6) & (tnear > 1e-6)
    t = np.where(hit, tnear, np.inf)
    points = origin[None, None, :] + np.where(hit, t, 0.0)[..., None] * dirs
    # entry face = the slab axis whose tmin realized tnear
    axis = np.argmax(tmin_axis, axis=-1)
    normals = np.zeros_like(points)
    idx = np.indices(axis.shape)
    normals[idx[0], idx[1], axis] = -np.sign(dirs[idx[0], idx[1], axis])
    return hit, t, points, normals


def _capsule_closest_axis_point(points):
    x = np.clip(points[..., 0], -CAPSULE_HALF_LENGTH, CAPSULE_HALF_LENGTH)
    closest = np.zeros_like(points)
    closest[..., 0] = x
    return closest


def _intersect_capsule(origin, dirs):
    # cylinder body around the x axis
    oy, oz = origin[1], origin[2]
    dy, dz = dirs[..., 1], dirs[..., 2]
    a = dy * dy + dz * dz
    b = oy * dy + oz * dz
    c = oy * oy + oz * oz - CAPSULE_RADIUS ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        disc = b * b - a * c
        t_cyl = np.where(disc >= 0.0, (-b - np.sqrt(np.maximum(disc, 0.0))) / a, np.inf)
    x_at = origin[0] + t_cyl * dirs[..., 0]
    cyl_ok = (t_cyl > 1e-6) & np.isfinite(t_cyl) & (np.abs(x_at) <= CAPSULE_HALF_LENGTH)
    t_cyl = np.where(cyl_ok, t_cyl, np.inf)

    # two sphere caps
    t_best = t_cyl
    for cx in (-CAPSULE_HALF_LENGTH, CAPSULE_HALF_LENGTH):
        center = np.array([cx, 0.0, 0.0])
        oc = origin - center
        bs = np.sum(oc[None, None, :] * dirs, axis=-1)
        cs = np.dot(oc, oc) - CAPSULE_RADIUS ** 2
        disc = bs * bs - cs
        t_cap = np.where(disc >= 0.0, -bs - np.sqrt(np.maximum(disc, 0.0)), np.inf)
        t_cap = np.where(t_cap > 1e-6, t_cap, np.inf)
        t_best = np.minimum(t_best, t_cap)

    hit = np.isfinite(t_best)
    t = np.where(hit, t_best, np.inf)
    points = origin[None, None, :] + np.where(hit, t, 0.0)[..., None] * dirs
    normals = (points - _capsule_closest_axis_point(points)) / CAPSULE_RADIUS
    return hit, t, points, normals


_INTERSECTORS = {
    "sphere": _intersect_sphere,
    "box": _intersect_box,
    "capsule": _intersect_capsule,
}


def _part_albedo(scene: PrimitiveScene, points: np.ndarray) -> np.ndarray:
    """Flat per-part colors from object-space position: longitude wedges
    alternating between the body color and the part palette."""
    albedo = np.broadcast_to(scene.body_color, points.shape).copy()
    k = len(scene.part_colors)
    if k == 0:
        return albedo
    ang = np.arctan2(points[..., 1], points[..., 0])
    wedge = np.floor((ang + np.pi) / (2.0 * np.pi) * (2 * k)).astype(int) % (2 * k)
    for i, color in enumerate(scene.part_colors):
        albedo[wedge == (2 * i + 1)] = color
    return albedo


def analytic_primitive_gbuffer(scene: PrimitiveScene,
                               resolution: tuple[int, int]) -> IntrinsicMaps:
    """Render exact G-buffers (albedo, camera-space normals, reflections) for a scene.

    Albedo is the part color with no lighting; reflections are
    glossiness * sky_gradient(reflect(view, normal)); background pixels are
    zero everywhere with mask False. Raises DataError if the object is fully
    out of frame (degenerate camera).
    """
    h, w = resolution
    if h <= 0 or w <= 0:
        raise ConfigError(f"resolution must be positive, got {resolution}")
    origin, dirs = pixel_rays(scene.camera, resolution)
    hit, _, points, normals_world = _INTERSECTORS[scene.shape](origin, dirs)
    if not hit.any():
        raise DataError(f"scene {scene.scene_id}: object fully out of frame")

    normals_world = np.where(hit[..., None], normals_world, 0.0)
    albedo = np.where(hit[..., None], _part_albedo(scene, points), 0.0)

    refl_dirs = reflect_directions(dirs, normals_world)
    reflections = scene.glossiness * sky_gradient(refl_dirs)
    reflections = np.where(hit[..., None], reflections, 0.0)

    normals_cam = world_to_camera(normals_world, scene.camera)
    normals_cam = np.where(hit[..., None], normals_cam, 0.0)

    return IntrinsicMaps(albedo=albedo, normals=normals_cam,
                         reflections=reflections, foreground_mask=hit)
