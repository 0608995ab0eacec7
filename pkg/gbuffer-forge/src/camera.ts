/** Camera model shared with the companion training pipeline: world up is +Z,
 * the camera looks down its own -Z axis, fov_y is in degrees. */

import { cross, normalize, sub, Vec3 } from "./vec.js";
import { Rng } from "./rng.js";

export type CameraSample = {
  position: Vec3;
  lookAt: Vec3;
  fovY: number;
};

export type CameraConstraints = {
  minRadius: number;
  maxRadius: number;
  minHeight: number;
  maxHeight: number;
  minFov: number;
  maxFov: number;
  lookAtJitter: number;
};

export const DEFAULT_CONSTRAINTS: CameraConstraints = {
  minRadius: 2.5,
  maxRadius: 8.0,
  minHeight: 0.3,
  maxHeight: 3.0,
  minFov: 30.0,
  maxFov: 55.0,
  lookAtJitter: 0.15,
};

export function sampleCamera(rng: Rng, constraints: Partial<CameraConstraints> = {}): CameraSample {
  const c = { ...DEFAULT_CONSTRAINTS, ...constraints };
  if (c.minRadius > c.maxRadius || c.minHeight > c.maxHeight || c.minFov > c.maxFov) {
    throw new Error("infeasible camera constraints (min exceeds max)");
  }
  if (c.maxRadius > 8.0 + 1e-9 || c.maxHeight > 3.0 + 1e-9) {
    throw new Error("camera constraints exceed the 8 m radius / 3 m height envelope");
  }
  const radius = rng.uniform(c.minRadius, c.maxRadius);
  const azimuth = rng.uniform(0, 2 * Math.PI);
  const height = rng.uniform(c.minHeight, c.maxHeight);
  const position: Vec3 = [radius * Math.cos(azimuth), radius * Math.sin(azimuth), height];
  const lookAt: Vec3 = [
    rng.uniform(-c.lookAtJitter, c.lookAtJitter),
    rng.uniform(-c.lookAtJitter, c.lookAtJitter),
    rng.uniform(-c.lookAtJitter, c.lookAtJitter),
  ];
  return { position, lookAt, fovY: rng.uniform(c.minFov, c.maxFov) };
}

export type CameraBasis = { right: Vec3; up: Vec3; forward: Vec3 };

export function cameraBasis(camera: CameraSample): CameraBasis {
  const forward = normalize(sub(camera.lookAt, camera.position));
  let up: Vec3 = [0, 0, 1];
  const c = cross(forward, up);
  if (Math.hypot(c[0], c[1], c[2]) < 1e-8) up = [0, 1, 0];
  const right = normalize(cross(forward, up));
  const trueUp = cross(right, forward);
  return { right, up: trueUp, forward };
}

/** Rotate a world-space direction into camera coordinates. */
export function worldToCamera(v: Vec3, basis: CameraBasis): Vec3 {
  return [
    v[0] * basis.right[0] + v[1] * basis.right[1] + v[2] * basis.right[2],
    v[0] * basis.up[0] + v[1] * basis.up[1] + v[2] * basis.up[2],
    -(v[0] * basis.forward[0] + v[1] * basis.forward[1] + v[2] * basis.forward[2]),
  ];
}
