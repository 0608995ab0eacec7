/** Equirectangular environment maps: bilinear lookup with azimuth seam wrap and
 * pole clamping. Row 0 is the zenith (+Z), the u axis follows atan2(y, x). */

import * as fs from "node:fs";
import { decodePng } from "./png.js";
import { Vec3 } from "./vec.js";

export type EnvironmentMap = {
  width: number;
  height: number;
  data: Float32Array; // row-major RGB, radiance >= 0
};

export function loadEnvMap(path: string): EnvironmentMap {
  const png = decodePng(fs.readFileSync(path));
  const data = new Float32Array(png.width * png.height * 3);
  for (let p = 0; p < png.width * png.height; p++) {
    for (let c = 0; c < 3; c++) {
      data[p * 3 + c] = png.values[p * png.channels + Math.min(c, png.channels - 1)];
    }
  }
  const env = { width: png.width, height: png.height, data };
  validateEnv(env);
  return env;
}

export function validateEnv(env: EnvironmentMap): void {
  for (let i = 0; i < env.data.length; i++) {
    const v = env.data[i];
    if (!Number.isFinite(v) || v < 0) throw new Error("environment map must be finite and non-negative");
  }
}

/** Simple sky gradient (zenith blue, bright horizon, dark ground) as a generated
 * equirect map; handy default when no HDR asset is available. */
export function makeGradientEnv(width = 64, height = 32): EnvironmentMap {
  const zenith = [0.3, 0.5, 0.85];
  const horizon = [0.85, 0.88, 0.95];
  const ground = [0.25, 0.22, 0.2];
  const data = new Float32Array(width * height * 3);
  for (let y = 0; y < height; y++) {
    const lat = Math.PI / 2 - ((y + 0.5) / height) * Math.PI; // +pi/2 .. -pi/2
    const z = Math.sin(lat);
    for (let x = 0; x < width; x++) {
      for (let c = 0; c < 3; c++) {
        const v = z >= 0
          ? horizon[c] * (1 - z) + zenith[c] * z
          : horizon[c] * (1 + z) + ground[c] * -z;
        data[(y * width + x) * 3 + c] = v;
      }
    }
  }
  return { width, height, data };
}

function texel(env: EnvironmentMap, x: number, y: number): Vec3 {
  // wrap u, clamp v
  const xi = ((x % env.width) + env.width) % env.width;
  const yi = Math.min(Math.max(y, 0), env.height - 1);
  const p = (yi * env.width + xi) * 3;
  return [env.data[p], env.data[p + 1], env.data[p + 2]];
}

/** Bilinear equirectangular sample along a unit direction. */
export function envLookup(env: EnvironmentMap, dir: Vec3): Vec3 {
  const u = (Math.atan2(dir[1], dir[0]) / (2 * Math.PI) + 0.5) * env.width - 0.5;
  const clampedZ = Math.min(Math.max(dir[2], -1), 1);
  const v = (0.5 - Math.asin(clampedZ) / Math.PI) * env.height - 0.5;
  const x0 = Math.floor(u);
  const y0 = Math.floor(v);
  const fx = u - x0;
  const fy = v - y0;
  const out: Vec3 = [0, 0, 0];
  const c00 = texel(env, x0, y0);
  const c10 = texel(env, x0 + 1, y0);
  const c01 = texel(env, x0, y0 + 1);
  const c11 = texel(env, x0 + 1, y0 + 1);
  for (let c = 0; c < 3; c++) {
    out[c] = (c00[c] * (1 - fx) + c10[c] * fx) * (1 - fy)
      + (c01[c] * (1 - fx) + c11[c] * fx) * fy;
  }
  return out;
}
