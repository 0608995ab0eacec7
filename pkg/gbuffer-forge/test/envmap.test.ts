import { describe, expect, it } from "vitest";
import { envLookup, EnvironmentMap, makeGradientEnv } from "../src/envmap.js";
import { makeRng } from "../src/rng.js";
import { normalize, Vec3 } from "../src/vec.js";

function constantEnv(value: number, w = 16, h = 8): EnvironmentMap {
  return { width: w, height: h, data: new Float32Array(w * h * 3).fill(value) };
}

describe("envLookup", () => {
  it("returns the constant for a constant map in any direction", () => {
    const env = constantEnv(0.37);
    const rng = makeRng(3);
    for (let k = 0; k < 100; k++) {
      const dir = normalize([rng.next() - 0.5, rng.next() - 0.5, rng.next() - 0.5]);
      const c = envLookup(env, dir);
      for (const v of c) expect(v).toBeCloseTo(0.37, 6);
    }
  });

  it("samples the top row at the zenith", () => {
    const env = constantEnv(0.0, 16, 8);
    for (let x = 0; x < env.width; x++) {
      for (let c = 0; c < 3; c++) env.data[(0 * env.width + x) * 3 + c] = 1.0;
    }
    const up = envLookup(env, [0, 0, 1]);
    for (const v of up) expect(v).toBeGreaterThan(0.95);
  });

  it("is continuous across the azimuth seam", () => {
    const env = makeGradientEnv(64, 32);
    // add azimuthal variation so the seam actually matters
    for (let y = 0; y < env.height; y++) {
      for (let x = 0; x < env.width; x++) {
        env.data[(y * env.width + x) * 3] += 0.2 * Math.sin((2 * Math.PI * (x + 0.5)) / env.width);
      }
    }
    const eps = 1e-4;
    for (const z of [-0.4, 0.0, 0.6]) {
      const r = Math.sqrt(1 - z * z);
      const a: Vec3 = [r * Math.cos(Math.PI - eps), r * Math.sin(Math.PI - eps), z];
      const b: Vec3 = [r * Math.cos(Math.PI + eps), r * Math.sin(Math.PI + eps), z];
      const ca = envLookup(env, normalize(a));
      const cb = envLookup(env, normalize(b));
      for (let c = 0; c < 3; c++) {
        expect(Math.abs(ca[c] - cb[c])).toBeLessThan(0.02);
      }
    }
  });

  it("gradient env is finite and non-negative", () => {
    const env = makeGradientEnv(32, 16);
    for (const v of env.data) {
      expect(Number.isFinite(v)).toBe(true);
      expect(v).toBeGreaterThanOrEqual(0);
    }
  });
});
