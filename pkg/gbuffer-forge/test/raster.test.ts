import { describe, expect, it } from "vitest";
import { CameraSample } from "../src/camera.js";
import { makeGradientEnv } from "../src/envmap.js";
import { MaterialSpec } from "../src/materials.js";
import { parseObj } from "../src/obj.js";
import { rasterizeGBuffer, raytraceReference } from "../src/raster.js";
import { quadObj, wagonObj } from "../src/testmesh.js";
import { Vec3 } from "../src/vec.js";

const env = makeGradientEnv(64, 32);
const gray = (g: number): MaterialSpec => ({ color: [0.5, 0.5, 0.5], glossiness: g });

function overheadCamera(height = 3): CameraSample {
  return { position: [0, 0, height], lookAt: [0, 0, 0], fovY: 45 };
}

describe("rasterizeGBuffer", () => {
  it("renders a facing quad with camera-space normals (0,0,1)", () => {
    const mesh = parseObj(quadObj(1.5));
    const g = rasterizeGBuffer(mesh, [gray(0.3)], overheadCamera(), env, [33, 33]);
    let fg = 0;
    for (let p = 0; p < 33 * 33; p++) {
      if (!g.mask[p]) continue;
      fg++;
      expect(g.normals[p * 3]).toBeCloseTo(0, 5);
      expect(g.normals[p * 3 + 1]).toBeCloseTo(0, 5);
      expect(g.normals[p * 3 + 2]).toBeCloseTo(1, 5);
    }
    expect(fg).toBeGreaterThan(50);
    // center pixel covered, corners background
    expect(g.mask[16 * 33 + 16]).toBe(1);
    expect(g.mask[0]).toBe(0);
  });

  it("zero glossiness kills all reflections", () => {
    const mesh = parseObj(wagonObj());
    const mats = mesh.partNames.map(() => gray(0));
    const g = rasterizeGBuffer(mesh, mats, { position: [4, 2, 2], lookAt: [0, 0, 0.5], fovY: 45 },
                               env, [48, 48]);
    expect(Math.max(...g.reflections)).toBe(0);
  });

  it("background pixels are zero everywhere and unmasked", () => {
    const mesh = parseObj(quadObj(1.0));
    const g = rasterizeGBuffer(mesh, [gray(0.8)], overheadCamera(4), env, [32, 32]);
    for (let p = 0; p < 32 * 32; p++) {
      if (g.mask[p]) continue;
      for (let c = 0; c < 3; c++) {
        expect(g.albedo[p * 3 + c]).toBe(0);
        expect(g.normals[p * 3 + c]).toBe(0);
        expect(g.reflections[p * 3 + c]).toBe(0);
      }
    }
  });

  it("depth test matches the per-pixel ray-intersection oracle", () => {
    // nearer red triangle over a farther blue one, camera overhead
    const text = [
      "g near",
      "v -0.6 -0.6 1", "v 0.9 -0.5 1", "v 0.0 0.8 1",
      "f 1 2 3",
      "g far",
      "v -1 -1 0", "v 1 -1 0", "v 1 1 0", "v -1 1 0",
      "f 4 5 6 7",
    ].join("\n");
    const mesh = parseObj(text);
    const mats: MaterialSpec[] = [
      { color: [1, 0, 0], glossiness: 0 },
      { color: [0, 0, 1], glossiness: 0 },
    ];
    const res: [number, number] = [64, 64];
    const cam = overheadCamera(3.5);
    const g = rasterizeGBuffer(mesh, mats, cam, env, res);
    const oracle = raytraceReference(mesh, cam, res);

    let compared = 0;
    for (let y = 1; y < 63; y++) {
      for (let x = 1; x < 63; x++) {
        const p = y * 64 + x;
        // interior pixels only: oracle part uniform over the 3x3 neighborhood
        const want = oracle.partAt[p];
        let uniform = true;
        for (let dy = -1; dy <= 1 && uniform; dy++) {
          for (let dx = -1; dx <= 1 && uniform; dx++) {
            if (oracle.partAt[(y + dy) * 64 + x + dx] !== want) uniform = false;
          }
        }
        if (!uniform) continue;
        compared++;
        if (want === -1) {
          expect(g.mask[p]).toBe(0);
        } else {
          expect(g.mask[p]).toBe(1);
          const expectColor = mats[want].color;
          expect(g.albedo[p * 3]).toBeCloseTo(expectColor[0], 6);
          expect(g.albedo[p * 3 + 2]).toBeCloseTo(expectColor[2], 6);
        }
      }
    }
    expect(compared).toBeGreaterThan(2000);
    // and the overlap really is red (near wins)
    const center = 32 * 64 + 32;
    expect(oracle.partAt[center]).toBe(0);
    expect(g.albedo[center * 3]).toBeCloseTo(1, 6);
  });

  it("raises an error naming the sample when nothing is visible", () => {
    const mesh = parseObj(quadObj(1.0));
    const away: CameraSample = { position: [0, 0, 3], lookAt: [0, 0, 9], fovY: 40 };
    expect(() => rasterizeGBuffer(mesh, [gray(0)], away, env, [32, 32], "sample-77"))
      .toThrow(/sample-77/);
  });

  it("rejects missing part materials", () => {
    const mesh = parseObj(wagonObj());
    expect(() => rasterizeGBuffer(mesh, [gray(0)], overheadCamera(), env, [32, 32]))
      .toThrow(/material/);
  });

  it("reflections are invariant under 90-degree co-rotation of mesh, camera and env", () => {
    const rotZ = (v: Vec3): Vec3 => [-v[1], v[0], v[2]];
    const baseMesh = parseObj(wagonObj());
    const mats = baseMesh.partNames.map((n, i) => ({
      color: [0.2 + 0.1 * (i % 5), 0.3, 0.6] as [number, number, number],
      glossiness: 0.8,
    }));
    // env with azimuthal variation so the rotation actually moves radiance
    const baseEnv = makeGradientEnv(64, 32);
    for (let y = 0; y < baseEnv.height; y++) {
      for (let x = 0; x < baseEnv.width; x++) {
        baseEnv.data[(y * baseEnv.width + x) * 3] +=
          0.25 * (0.5 + 0.5 * Math.sin((2 * Math.PI * (x + 0.5)) / baseEnv.width));
      }
    }
    // rotated env: shift columns by a quarter turn
    const shift = baseEnv.width / 4;
    const rotEnv = { width: baseEnv.width, height: baseEnv.height,
                     data: new Float32Array(baseEnv.data.length) };
    for (let y = 0; y < baseEnv.height; y++) {
      for (let x = 0; x < baseEnv.width; x++) {
        const src = (y * baseEnv.width + ((x - shift + baseEnv.width) % baseEnv.width)) * 3;
        const dst = (y * baseEnv.width + x) * 3;
        for (let c = 0; c < 3; c++) rotEnv.data[dst + c] = baseEnv.data[src + c];
      }
    }
    const rotMesh = { ...baseMesh,
                      vertices: baseMesh.vertices.map(rotZ),
                      cornerNormals: baseMesh.cornerNormals.map(rotZ) };
    const cam: CameraSample = { position: [4, 1.5, 2], lookAt: [0, 0, 0.5], fovY: 45 };
    const rotCam: CameraSample = { position: rotZ(cam.position), lookAt: rotZ(cam.lookAt),
                                   fovY: cam.fovY };
    const res: [number, number] = [64, 64];
    const a = rasterizeGBuffer(baseMesh, mats, cam, baseEnv, res);
    const b = rasterizeGBuffer(rotMesh, mats, rotCam, rotEnv, res);

    // compare away from silhouettes: erode both masks by one pixel
    const interior = (g: typeof a, x: number, y: number) => {
      for (let dy = -1; dy <= 1; dy++) {
        for (let dx = -1; dx <= 1; dx++) {
          const q = (y + dy) * 64 + (x + dx);
          if (q < 0 || q >= 64 * 64 || !g.mask[q]) return false;
        }
      }
      return true;
    };
    let compared = 0;
    for (let y = 1; y < 63; y++) {
      for (let x = 1; x < 63; x++) {
        if (!interior(a, x, y) || !interior(b, x, y)) continue;
        const p = y * 64 + x;
        for (let c = 0; c < 3; c++) {
          expect(Math.abs(a.reflections[p * 3 + c] - b.reflections[p * 3 + c]))
            .toBeLessThanOrEqual(2 / 255);
        }
        compared++;
      }
    }
    expect(compared).toBeGreaterThan(300);
  });
});
