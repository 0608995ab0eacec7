/** Dataset emission in the training pipeline's on-disk format:
 * <id>_albedo.png (8-bit), <id>_normal.png (16-bit, (n+1)/2), <id>_refl.png
 * (8-bit), <id>_mask.png, indexed by manifest.json. Deterministic per
 * (seed, sample index); byte-identical across runs. */

import * as fs from "node:fs";
import * as path from "node:path";

import { CameraConstraints, sampleCamera } from "./camera.js";
import { EnvironmentMap } from "./envmap.js";
import { MaterialTable, resolveMaterials } from "./materials.js";
import { Mesh } from "./obj.js";
import { encodeGray8, encodeRgb16, encodeRgb8 } from "./png.js";
import { rasterizeGBuffer } from "./raster.js";
import { sampleRng } from "./rng.js";

export type EmitOptions = {
  meshes: Mesh[];
  table: MaterialTable;
  env: EnvironmentMap;
  count: number;
  seed: number;
  outDir: string;
  resolution: [number, number];
  cameraConstraints?: Partial<CameraConstraints>;
  maxTries?: number;
};

export type ManifestRecord = {
  id: string;
  kind: "intrinsic";
  paths: { albedo: string; normal: string; refl: string; mask: string };
  source: "mesh";
  seed: number;
};

export function emitDataset(opts: EmitOptions): string {
  const { meshes, table, env, count, seed, outDir, resolution } = opts;
  if (count <= 0) throw new Error(`count must be positive, got ${count}`);
  if (meshes.length === 0) throw new Error("no meshes to render");
  fs.mkdirSync(outDir, { recursive: true });

  const records: ManifestRecord[] = [];
  for (let i = 0; i < count; i++) {
    const rng = sampleRng(seed, i);
    const mesh = meshes[rng.int(meshes.length)];
    const bodyColor = table.bodyColors[rng.int(table.bodyColors.length)];
    const materials = resolveMaterials(mesh.partNames, table, bodyColor);
    const id = `gb${String(i).padStart(5, "0")}`;

    let gbuf = null;
    let lastError: unknown = null;
    const tries = opts.maxTries ?? 8;
    for (let attempt = 0; attempt < tries && !gbuf; attempt++) {
      const camera = sampleCamera(rng, opts.cameraConstraints);
      try {
        gbuf = rasterizeGBuffer(mesh, materials, camera, env, resolution, id);
      } catch (err) {
        lastError = err;
      }
    }
    if (!gbuf) throw new Error(`could not frame ${id} after ${tries} cameras: ${lastError}`);

    const [h, w] = resolution;
    const normEnc = new Float32Array(gbuf.normals.length);
    for (let k = 0; k < normEnc.length; k++) normEnc[k] = (gbuf.normals[k] + 1) / 2;
    const paths = {
      albedo: `${id}_albedo.png`,
      normal: `${id}_normal.png`,
      refl: `${id}_refl.png`,
      mask: `${id}_mask.png`,
    };
    try {
      fs.writeFileSync(path.join(outDir, paths.albedo), encodeRgb8(w, h, gbuf.albedo));
      fs.writeFileSync(path.join(outDir, paths.normal), encodeRgb16(w, h, normEnc));
      fs.writeFileSync(path.join(outDir, paths.refl), encodeRgb8(w, h, gbuf.reflections));
      fs.writeFileSync(path.join(outDir, paths.mask), encodeGray8(w, h, gbuf.mask));
    } catch (err) {
      throw new Error(`failed writing ${id} under ${outDir}: ${err}`);
    }
    records.push({ id, kind: "intrinsic", paths, source: "mesh", seed });
  }

  const manifestPath = path.join(outDir, "manifest.json");
  const payload = { records, resolution: [resolution[0], resolution[1]] };
  fs.writeFileSync(manifestPath, JSON.stringify(payload, null, 1) + "\n");
  return manifestPath;
}
