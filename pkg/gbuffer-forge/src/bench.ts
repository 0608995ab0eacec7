/** Throughput benchmark: full emission path (render + encode + write) at 256x512. */

import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";

import { emitDataset } from "./dataset.js";
import { makeGradientEnv } from "./envmap.js";
import { DEFAULT_TABLE } from "./materials.js";
import { parseObj } from "./obj.js";
import { sphereObj, wagonObj } from "./testmesh.js";

export function runBench(count = 12): number {
  const meshes = [parseObj(wagonObj()), parseObj(sphereObj(1.1))];
  const env = makeGradientEnv(128, 64);
  const outDir = fs.mkdtempSync(path.join(os.tmpdir(), "gbuffer-bench-"));
  const t0 = process.hrtime.bigint();
  emitDataset({ meshes, table: DEFAULT_TABLE, env, count, seed: 1, outDir,
                resolution: [256, 512] });
  const seconds = Number(process.hrtime.bigint() - t0) / 1e9;
  fs.rmSync(outDir, { recursive: true, force: true });
  return count / seconds;
}

if (process.argv[1] && process.argv[1].endsWith("bench.js")) {
  const rate = runBench();
  console.log(`${rate.toFixed(2)} samples/sec at 256x512`);
}
