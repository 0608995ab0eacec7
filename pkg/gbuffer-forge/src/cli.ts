#!/usr/bin/env node
/** gbuffer-forge --meshes DIR --count N --out DIR [--materials FILE] [--env FILE]
 *                [--seed S] [--res HxW] [--faceted] */

import * as fs from "node:fs";
import * as path from "node:path";

import { emitDataset } from "./dataset.js";
import { loadEnvMap, makeGradientEnv } from "./envmap.js";
import { DEFAULT_TABLE, loadMaterialTable } from "./materials.js";
import { parseObj } from "./obj.js";

function usage(): never {
  console.error(
    "usage: gbuffer-forge --meshes DIR --count N --out DIR " +
    "[--materials FILE] [--env FILE] [--seed S] [--res HxW] [--faceted]");
  process.exit(2);
}

function parseArgs(argv: string[]): Record<string, string | boolean> {
  const args: Record<string, string | boolean> = {};
  for (let i = 0; i < argv.length; i++) {
    const key = argv[i];
    if (!key.startsWith("--")) usage();
    if (key === "--faceted") {
      args.faceted = true;
    } else {
      const value = argv[++i];
      if (value === undefined) usage();
      args[key.slice(2)] = value;
    }
  }
  return args;
}

export function main(argv: string[]): number {
  const args = parseArgs(argv);
  const meshDir = args.meshes as string;
  const count = parseInt(args.count as string, 10);
  const outDir = args.out as string;
  if (!meshDir || !outDir || !Number.isFinite(count)) usage();

  const res = ((args.res as string) ?? "256x512").split("x").map((v) => parseInt(v, 10));
  if (res.length !== 2 || res.some((v) => !(v > 0))) {
    console.error(`bad --res value: ${args.res}`);
    return 2;
  }
  const seed = parseInt((args.seed as string) ?? "0", 10);

  let table = DEFAULT_TABLE;
  if (args.materials) {
    table = loadMaterialTable(args.materials as string);
  }
  const env = args.env ? loadEnvMap(args.env as string) : makeGradientEnv(128, 64);

  const objFiles = fs.readdirSync(meshDir).filter((f) => f.toLowerCase().endsWith(".obj")).sort();
  if (objFiles.length === 0) {
    console.error(`no .obj files in ${meshDir}`);
    return 3;
  }
  const meshes = objFiles.map((f) =>
    parseObj(fs.readFileSync(path.join(meshDir, f), "utf8"),
             { faceted: Boolean(args.faceted) }));

  const manifest = emitDataset({
    meshes, table, env, count, seed, outDir,
    resolution: [res[0], res[1]],
  });
  console.log(manifest);
  return 0;
}

const invokedDirectly = process.argv[1] && (
  process.argv[1].endsWith("/cli.js") || process.argv[1].endsWith("gbuffer-forge"));
if (invokedDirectly) {
  try {
    process.exit(main(process.argv.slice(2)));
  } catch (err) {
    console.error(String(err instanceof Error ? err.message : err));
    process.exit(3);
  }
}
