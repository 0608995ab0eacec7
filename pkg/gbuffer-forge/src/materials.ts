/** Material table: flat color + scalar glossiness per mesh part, with a fixed
 * default set (18 part materials, 15 body paint colors). The default values are
 * this project's own choices. */

import * as fs from "node:fs";

export type MaterialSpec = {
  color: [number, number, number];
  glossiness: number;
};

export type MaterialTable = {
  parts: Record<string, MaterialSpec>;
  bodyParts: string[];
  bodyGlossiness: number;
  bodyColors: [number, number, number][];
  fallback: MaterialSpec;
};

export function validateMaterial(name: string, m: MaterialSpec): void {
  if (!Array.isArray(m.color) || m.color.length !== 3
      || m.color.some((c) => !(c >= 0 && c <= 1))) {
    throw new Error(`material ${name}: color must be RGB in [0,1]^3`);
  }
  if (!(m.glossiness >= 0 && m.glossiness <= 1)) {
    throw new Error(`material ${name}: glossiness must be in [0,1]`);
  }
}

export const DEFAULT_PART_MATERIALS: Record<string, MaterialSpec> = {
  window: { color: [0.08, 0.09, 0.12], glossiness: 0.95 },
  windshield: { color: [0.1, 0.11, 0.14], glossiness: 0.95 },
  glass: { color: [0.09, 0.1, 0.13], glossiness: 0.9 },
  headlight: { color: [0.85, 0.85, 0.8], glossiness: 0.85 },
  taillight: { color: [0.6, 0.08, 0.06], glossiness: 0.8 },
  chrome: { color: [0.75, 0.76, 0.78], glossiness: 1.0 },
  bumper: { color: [0.45, 0.45, 0.47], glossiness: 0.6 },
  grille: { color: [0.15, 0.15, 0.16], glossiness: 0.4 },
  mirror: { color: [0.7, 0.71, 0.73], glossiness: 0.9 },
  wheel: { color: [0.12, 0.12, 0.12], glossiness: 0.15 },
  tire: { color: [0.06, 0.06, 0.06], glossiness: 0.05 },
  rim: { color: [0.65, 0.66, 0.68], glossiness: 0.85 },
  trim: { color: [0.2, 0.2, 0.21], glossiness: 0.3 },
  plate: { color: [0.9, 0.9, 0.85], glossiness: 0.2 },
  interior: { color: [0.25, 0.22, 0.2], glossiness: 0.1 },
  exhaust: { color: [0.5, 0.5, 0.52], glossiness: 0.7 },
  underbody: { color: [0.1, 0.1, 0.1], glossiness: 0.05 },
  roof: { color: [0.3, 0.3, 0.32], glossiness: 0.5 },
};

export const DEFAULT_BODY_COLORS: [number, number, number][] = [
  [0.85, 0.1, 0.08], [0.08, 0.2, 0.65], [0.9, 0.9, 0.92], [0.05, 0.05, 0.06],
  [0.55, 0.57, 0.6], [0.75, 0.73, 0.7], [0.1, 0.45, 0.15], [0.8, 0.55, 0.1],
  [0.45, 0.08, 0.5], [0.65, 0.15, 0.15], [0.15, 0.5, 0.55], [0.95, 0.85, 0.2],
  [0.3, 0.32, 0.35], [0.6, 0.4, 0.25], [0.2, 0.1, 0.4],
];

export const DEFAULT_TABLE: MaterialTable = {
  parts: DEFAULT_PART_MATERIALS,
  bodyParts: ["body", "default"],
  bodyGlossiness: 0.55,
  bodyColors: DEFAULT_BODY_COLORS,
  fallback: { color: [0.5, 0.5, 0.5], glossiness: 0.2 },
};

export function loadMaterialTable(path: string): MaterialTable {
  const raw = JSON.parse(fs.readFileSync(path, "utf8"));
  const table: MaterialTable = {
    parts: raw.parts ?? {},
    bodyParts: raw.body_parts ?? DEFAULT_TABLE.bodyParts,
    bodyGlossiness: raw.body_glossiness ?? DEFAULT_TABLE.bodyGlossiness,
    bodyColors: raw.body_colors ?? DEFAULT_TABLE.bodyColors,
    fallback: raw.fallback ?? DEFAULT_TABLE.fallback,
  };
  for (const [name, m] of Object.entries(table.parts)) validateMaterial(name, m);
  validateMaterial("fallback", table.fallback);
  table.bodyColors.forEach((c, i) =>
    validateMaterial(`body_colors[${i}]`, { color: c, glossiness: 0 }));
  if (!(table.bodyGlossiness >= 0 && table.bodyGlossiness <= 1)) {
    throw new Error("body_glossiness must be in [0,1]");
  }
  return table;
}

/** Per-part material assignment for one render: named parts from the table,
 * body parts get the sampled paint color, everything else the fallback. */
export function resolveMaterials(partNames: string[], table: MaterialTable,
                                 bodyColor: [number, number, number]): MaterialSpec[] {
  return partNames.map((name) => {
    const lower = name.toLowerCase();
    if (table.bodyParts.includes(lower)) {
      return { color: bodyColor, glossiness: table.bodyGlossiness };
    }
    return table.parts[lower] ?? table.fallback;
  });
}
