/** Wavefront OBJ loader with per-group part ids.
 *
 * Triangulates polygon faces as fans. Part ids come from `usemtl` names when
 * present, otherwise from `g`/`o` group names; faces before any group belong to
 * part "default". Provided vertex normals (f v//vn) are used as-is; otherwise
 * smooth area-weighted vertex normals are computed (or flat face normals with
 * `faceted`).
 */

import { cross, normalize, sub, Vec3 } from "./vec.js";

export type Mesh = {
  vertices: Vec3[];
  triangles: [number, number, number][];
  partIds: number[];            // per triangle
  partNames: string[];          // index -> name
  /** per-corner normals (triangle-aligned, 3 per triangle) */
  cornerNormals: Vec3[];
};

export function parseObj(text: string, opts: { faceted?: boolean } = {}): Mesh {
  const vertices: Vec3[] = [];
  const normalsIn: Vec3[] = [];
  const triangles: [number, number, number][] = [];
  const triNormalIdx: [number, number, number][] = [];
  const partIds: number[] = [];
  const partNames: string[] = [];
  const partIndex = new Map<string, number>();

  const partOf = (name: string) => {
    let idx = partIndex.get(name);
    if (idx === undefined) {
      idx = partNames.length;
      partNames.push(name);
      partIndex.set(name, idx);
    }
    return idx;
  };
  let currentPart = -1;

  const resolve = (idx: number, count: number) => (idx > 0 ? idx - 1 : count + idx);

  for (const rawLine of text.split(/\r?\n/)) {
    const line = rawLine.trim();
    if (!line || line.startsWith("#")) continue;
    const parts = line.split(/\s+/);
    const kind = parts[0];
    if (kind === "v") {
      vertices.push([+parts[1], +parts[2], +parts[3]]);
    } else if (kind === "vn") {
      normalsIn.push([+parts[1], +parts[2], +parts[3]]);
    } else if (kind === "g" || kind === "o") {
      currentPart = partOf(parts.slice(1).join(" ") || "default");
    } else if (kind === "usemtl") {
      currentPart = partOf(parts[1]);
    } else if (kind === "f") {
      if (currentPart < 0) currentPart = partOf("default");
      const corners = parts.slice(1).map((w) => {
        const [v, , n] = w.split("/");
        return {
          v: resolve(parseInt(v, 10), vertices.length),
          n: n ? resolve(parseInt(n, 10), normalsIn.length) : -1,
        };
      });
      for (let k = 1; k + 1 < corners.length; k++) {
        const tri = [corners[0], corners[k], corners[k + 1]];
        for (const c of tri) {
          if (c.v < 0 || c.v >= vertices.length) {
            throw new Error(`face vertex index out of range: ${line}`);
          }
        }
        triangles.push([tri[0].v, tri[1].v, tri[2].v]);
        triNormalIdx.push([tri[0].n, tri[1].n, tri[2].n]);
        partIds.push(currentPart);
      }
    }
  }
  if (triangles.length === 0) throw new Error("mesh has no triangles");

  const faceNormals: Vec3[] = triangles.map(([a, b, c]) => {
    const n = cross(sub(vertices[b], vertices[a]), sub(vertices[c], vertices[a]));
    const len = Math.hypot(n[0], n[1], n[2]);
    return len > 1e-12 ? [n[0] / len, n[1] / len, n[2] / len] : [0, 0, 1];
  });

  // smooth vertex normals: area-weighted face normal average
  const smooth: Vec3[] = vertices.map(() => [0, 0, 0]);
  triangles.forEach(([a, b, c], t) => {
    const n = cross(sub(vertices[b], vertices[a]), sub(vertices[c], vertices[a]));
    for (const vi of [a, b, c]) {
      smooth[vi] = [smooth[vi][0] + n[0], smooth[vi][1] + n[1], smooth[vi][2] + n[2]];
    }
  });
  const smoothUnit = smooth.map((n) => {
    const len = Math.hypot(n[0], n[1], n[2]);
    return len > 1e-12 ? ([n[0] / len, n[1] / len, n[2] / len] as Vec3) : ([0, 0, 1] as Vec3);
  });

  const cornerNormals: Vec3[] = [];
  triangles.forEach((tri, t) => {
    for (let c = 0; c < 3; c++) {
      const nIdx = triNormalIdx[t][c];
      if (nIdx >= 0 && nIdx < normalsIn.length) {
        cornerNormals.push(normalize(normalsIn[nIdx]));
      } else if (opts.faceted) {
        cornerNormals.push(faceNormals[t]);
      } else {
        cornerNormals.push(smoothUnit[tri[c]]);
      }
    }
  });

  return { vertices, triangles, partIds, partNames, cornerNormals };
}
