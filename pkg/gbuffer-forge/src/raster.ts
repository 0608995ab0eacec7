/** CPU z-buffer rasterizer producing deferred shading buffers.
 *
 * Per pixel: depth-correct coverage, perspective-correct interpolation of
 * world-space position and smooth normals, flat part albedo, and environment
 * reflections along the mirrored view ray. Normals are written in camera
 * coordinates. Deterministic by construction.
 */

import { CameraSample, cameraBasis, worldToCamera } from "./camera.js";
import { EnvironmentMap, envLookup } from "./envmap.js";
import { MaterialSpec } from "./materials.js";
import { Mesh } from "./obj.js";
import { dot, normalize, reflect, sub, Vec3 } from "./vec.js";

const NEAR = 0.05;

export type GBuffer = {
  width: number;
  height: number;
  albedo: Float32Array;      // H*W*3 in [0,1]
  normals: Float32Array;     // H*W*3 camera-space unit vectors (0 on background)
  reflections: Float32Array; // H*W*3 in [0,1]
  mask: Uint8Array;          // H*W, 1 on foreground
};

type ClipVertex = { cam: Vec3; world: Vec3; normal: Vec3 };

/** Sutherland-Hodgman clip of one triangle against the near plane z <= -NEAR. */
function clipNear(tri: ClipVertex[]): ClipVertex[] {
  const out: ClipVertex[] = [];
  for (let i = 0; i < tri.length; i++) {
    const a = tri[i];
    const b = tri[(i + 1) % tri.length];
    const aIn = a.cam[2] <= -NEAR;
    const bIn = b.cam[2] <= -NEAR;
    const lerp = (): ClipVertex => {
      const t = (-NEAR - a.cam[2]) / (b.cam[2] - a.cam[2]);
      const mix = (u: Vec3, v: Vec3): Vec3 =>
        [u[0] + (v[0] - u[0]) * t, u[1] + (v[1] - u[1]) * t, u[2] + (v[2] - u[2]) * t];
      return { cam: mix(a.cam, b.cam), world: mix(a.world, b.world),
               normal: mix(a.normal, b.normal) };
    };
    if (aIn) {
      out.push(a);
      if (!bIn) out.push(lerp());
    } else if (bIn) {
      out.push(lerp());
    }
  }
  return out;
}

export function rasterizeGBuffer(mesh: Mesh, materials: MaterialSpec[],
                                 camera: CameraSample, env: EnvironmentMap,
                                 resolution: [number, number],
                                 sampleId = "sample"): GBuffer {
  const [height, width] = resolution;
  if (height <= 0 || width <= 0) throw new Error(`bad resolution ${resolution}`);
  const usedParts = new Set(mesh.partIds);
  for (const p of usedParts) {
    if (!materials[p]) throw new Error(`part ${mesh.partNames[p] ?? p} has no material`);
  }

  const basis = cameraBasis(camera);
  const tanHalf = Math.tan((camera.fovY * Math.PI) / 360);
  const aspect = width / height;

  const camVerts: Vec3[] = mesh.vertices.map((v) =>
    worldToCamera(sub(v, camera.position), basis));

  const albedo = new Float32Array(width * height * 3);
  const normals = new Float32Array(width * height * 3);
  const reflections = new Float32Array(width * height * 3);
  const mask = new Uint8Array(width * height);
  const depthBuf = new Float32Array(width * height).fill(Infinity);
  // deferred per-pixel attributes for the shading pass
  const worldPos = new Float32Array(width * height * 3);
  const worldNrm = new Float32Array(width * height * 3);
  const partAt = new Int32Array(width * height).fill(-1);

  const project = (cam: Vec3): [number, number, number] => {
    const invZ = 1 / -cam[2];
    const sx = ((cam[0] * invZ) / (tanHalf * aspect) + 1) * 0.5 * width - 0.5;
    const sy = (1 - (cam[1] * invZ) / tanHalf) * 0.5 * height - 0.5;
    return [sx, sy, -cam[2]];
  };

  let covered = 0;
  for (let t = 0; t < mesh.triangles.length; t++) {
    const [ia, ib, ic] = mesh.triangles[t];
    const tri: ClipVertex[] = [
      { cam: camVerts[ia], world: mesh.vertices[ia], normal: mesh.cornerNormals[t * 3] },
      { cam: camVerts[ib], world: mesh.vertices[ib], normal: mesh.cornerNormals[t * 3 + 1] },
      { cam: camVerts[ic], world: mesh.vertices[ic], normal: mesh.cornerNormals[t * 3 + 2] },
    ];
    const poly = clipNear(tri);
    for (let k = 1; k + 1 < poly.length; k++) {
      covered += rasterTriangle(poly[0], poly[k], poly[k + 1], t);
    }
  }

  function rasterTriangle(a: ClipVertex, b: ClipVertex, c: ClipVertex, tIdx: number): number {
    const pa = project(a.cam);
    const pb = project(b.cam);
    const pc = project(c.cam);
    const area = (pb[0] - pa[0]) * (pc[1] - pa[1]) - (pb[1] - pa[1]) * (pc[0] - pa[0]);
    if (Math.abs(area) < 1e-12) return 0;
    const minX = Math.max(Math.ceil(Math.min(pa[0], pb[0], pc[0])), 0);
    const maxX = Math.min(Math.floor(Math.max(pa[0], pb[0], pc[0])), width - 1);
    const minY = Math.max(Math.ceil(Math.min(pa[1], pb[1], pc[1])), 0);
    const maxY = Math.min(Math.floor(Math.max(pa[1], pb[1], pc[1])), height - 1);
    let hits = 0;
    const invA = 1 / area;
    const invDa = 1 / pa[2], invDb = 1 / pb[2], invDc = 1 / pc[2];
    for (let y = minY; y <= maxY; y++) {
      for (let x = minX; x <= maxX; x++) {
        let w0 = ((pb[0] - pa[0]) * (y - pa[1]) - (pb[1] - pa[1]) * (x - pa[0])) * invA;
        let w1 = ((pc[0] - pb[0]) * (y - pb[1]) - (pc[1] - pb[1]) * (x - pb[0])) * invA;
        let w2 = 1 - w0 - w1;
        // tolerate exact-on-edge pixels so shared seams leave no holes; ties
        // resolve deterministically through the strict depth test
        const eps = -1e-9;
        if (w0 < eps || w1 < eps || w2 < eps) continue;
        // barycentric weights w.r.t. (a,b,c): w1 belongs to c, w2 to a after the
        // edge-function cycle above, so relabel
        const ba = w1, bb = w2, bc = w0;
        const invD = ba * invDa + bb * invDb + bc * invDc;
        const depth = 1 / invD;
        const p = y * width + x;
        if (depth >= depthBuf[p]) continue;
        depthBuf[p] = depth;
        partAt[p] = mesh.partIds[tIdx];
        for (let ch = 0; ch < 3; ch++) {
          worldPos[p * 3 + ch] = (ba * a.world[ch] * invDa + bb * b.world[ch] * invDb
            + bc * c.world[ch] * invDc) * depth;
          worldNrm[p * 3 + ch] = (ba * a.normal[ch] * invDa + bb * b.normal[ch] * invDb
            + bc * c.normal[ch] * invDc) * depth;
        }
        if (!mask[p]) {
          mask[p] = 1;
          hits++;
        }
      }
    }
    return hits;
  }

  if (covered === 0) {
    throw new Error(`${sampleId}: no visible triangles from this camera`);
  }

  // deferred shading pass: albedo + environment reflections + camera-space normals
  for (let p = 0; p < width * height; p++) {
    if (!mask[p]) continue;
    const mat = materials[partAt[p]];
    const nWorld = normalize([worldNrm[p * 3], worldNrm[p * 3 + 1], worldNrm[p * 3 + 2]]);
    const pw: Vec3 = [worldPos[p * 3], worldPos[p * 3 + 1], worldPos[p * 3 + 2]];
    const view = normalize(sub(pw, camera.position));
    const r = reflect(view, nWorld);
    const envColor = envLookup(env, r);
    const nCam = worldToCamera(nWorld, basis);
    for (let ch = 0; ch < 3; ch++) {
      albedo[p * 3 + ch] = mat.color[ch];
      reflections[p * 3 + ch] = Math.min(Math.max(mat.glossiness * envColor[ch], 0), 1);
      normals[p * 3 + ch] = nCam[ch];
    }
  }

  return { width, height, albedo, normals, reflections, mask };
}

/** Per-pixel ray-triangle oracle (Moller-Trumbore over every triangle): slow but
 * independent of the rasterizer; used to validate depth correctness. */
export function raytraceReference(mesh: Mesh, camera: CameraSample,
                                  resolution: [number, number]):
    { partAt: Int32Array; depth: Float32Array } {
  const [height, width] = resolution;
  const basis = cameraBasis(camera);
  const tanHalf = Math.tan((camera.fovY * Math.PI) / 360);
  const aspect = width / height;
  const partAt = new Int32Array(width * height).fill(-1);
  const depth = new Float32Array(width * height).fill(Infinity);
  for (let y = 0; y < height; y++) {
    for (let x = 0; x < width; x++) {
      const ndcX = (((x + 0.5) / width) * 2 - 1) * tanHalf * aspect;
      const ndcY = (1 - ((y + 0.5) / height) * 2) * tanHalf;
      const dir = normalize([
        ndcX * basis.right[0] + ndcY * basis.up[0] + basis.forward[0],
        ndcX * basis.right[1] + ndcY * basis.up[1] + basis.forward[1],
        ndcX * basis.right[2] + ndcY * basis.up[2] + basis.forward[2],
      ]);
      const p = y * width + x;
      for (let t = 0; t < mesh.triangles.length; t++) {
        const [ia, ib, ic] = mesh.triangles[t];
        const v0 = mesh.vertices[ia];
        const e1 = sub(mesh.vertices[ib], v0);
        const e2 = sub(mesh.vertices[ic], v0);
        const pvec: Vec3 = [
          dir[1] * e2[2] - dir[2] * e2[1],
          dir[2] * e2[0] - dir[0] * e2[2],
          dir[0] * e2[1] - dir[1] * e2[0],
        ];
        const det = dot(e1, pvec);
        if (Math.abs(det) < 1e-12) continue;
        const invDet = 1 / det;
        const tvec = sub(camera.position, v0);
        const u = dot(tvec, pvec) * invDet;
        if (u < 0 || u > 1) continue;
        const qvec: Vec3 = [
          tvec[1] * e1[2] - tvec[2] * e1[1],
          tvec[2] * e1[0] - tvec[0] * e1[2],
          tvec[0] * e1[1] - tvec[1] * e1[0],
        ];
        const v = dot(dir, qvec) * invDet;
        if (v < 0 || u + v > 1) continue;
        const tHit = dot(e2, qvec) * invDet;
        // compare at equal footing with the rasterizer's camera-plane depth
        const camZ = -worldToCamera(dir, basis)[2] * tHit;
        if (tHit > NEAR && camZ < depth[p]) {
          depth[p] = camZ;
          partAt[p] = mesh.partIds[t];
        }
      }
    }
  }
  return { partAt, depth };
}
