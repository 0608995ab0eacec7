export type Vec3 = [number, number, number];

export const add = (a: Vec3, b: Vec3): Vec3 => [a[0] + b[0], a[1] + b[1], a[2] + b[2]];
export const sub = (a: Vec3, b: Vec3): Vec3 => [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
export const scale = (a: Vec3, s: number): Vec3 => [a[0] * s, a[1] * s, a[2] * s];
export const dot = (a: Vec3, b: Vec3): number => a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
export const cross = (a: Vec3, b: Vec3): Vec3 => [
  a[1] * b[2] - a[2] * b[1],
  a[2] * b[0] - a[0] * b[2],
  a[0] * b[1] - a[1] * b[0],
];
export const length = (a: Vec3): number => Math.hypot(a[0], a[1], a[2]);

export function normalize(a: Vec3): Vec3 {
  const n = length(a);
  if (n < 1e-12) throw new Error("cannot normalize a zero vector");
  return [a[0] / n, a[1] / n, a[2] / n];
}

/** Mirror a view direction about a surface normal: r = v - 2 (v.n) n.
 * Both inputs must be unit length (within 1e-6); the result is unit length. */
export function reflect(view: Vec3, normal: Vec3): Vec3 {
  for (const [name, v] of [["view", view], ["normal", normal]] as const) {
    const err = Math.abs(length(v) - 1);
    if (err > 1e-6) throw new Error(`reflect: ${name} is not unit length (|v|-1 = ${err})`);
  }
  const d = dot(view, normal);
  return [view[0] - 2 * d * normal[0], view[1] - 2 * d * normal[1], view[2] - 2 * d * normal[2]];
}
