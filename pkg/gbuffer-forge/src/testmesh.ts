/** Procedural OBJ sources for tests, the benchmark and the demo asset. */

export function quadObj(size = 1, z = 0): string {
  const s = size / 2;
  return [
    "g quad",
    `v ${-s} ${-s} ${z}`,
    `v ${s} ${-s} ${z}`,
    `v ${s} ${s} ${z}`,
    `v ${-s} ${s} ${z}`,
    "f 1 2 3 4",
  ].join("\n");
}

export function boxObj(hx = 1, hy = 0.7, hz = 0.5, group = "body"): string {
  const lines = [`g ${group}`];
  const v = [
    [-hx, -hy, -hz], [hx, -hy, -hz], [hx, hy, -hz], [-hx, hy, -hz],
    [-hx, -hy, hz], [hx, -hy, hz], [hx, hy, hz], [-hx, hy, hz],
  ];
  for (const p of v) lines.push(`v ${p[0]} ${p[1]} ${p[2]}`);
  // outward-facing quads
  const faces = [
    [1, 4, 3, 2], [5, 6, 7, 8], [1, 2, 6, 5], [2, 3, 7, 6], [3, 4, 8, 7], [4, 1, 5, 8],
  ];
  for (const f of faces) lines.push(`f ${f.join(" ")}`);
  return lines.join("\n");
}

export function sphereObj(radius = 1, stacks = 24, slices = 48, group = "body"): string {
  const lines = [`g ${group}`];
  for (let i = 0; i <= stacks; i++) {
    const phi = (i / stacks) * Math.PI;
    for (let j = 0; j < slices; j++) {
      const theta = (j / slices) * 2 * Math.PI;
      const x = radius * Math.sin(phi) * Math.cos(theta);
      const y = radius * Math.sin(phi) * Math.sin(theta);
      const z = radius * Math.cos(phi);
      lines.push(`v ${x.toFixed(6)} ${y.toFixed(6)} ${z.toFixed(6)}`);
    }
  }
  const idx = (i: number, j: number) => i * slices + (j % slices) + 1;
  for (let i = 0; i < stacks; i++) {
    for (let j = 0; j < slices; j++) {
      const a = idx(i, j), b = idx(i + 1, j), c = idx(i + 1, j + 1), d = idx(i, j + 1);
      if (i > 0) lines.push(`f ${a} ${b} ${d}`);
      if (i < stacks - 1) lines.push(`f ${b} ${c} ${d}`);
    }
  }
  return lines.join("\n");
}

/** A toy wagon: box body + cabin, four wheel boxes, window strip. */
export function wagonObj(): string {
  const parts: string[] = [];
  let offset = 0;
  const box = (group: string, cx: number, cy: number, cz: number,
               hx: number, hy: number, hz: number) => {
    const v = [
      [-hx, -hy, -hz], [hx, -hy, -hz], [hx, hy, -hz], [-hx, hy, -hz],
      [-hx, -hy, hz], [hx, -hy, hz], [hx, hy, hz], [-hx, hy, hz],
    ];
    parts.push(`g ${group}`);
    for (const p of v) parts.push(`v ${p[0] + cx} ${p[1] + cy} ${p[2] + cz}`);
    const faces = [
      [1, 4, 3, 2], [5, 6, 7, 8], [1, 2, 6, 5], [2, 3, 7, 6], [3, 4, 8, 7], [4, 1, 5, 8],
    ];
    for (const f of faces) parts.push(`f ${f.map((k) => k + offset).join(" ")}`);
    offset += 8;
  };
  box("body", 0, 0, 0.55, 1.9, 0.85, 0.35);
  box("roof", -0.25, 0, 1.25, 1.0, 0.78, 0.33);
  box("window", -0.25, 0, 1.22, 1.02, 0.8, 0.18);
  box("wheel", 1.15, 0.85, 0.33, 0.33, 0.12, 0.33);
  box("wheel", 1.15, -0.85, 0.33, 0.33, 0.12, 0.33);
  box("wheel", -1.15, 0.85, 0.33, 0.33, 0.12, 0.33);
  box("wheel", -1.15, -0.85, 0.33, 0.33, 0.12, 0.33);
  box("bumper", 1.95, 0, 0.45, 0.12, 0.8, 0.16);
  box("bumper", -1.95, 0, 0.45, 0.12, 0.8, 0.16);
  return parts.join("\n");
}
