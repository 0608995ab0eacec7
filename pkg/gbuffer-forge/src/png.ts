/** Minimal deterministic PNG codec on top of node's zlib.
 *
 * Writing: filter-0 rows, fixed deflate level, so identical pixels always give
 * identical bytes. Supports 8-bit RGB, 16-bit RGB (big-endian samples, used for
 * the normal maps) and 8-bit grayscale (masks).
 *
 * Reading: non-interlaced 8/16-bit grayscale/RGB/RGBA with all five scanline
 * filters, which covers every file this tool or the companion pipeline emits
 * plus typical LDR environment maps.
 */

import * as zlib from "node:zlib";

const SIGNATURE = Buffer.from([0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a]);
const DEFLATE_LEVEL = 4;

const CRC_TABLE = new Uint32Array(256);
for (let n = 0; n < 256; n++) {
  let c = n;
  for (let k = 0; k < 8; k++) c = c & 1 ? 0xedb88320 ^ (c >>> 1) : c >>> 1;
  CRC_TABLE[n] = c >>> 0;
}

function crc32(buf: Buffer): number {
  let c = 0xffffffff;
  for (let i = 0; i < buf.length; i++) c = CRC_TABLE[(c ^ buf[i]) & 0xff] ^ (c >>> 8);
  return (c ^ 0xffffffff) >>> 0;
}

function chunk(type: string, data: Buffer): Buffer {
  const head = Buffer.alloc(8);
  head.writeUInt32BE(data.length, 0);
  head.write(type, 4, "ascii");
  const crc = Buffer.alloc(4);
  crc.writeUInt32BE(crc32(Buffer.concat([head.subarray(4), data])), 0);
  return Buffer.concat([head, data, crc]);
}

function encode(width: number, height: number, bitDepth: 8 | 16, colorType: 0 | 2,
                raw: Buffer): Buffer {
  const ihdr = Buffer.alloc(13);
  ihdr.writeUInt32BE(width, 0);
  ihdr.writeUInt32BE(height, 4);
  ihdr.writeUInt8(bitDepth, 8);
  ihdr.writeUInt8(colorType, 9); // 0 gray, 2 rgb
  const channels = colorType === 2 ? 3 : 1;
  const rowBytes = width * channels * (bitDepth / 8);
  const filtered = Buffer.alloc((rowBytes + 1) * height);
  for (let y = 0; y < height; y++) {
    filtered[y * (rowBytes + 1)] = 0; // filter type 0
    raw.copy(filtered, y * (rowBytes + 1) + 1, y * rowBytes, (y + 1) * rowBytes);
  }
  const idat = zlib.deflateSync(filtered, { level: DEFLATE_LEVEL });
  return Buffer.concat([SIGNATURE, chunk("IHDR", ihdr), chunk("IDAT", idat),
                        chunk("IEND", Buffer.alloc(0))]);
}

/** values: Float array in [0,1], length width*height*3, row-major RGB. */
export function encodeRgb8(width: number, height: number, values: ArrayLike<number>): Buffer {
  const raw = Buffer.alloc(width * height * 3);
  for (let i = 0; i < width * height * 3; i++) {
    raw[i] = Math.round(Math.min(Math.max(values[i], 0), 1) * 255);
  }
  return encode(width, height, 8, 2, raw);
}

/** values: Float array in [0,1], stored as big-endian 16-bit samples. */
export function encodeRgb16(width: number, height: number, values: ArrayLike<number>): Buffer {
  const raw = Buffer.alloc(width * height * 3 * 2);
  for (let i = 0; i < width * height * 3; i++) {
    raw.writeUInt16BE(Math.round(Math.min(Math.max(values[i], 0), 1) * 65535), i * 2);
  }
  return encode(width, height, 16, 2, raw);
}

/** mask: truthy per pixel -> 255, else 0 (8-bit grayscale). */
export function encodeGray8(width: number, height: number, mask: ArrayLike<number | boolean>): Buffer {
  const raw = Buffer.alloc(width * height);
  for (let i = 0; i < width * height; i++) raw[i] = mask[i] ? 255 : 0;
  return encode(width, height, 8, 0, raw);
}

export type DecodedPng = {
  width: number;
  height: number;
  channels: number;
  bitDepth: number;
  /** Row-major, channel-interleaved samples normalized to [0,1]. */
  values: Float32Array;
};

function paeth(a: number, b: number, c: number): number {
  const p = a + b - c;
  const pa = Math.abs(p - a), pb = Math.abs(p - b), pc = Math.abs(p - c);
  if (pa <= pb && pa <= pc) return a;
  if (pb <= pc) return b;
  return c;
}

export function decodePng(buf: Buffer): DecodedPng {
  if (!buf.subarray(0, 8).equals(SIGNATURE)) throw new Error("not a PNG file");
  let pos = 8;
  let width = 0, height = 0, bitDepth = 0, colorType = 0;
  const idat: Buffer[] = [];
  while (pos < buf.length) {
    const len = buf.readUInt32BE(pos);
    const type = buf.toString("ascii", pos + 4, pos + 8);
    const data = buf.subarray(pos + 8, pos + 8 + len);
    if (type === "IHDR") {
      width = data.readUInt32BE(0);
      height = data.readUInt32BE(4);
      bitDepth = data.readUInt8(8);
      colorType = data.readUInt8(9);
      if (data.readUInt8(12) !== 0) throw new Error("interlaced PNG not supported");
      if (bitDepth !== 8 && bitDepth !== 16) throw new Error(`bit depth ${bitDepth} not supported`);
      if (![0, 2, 4, 6].includes(colorType)) throw new Error(`color type ${colorType} not supported`);
    } else if (type === "IDAT") {
      idat.push(data);
    } else if (type === "IEND") {
      break;
    }
    pos += 12 + len;
  }
  const channels = { 0: 1, 2: 3, 4: 2, 6: 4 }[colorType as 0 | 2 | 4 | 6]!;
  const bpp = channels * (bitDepth / 8);
  const rowBytes = width * bpp;
  const filtered = zlib.inflateSync(Buffer.concat(idat));
  const raw = Buffer.alloc(rowBytes * height);
  for (let y = 0; y < height; y++) {
    const filter = filtered[y * (rowBytes + 1)];
    const src = filtered.subarray(y * (rowBytes + 1) + 1, (y + 1) * (rowBytes + 1));
    const out = raw.subarray(y * rowBytes, (y + 1) * rowBytes);
    const prev = y > 0 ? raw.subarray((y - 1) * rowBytes, y * rowBytes) : null;
    for (let x = 0; x < rowBytes; x++) {
      const a = x >= bpp ? out[x - bpp] : 0;
      const b = prev ? prev[x] : 0;
      const c = x >= bpp && prev ? prev[x - bpp] : 0;
      let v = src[x];
      if (filter === 1) v += a;
      else if (filter === 2) v += b;
      else if (filter === 3) v += (a + b) >> 1;
      else if (filter === 4) v += paeth(a, b, c);
      else if (filter !== 0) throw new Error(`unknown filter type ${filter}`);
      out[x] = v & 0xff;
    }
  }
  const n = width * height * channels;
  const values = new Float32Array(n);
  if (bitDepth === 8) {
    for (let i = 0; i < n; i++) values[i] = raw[i] / 255;
  } else {
    for (let i = 0; i < n; i++) values[i] = raw.readUInt16BE(i * 2) / 65535;
  }
  return { width, height, channels, bitDepth, values };
}
