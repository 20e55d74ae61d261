/**
 * QTNS tensor container (little-endian throughout):
 *
 *   magic "QTNS" | version u8 = 1 | dtype u8 = 1 (float32) |
 *   rank u32 | dims rank*u32 | payload row-major float32
 *
 * This must stay byte-for-byte compatible with the training harness that
 * consumes these files; the round-trip is covered by a cross-language test.
 */

import { readFileSync, writeFileSync, renameSync } from "node:fs";
import { FormatError } from "./errors.js";

const MAGIC = 0x51544e53; // "QTNS" big-endian read of the 4 magic bytes
const VERSION = 1;
const DTYPE_FLOAT32 = 1;

export interface Tensor {
  dims: number[];
  data: Float32Array;
}

export function encodeTensor(dims: number[], data: Float32Array): Buffer {
  const count = dims.reduce((a, b) => a * b, 1);
  if (count !== data.length) {
    throw new FormatError(
      `dims ${JSON.stringify(dims)} expect ${count} values, got ${data.length}`,
    );
  }
  const headerBytes = 4 + 2 + 4 + 4 * dims.length;
  const buffer = Buffer.alloc(headerBytes + 4 * data.length);
  buffer.write("QTNS", 0, "ascii");
  buffer.writeUInt8(VERSION, 4);
  buffer.writeUInt8(DTYPE_FLOAT32, 5);
  buffer.writeUInt32LE(dims.length, 6);
  let offset = 10;
  for (const dim of dims) {
    buffer.writeUInt32LE(dim, offset);
    offset += 4;
  }
  for (let i = 0; i < data.length; i++) {
    buffer.writeFloatLE(data[i]!, offset);
    offset += 4;
  }
  return buffer;
}

export function decodeTensor(buffer: Buffer): Tensor {
  if (buffer.length < 10) {
    throw new FormatError("truncated tensor: missing header");
  }
  if (buffer.readUInt32BE(0) !== MAGIC) {
    throw new FormatError("bad magic: not a QTNS tensor");
  }
  const version = buffer.readUInt8(4);
  if (version !== VERSION) {
    throw new FormatError(`unsupported tensor version ${version}`);
  }
  const dtype = buffer.readUInt8(5);
  if (dtype !== DTYPE_FLOAT32) {
    throw new FormatError(`unsupported dtype code ${dtype}`);
  }
  const rank = buffer.readUInt32LE(6);
  if (buffer.length < 10 + 4 * rank) {
    throw new FormatError("truncated tensor: missing dims");
  }
  const dims: number[] = [];
  let offset = 10;
  for (let i = 0; i < rank; i++) {
    dims.push(buffer.readUInt32LE(offset));
    offset += 4;
  }
  const count = dims.reduce((a, b) => a * b, 1);
  if (buffer.length !== offset + 4 * count) {
    throw new FormatError(
      `payload length ${buffer.length - offset} does not match dims ` +
        `${JSON.stringify(dims)} (expected ${4 * count} bytes)`,
    );
  }
  const data = new Float32Array(count);
  for (let i = 0; i < count; i++) {
    data[i] = buffer.readFloatLE(offset);
    offset += 4;
  }
  return { dims, data };
}

/** Atomic write: temp file in place, then rename. */
export function writeTensor(path: string, dims: number[], data: Float32Array): void {
  const tmp = `${path}.tmp-${process.pid}`;
  writeFileSync(tmp, encodeTensor(dims, data));
  renameSync(tmp, path);
}

export function readTensor(path: string): Tensor {
  return decodeTensor(readFileSync(path));
}
