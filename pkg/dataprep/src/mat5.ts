/**
 * MAT-file v5 reader for plain numeric matrices: enough to pull 2-D
 * double/single/int16/uint8 arrays (optionally zlib-compressed) out of the
 * ECoG archives.  Cell arrays, structs, sparse and complex data are out of
 * scope and rejected.
 *
 * Layout: 128-byte header (116 bytes text, 8 subsystem offset, u16 version,
 * 2-byte endian tag "IM" when little-endian), then a sequence of tagged
 * data elements.  A tag is u32 type + u32 byte count, except the "small
 * data element" packing where the count lives in the upper 16 bits of the
 * first word and the payload in the second.
 */

import { inflateSync } from "node:zlib";
import { FormatError } from "./errors.js";

const MI_INT8 = 1;
const MI_UINT8 = 2;
const MI_INT16 = 3;
const MI_UINT16 = 4;
const MI_INT32 = 5;
const MI_UINT32 = 6;
const MI_SINGLE = 7;
const MI_DOUBLE = 9;
const MI_MATRIX = 14;
const MI_COMPRESSED = 15;

export interface MatMatrix {
  name: string;
  dims: number[];
  /** row-major (converted from MATLAB's column-major storage) */
  data: Float64Array;
}

interface Element {
  type: number;
  bytes: Uint8Array;
}

function readElements(buffer: Uint8Array): Element[] {
  const view = new DataView(buffer.buffer, buffer.byteOffset, buffer.byteLength);
  const elements: Element[] = [];
  let offset = 0;
  while (offset + 8 <= buffer.length) {
    const word = view.getUint32(offset, true);
    const small = word >>> 16;
    let type: number;
    let size: number;
    let dataStart: number;
    let next: number;
    if (small !== 0) {
      type = word & 0xffff;
      size = small;
      dataStart = offset + 4;
      next = offset + 8;
    } else {
      type = word;
      size = view.getUint32(offset + 4, true);
      dataStart = offset + 8;
      next = dataStart + size;
      if (type !== MI_COMPRESSED) {
        next += (8 - (size % 8)) % 8; // elements are 8-byte aligned
      }
    }
    if (dataStart + size > buffer.length) {
      throw new FormatError("MAT5: element overruns the buffer");
    }
    elements.push({ type, bytes: buffer.subarray(dataStart, dataStart + size) });
    offset = next;
  }
  return elements;
}

function numericToFloat64(type: number, bytes: Uint8Array): Float64Array {
  const view = new DataView(bytes.buffer, bytes.byteOffset, bytes.byteLength);
  const readers: Record<number, [number, (o: number) => number]> = {
    [MI_INT8]: [1, (o) => view.getInt8(o)],
    [MI_UINT8]: [1, (o) => view.getUint8(o)],
    [MI_INT16]: [2, (o) => view.getInt16(o, true)],
    [MI_UINT16]: [2, (o) => view.getUint16(o, true)],
    [MI_INT32]: [4, (o) => view.getInt32(o, true)],
    [MI_UINT32]: [4, (o) => view.getUint32(o, true)],
    [MI_SINGLE]: [4, (o) => view.getFloat32(o, true)],
    [MI_DOUBLE]: [8, (o) => view.getFloat64(o, true)],
  };
  const reader = readers[type];
  if (!reader) {
    throw new FormatError(`MAT5: unsupported numeric type ${type}`);
  }
  const [width, read] = reader;
  const out = new Float64Array(Math.floor(bytes.length / width));
  for (let i = 0; i < out.length; i++) {
    out[i] = read(i * width);
  }
  return out;
}

function parseMatrix(bytes: Uint8Array): MatMatrix {
  const parts = readElements(bytes);
  if (parts.length < 4) {
    throw new FormatError("MAT5: matrix element needs flags, dims, name, data");
  }
  const flags = numericToFloat64(MI_UINT32, parts[0]!.bytes);
  const matrixClass = (flags[0] ?? 0) & 0xff;
  const complexBit = ((flags[0] ?? 0) >>> 11) & 1;
  if (complexBit) {
    throw new FormatError("MAT5: complex matrices are not supported");
  }
  if (matrixClass < 6 || matrixClass > 13) {
    throw new FormatError(`MAT5: unsupported matrix class ${matrixClass}`);
  }
  const dims = Array.from(numericToFloat64(parts[1]!.type, parts[1]!.bytes), Number);
  const name = new TextDecoder("ascii").decode(parts[2]!.bytes);
  const columnMajor = numericToFloat64(parts[3]!.type, parts[3]!.bytes);
  const count = dims.reduce((a, b) => a * b, 1);
  if (columnMajor.length !== count) {
    throw new FormatError(
      `MAT5: ${name}: ${columnMajor.length} values for dims ${JSON.stringify(dims)}`,
    );
  }
  if (dims.length !== 2) {
    throw new FormatError(`MAT5: ${name}: only 2-D matrices supported`);
  }
  const [rows, cols] = [dims[0]!, dims[1]!];
  const data = new Float64Array(count);
  for (let r = 0; r < rows; r++) {
    for (let c = 0; c < cols; c++) {
      data[r * cols + c] = columnMajor[c * rows + r]!;
    }
  }
  return { name, dims, data };
}

export function parseMat5(buffer: Uint8Array): Map<string, MatMatrix> {
  if (buffer.length < 128) {
    throw new FormatError("MAT5: file shorter than the 128-byte header");
  }
  const view = new DataView(buffer.buffer, buffer.byteOffset, buffer.byteLength);
  const endian = view.getUint16(126, true);
  if (endian !== 0x4d49) {
    // "IM" read little-endian; big-endian files are not produced by the
    // targeted archives
    throw new FormatError("MAT5: not a little-endian v5 MAT-file");
  }
  const matrices = new Map<string, MatMatrix>();
  for (const element of readElements(buffer.subarray(128))) {
    let payload = element;
    if (element.type === MI_COMPRESSED) {
      const inflated = new Uint8Array(inflateSync(element.bytes));
      const inner = readElements(inflated);
      if (inner.length !== 1) {
        throw new FormatError("MAT5: compressed element must wrap one element");
      }
      payload = inner[0]!;
    }
    if (payload.type !== MI_MATRIX) {
      continue; // skip non-matrix elements
    }
    const matrix = parseMatrix(payload.bytes);
    matrices.set(matrix.name, matrix);
  }
  return matrices;
}
